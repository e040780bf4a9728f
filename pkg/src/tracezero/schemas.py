"""Input schemas for every CLI command (draft 2020-12).

The copies under docs/schemas/ are generated from these dicts; a test keeps
them in sync.
"""
from __future__ import annotations

import json
import pathlib

MATRIX = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["n", "entries"],
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "entries": {
            "type": "array",
            "items": {
                "type": "array",
                "items": {
                    "type": "array",
                    "items": {"type": "number"},
                    "minItems": 2,
                    "maxItems": 2,
                },
            },
        },
    },
}

COMPLEX = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["vertices", "simplices"],
    "properties": {
        "vertices": {"type": "integer", "minimum": 1},
        "simplices": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        },
    },
}

FIELD = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["complex", "n", "values"],
    "properties": {
        "complex": COMPLEX,
        "n": {"type": "integer", "minimum": 1},
        "values": {"type": "object", "additionalProperties": MATRIX},
    },
}

BUNDLE = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["variables", "summands"],
    "properties": {
        "variables": {"type": "integer", "minimum": 0},
        "summands": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "array", "items": {"type": "integer"}},
        },
    },
}

TOWER_MODEL = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["blocks"],
    "properties": {
        "ambient": {"type": "integer", "minimum": 1},
        "L": {"type": "integer", "minimum": 1},
        "K": {"type": "integer", "minimum": 1},
        "M": {"type": "integer", "minimum": 1},
        "epsilon": {"type": "number", "exclusiveMinimum": 0},
        "deltas": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
        "blocks": {
            "type": "array",
            "minItems": 1,
            "items": {
                "anyOf": [
                    {
                        "type": "object",
                        "required": ["rank"],
                        "properties": {"rank": {"type": "integer", "minimum": 1}},
                    },
                    MATRIX,
                ]
            },
        },
    },
}

INPUT_SCHEMAS = {
    "decompose": MATRIX,
    "decompose-tight": MATRIX,
    "decompose-field": FIELD,
    "fack-run": {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "type": "object",
        "required": ["tower"],
        "properties": {
            "tower": TOWER_MODEL,
            "z0": MATRIX,
            "depth": {"type": "integer", "minimum": 0},
        },
    },
    "block-split": {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "type": "object",
        "required": ["blocks", "b", "pairs", "e"],
        "properties": {
            "blocks": {"type": "integer", "minimum": 1},
            "b": MATRIX,
            "pairs": {
                "type": "array",
                "minItems": 1,
                "items": {
                    "type": "object",
                    "required": ["x", "y"],
                    "properties": {"x": MATRIX, "y": MATRIX},
                },
            },
            "e": MATRIX,
        },
    },
    "obstruct": {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "type": "object",
        "required": ["q", "n"],
        "properties": {"q": BUNDLE, "n": {"type": "integer", "minimum": 1}},
    },
    "pp-example": {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "type": "object",
        "required": ["m"],
        "properties": {"m": {"type": "integer", "minimum": 1}},
    },
    "tower": {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "type": "object",
        "required": ["m_max"],
        "properties": {"m_max": {"type": "integer", "minimum": 1}},
    },
    "verify": {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "type": "object",
        "required": ["command", "parameters", "input"],
        "properties": {
            "command": {"type": "string"},
            "parameters": {"type": "object"},
            "input": {"type": "object"},
        },
    },
}

NAMED_SCHEMAS = {
    "matrix": MATRIX,
    "complex": COMPLEX,
    "field": FIELD,
    "bundle": BUNDLE,
    "tower-model": TOWER_MODEL,
    **{f"{cmd}.input": schema for cmd, schema in INPUT_SCHEMAS.items()},
}


def write_schema_files(directory) -> list:
    """Write one <name>.schema.json per schema; returns the paths."""
    directory = pathlib.Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, schema in sorted(NAMED_SCHEMAS.items()):
        path = directory / f"{name}.schema.json"
        path.write_text(json.dumps(schema, indent=2, sort_keys=True) + "\n")
        paths.append(path)
    return paths

"""JSON codecs for matrices, complexes, and fields.

Matrix schema: {"n": int, "entries": [[[re, im], ...], ...]} row-major.
Field schema: {"complex": {"vertices": int, "simplices": [[ids]]},
               "n": int, "values": {"<vertex>": matrix}}.
"""
from __future__ import annotations

import numpy as np

from .errors import InvalidInputError
from .matcore import as_matrix
from .ozfield import SimplicialComplex, SimplicialField, make_field


def matrix_to_json(m) -> dict:
    m = as_matrix(m, square=True)
    return {
        "n": int(m.shape[0]),
        "entries": [[[float(m[i, j].real), float(m[i, j].imag)]
                     for j in range(m.shape[1])] for i in range(m.shape[0])],
    }


def matrix_from_json(doc: dict, name: str = "matrix") -> np.ndarray:
    try:
        n = int(doc["n"])
        rows = doc["entries"]
    except (KeyError, TypeError) as exc:
        raise InvalidInputError(f"{name}: malformed matrix document") from exc
    if n < 1 or len(rows) != n or any(len(r) != n for r in rows):
        raise InvalidInputError(f"{name}: entries must be {n} x {n}")
    out = np.empty((n, n), dtype=complex)
    for i, row in enumerate(rows):
        for j, pair in enumerate(row):
            if len(pair) != 2:
                raise InvalidInputError(f"{name}: entry ({i},{j}) is not an [re, im] pair")
            out[i, j] = complex(float(pair[0]), float(pair[1]))
    return as_matrix(out, square=True, name=name)


def complex_to_json(c: SimplicialComplex) -> dict:
    return {"vertices": c.vertex_count,
            "simplices": [list(s) for s in c.maximal_simplices]}


def complex_from_json(doc: dict) -> SimplicialComplex:
    try:
        return SimplicialComplex.make(doc["vertices"], doc["simplices"])
    except (KeyError, TypeError) as exc:
        raise InvalidInputError("malformed complex document") from exc


def field_to_json(fld: SimplicialField) -> dict:
    return {
        "complex": complex_to_json(fld.complex),
        "n": fld.matrix_size,
        "values": {str(v): matrix_to_json(fld.values[v])
                   for v in range(fld.complex.vertex_count)},
    }


def field_from_json(doc: dict) -> SimplicialField:
    try:
        complex_ = complex_from_json(doc["complex"])
        n = int(doc["n"])
        values_doc = doc["values"]
    except (KeyError, TypeError) as exc:
        raise InvalidInputError("malformed field document") from exc
    values = []
    for v in range(complex_.vertex_count):
        key = str(v)
        if key not in values_doc:
            raise InvalidInputError(f"field is missing a value for vertex {v}")
        m = matrix_from_json(values_doc[key], name=f"value at vertex {v}")
        if m.shape[0] != n:
            raise InvalidInputError(f"value at vertex {v} is not {n} x {n}")
        values.append(m)
    return make_field(complex_, values)

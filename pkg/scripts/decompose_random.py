#!/usr/bin/env python3
"""Decompose seeded random trace-zero Hermitian matrices both ways and
print the measured bounds."""
import argparse
import json

from tracezero.matcore import commutator, operator_norm
from tracezero.rand import SplitMix64, random_trace_zero_hermitian
from tracezero.selfcomm import self_commutator_decompose, tight_commutator_decompose


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--count", type=int, default=20)
    parser.add_argument("--size", type=int, default=8)
    args = parser.parse_args()

    rng = SplitMix64(args.seed)
    rows = []
    for _ in range(args.count):
        a = random_trace_zero_hermitian(rng, args.size)
        a_norm = operator_norm(a)
        x = self_commutator_decompose(a).factors[0]
        xt, yt = tight_commutator_decompose(a).factors[0]
        rows.append({
            "norm_a": a_norm,
            "self_residual": operator_norm(a - commutator(x.conj().T, x)),
            "self_norm_sq_over_norm_a": operator_norm(x) ** 2 / a_norm,
            "tight_residual": operator_norm(a - commutator(xt, yt)),
            "tight_product_over_norm_a": operator_norm(xt) * operator_norm(yt) / a_norm,
        })
    print(json.dumps({
        "seed": args.seed,
        "count": args.count,
        "size": args.size,
        "worst_self_ratio": max(r["self_norm_sq_over_norm_a"] for r in rows),
        "worst_tight_ratio": max(r["tight_product_over_norm_a"] for r in rows),
        "rows": rows,
    }, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()

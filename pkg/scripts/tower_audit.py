#!/usr/bin/env python3
"""Audit the sphere-product tower and run a demo block-tower decomposition."""
import argparse
import json

import numpy as np

from tracezero.matcore import operator_norm, verify_decomposition
from tracezero.obstruct import villadsen_tower
from tracezero.rand import SplitMix64, random_trace_zero_hermitian
from tracezero.towers import make_block_tower, tower_iterate


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--m-max", type=int, default=3)
    parser.add_argument("--depth", type=int, default=4)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    spec = villadsen_tower(args.m_max)
    print(json.dumps(spec.to_json(), indent=2, sort_keys=True))

    ranks = [4] * (args.depth + 1)
    tower = make_block_tower(ranks, L=1, K=1, M=1)
    rng = SplitMix64(args.seed)
    n = sum(ranks)
    z0 = np.zeros((n, n), dtype=complex)
    z0[:4, :4] = random_trace_zero_hermitian(rng, 4)
    dec, report = tower_iterate(z0, tower, args.depth)
    print(f"demo tower: depth {args.depth}, {dec.factor_count()} commutators, "
          f"residual {operator_norm(dec.residual):.3e}, "
          f"collapse defect {report.collapse_defect:.3e}, "
          f"verified {verify_decomposition(z0, dec).all_passed}")


if __name__ == "__main__":
    main()

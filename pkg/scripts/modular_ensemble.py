#!/usr/bin/env python3
"""Worst modular-theory residuals over seeded random standard subspaces."""
import argparse

from helicity_lab.modular_subspace import ensemble_check


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--dmax", type=int, default=6)
    args = ap.parse_args()

    res = ensemble_check(args.trials, args.seed, args.dmax)
    width = max(len(k) for k in res.worst)
    for key, val in res.worst.items():
        print(f"{key:<{width}}  {val:.3e}")
    print(f"{res.trials} trials in {res.elapsed_s:.2f} s")


if __name__ == "__main__":
    main()

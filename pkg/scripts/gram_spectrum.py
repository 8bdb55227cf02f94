#!/usr/bin/env python3
"""Print the angular Gram spectrum and its rank for a helicity and level cutoff."""
import argparse

from helicity_lab.helicity_onep import angular_gram


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--helicity", type=int, default=1)
    ap.add_argument("--kmax", type=int, default=3)
    ap.add_argument("--p0", type=float, default=1.0)
    ap.add_argument("--order", type=int, default=None)
    args = ap.parse_args()

    g = angular_gram(args.helicity, args.kmax, args.p0, order=args.order)
    print(f"route={g.route} order={g.quadrature_order} rank={g.rank} expected={g.expected_rank} "
          f"gap={g.gap:.3e} passed={g.passed}")
    for i, ev in enumerate(g.eigenvalues):
        print(f"{i:4d} {ev: .6e}")


if __name__ == "__main__":
    main()

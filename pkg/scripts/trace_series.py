#!/usr/bin/env python3
"""Tabulate the helicity one-particle trace over a grid of inverse temperatures."""
import argparse

import numpy as np

from helicity_lab.helicity_onep import helicity_trace, trace_series_conformal, trace_series_maxwell


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--helicity", type=int, default=1)
    ap.add_argument("--beta-min", type=float, default=0.3)
    ap.add_argument("--beta-max", type=float, default=3.0)
    ap.add_argument("--points", type=int, default=21)
    ap.add_argument("--cutoff", type=int, default=200)
    args = ap.parse_args()

    print("beta,enumerated,closed_form,conformal_series,maxwell_series")
    for beta in np.linspace(args.beta_min, args.beta_max, args.points):
        enum, closed = helicity_trace(args.helicity, beta, True, args.cutoff)
        conf = trace_series_conformal(args.helicity, beta)
        maxw = trace_series_maxwell(beta) if args.helicity == 1 else float("nan")
        print(f"{beta:.6f},{enum:.15g},{closed:.15g},{conf:.15g},{maxw:.15g}")


if __name__ == "__main__":
    main()

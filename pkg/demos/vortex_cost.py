#!/usr/bin/env python3
"""How much does a vortex cost?

An interior Bloch line pays about 2 pi |log eps| in Ginzburg-Landau energy;
a vortex sitting in a corner of opening alpha_c only pays alpha_c |log eps|.
This script sweeps eps, fits E = a |log eps| + b and prints the slopes.
"""
import argparse
import math

from thinfilm import harness as H


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--eps", type=float, nargs="+", default=[0.05, 0.02, 0.01, 0.005])
    args = ap.parse_args()

    rows = [(e, H.vortex_point(e).gl) for e in args.eps]
    for e, gl in rows:
        print(f"interior  eps={e:<7g} GL={gl:9.4f}  GL/|log eps|={gl / abs(math.log(e)):.4f}")
    fit = H.fit_scaling(rows, "log", target=2 * math.pi)
    print(f"interior slope {fit.slope:.4f}  (2 pi = {2 * math.pi:.4f}, r2 = {fit.r2:.6f})\n")

    for a in (math.pi / 2, math.pi):
        pts = [(e, H.corner_point(e, a).gl) for e in args.eps]
        fit = H.fit_scaling(pts, "log", target=a)
        print(f"corner alpha_c={a:.4f}: slope {fit.slope:.4f}, intercept {fit.intercept:.3f}")


if __name__ == "__main__":
    main()

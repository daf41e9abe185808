#!/usr/bin/env python3
"""Reflecting a tangent field across the boundary doubles its boundary degree.

A tangent field with no interior vortex (degree 0 on interior curves) is
extended by the mirror rule; on the mirrored curve outside the domain the
winding number is 2.  The extended field is then used to find the two
boundary vortices of a dipole-like configuration on the disk.
"""
import argparse
import math

from thinfilm import constructions as C
from thinfilm.energy import Params
from thinfilm.geometry import Disk, Stadium, boundary_curve, make_grid
from thinfilm.topology import degree, detect_vortices, mirror_points, reflect_extend


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--h", type=float, default=0.01)
    ap.add_argument("--offset", type=float, default=0.3)
    args = ap.parse_args()
    h, r = args.h, args.offset

    cases = [("disk dipole", Disk(), C.tangent_dipole_disk(make_grid(Disk(), h, margin=0.5))),
             ("stadium onion", Stadium(), C.stadium_onion(make_grid(Stadium(), h, margin=0.5)))]
    for name, d, f in cases:
        inner = boundary_curve(d, r, h)
        img, _, _ = mirror_points(d, inner.points)
        ext = reflect_extend(f, d, r + 2 * h)
        print(f"{name:14s} inner degree {degree(f, inner)}   mirrored degree {degree(ext, img)}")

    eps = 5e-3
    g = make_grid(Disk(), eps / 4, margin=0.3)
    rep = detect_vortices(C.tangent_dipole_disk(g, 0.0, math.pi, eps=eps), Disk(), Params(eps, 0.05))
    print(rep.case)
    for b in rep.balls:
        print(f"  ball at ({b.center[0]:+.4f}, {b.center[1]:+.4f}) radius {b.radius:.4f} "
              f"GL inside {b.gl_enclosed:.3f}")


if __name__ == "__main__":
    main()

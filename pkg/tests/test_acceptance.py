"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the summary lines.
"""
import math

import numpy as np
import pytest

from thinfilm import constructions as C
from thinfilm import harness as H
from thinfilm.energy import Params, gl_energy, seminorm_h12_1d, seminorm_h12_1d_spectral
from thinfilm.geometry import Cusp, Disk, Field, Stadium, boundary_curve, make_grid
from thinfilm.topology import (approximation_error, build_cell_grid, cell_degree_check, degree,
                               detect_vortices, mirror_points, reflect_extend)


def report(n, ok, detail):
    print(f"\nACCEPTANCE {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def test_01_interior_vortex_cost():
    pts = [(e, H.vortex_point(e).gl) for e in (0.05, 0.02, 0.01, 0.005)]
    fit = H.fit_scaling(pts, "log", target=2 * math.pi)
    report(1, fit.rel_err <= 0.10 and fit.r2 >= 0.999,
           f"slope {fit.slope:.4f} vs 2pi (rel err {fit.rel_err:.3f}), r2 {fit.r2:.5f}")


def test_02_corner_vortex_cost():
    lines, ok = [], True
    for a in (math.pi / 2, math.pi):
        pts = [(e, H.corner_point(e, a).gl) for e in (0.05, 0.02, 0.01, 0.005)]
        fit = H.fit_scaling(pts, "log", target=a)
        ok &= fit.rel_err <= 0.10
        lines.append(f"alpha_c {a:.4f}: slope {fit.slope:.4f} (rel err {fit.rel_err:.3f})")
    report(2, ok, "; ".join(lines))


def test_03_boundary_vortex_deficit():
    ratios = []
    for eps in (1e-2, 1e-3, 1e-4):
        # the domain has radius 1/200, so the spacing also resolves the domain itself
        g = make_grid(Cusp(1.0 / 200), min(eps / 4, 2.5e-4))
        f = C.boundary_vortex_cusp(eps, g)
        ratios.append(gl_energy(f, eps=eps) / (math.pi * abs(math.log(eps))))
    ok = all(r < 1 for r in ratios) and all(b > a for a, b in zip(ratios, ratios[1:]))
    report(3, ok, "GL/(pi|log eps|) = " + ", ".join(f"{r:.4f}" for r in ratios))


def test_04_neel_wall():
    rows = [H.wall_point(eta) for eta in (1e-3, 1e-4, 1e-5)]
    semi = [r["seminorm_ratio"] for r in rows]
    ex = [r["exchange_scaled"] for r in rows]
    mid = 0.5 * (max(ex) + min(ex))
    ok = all(0.7 <= s <= 1.2 for s in semi) and all(abs(e / mid - 1) <= 0.3 for e in ex)
    report(4, ok, f"seminorm ratios {[round(s, 4) for s in semi]}, scaled exchange {[round(e, 4) for e in ex]}")


def test_05_stadium_upper_bound():
    eps, eta = 1e-3, 0.05
    rep = H.stadium_bound(eps, eta, cap=8_000_000)
    excess = rep.total - 2 * math.pi * abs(math.log(eps))
    bound = 1.5 * 2 * math.pi / (eta * abs(math.log(eta)))
    ok = excess <= bound and rep.penalty <= 10
    report(5, ok, f"excess {excess:.3f} <= {bound:.3f}, penalty {rep.penalty:.3f}, stray {rep.stray:.3f}")


def test_06_degree_doubling():
    h, r = 0.01, 0.3
    gd = make_grid(Disk(), h, margin=0.5)
    gs = make_grid(Stadium(), h, margin=0.5)
    fixtures = [(Disk(), C.tangent_dipole_disk(gd, a, b)) for a, b in ((0.0, math.pi), (0.3, 2.5), (1.0, 4.0))]
    fixtures += [(Stadium(), C.stadium_onion(gs, sign=s)) for s in (1, -1)]
    degs = []
    for d, f in fixtures:
        inner = boundary_curve(d, r, h)
        assert degree(f, inner) == 0
        img, _, _ = mirror_points(d, inner.points)
        degs.append(degree(reflect_extend(f, d, r + 2 * h), img))
    report(6, degs == [2] * 5, f"reflected degrees {degs}")


def test_07_detection():
    eps = 1e-3
    g = make_grid(Disk(), eps / 2, margin=0.02)
    f = C.interior_vortex(eps, (0.0, 0.0), g)
    rep = detect_vortices(Field(g, f.values[..., :2]), Disk(), Params(eps, 0.05))
    b = rep.balls[0] if rep.balls else None
    need = 0.8 * 2 * math.pi * math.log(rep.r_star / eps)
    ok1 = (rep.case == "interior-vortex" and b is not None and math.hypot(*b.center) < b.radius
           and abs(b.degree) == 1 and b.gl_enclosed >= need)
    eps2 = 5e-3
    g2 = make_grid(Disk(), eps2 / 4, margin=0.3)
    rep2 = detect_vortices(C.tangent_dipole_disk(g2, 0.0, math.pi, eps=eps2), Disk(), Params(eps2, 0.05))
    c2 = sorted(tuple(round(v, 2) for v in bb.center) for bb in rep2.balls)
    ok2 = (rep2.case == "two-boundary-vortices" and len(rep2.balls) == 2
           and all(bb.location == "boundary" for bb in rep2.balls) and c2[0] != c2[1])
    report(7, ok1 and ok2, f"interior: {rep.case}, gl_enclosed {b.gl_enclosed if b else float('nan'):.3f} "
                           f">= {need:.3f}; fixture: {rep2.case} at {c2}")


@pytest.mark.parametrize("eps,R", [(1e-2, 0.4), (1e-3, 0.2)])
def test_08_cell_degrees(eps, R):
    p = Params(eps, 0.05, beta=0.5)
    h = eps / 4
    g = make_grid(Stadium(), h, margin=2 * h, box=(-R, R, -R, R))
    f = C.stadium_landau_state(p, g)
    f2 = Field(g, f.values[..., :2])
    cg = build_cell_grid(f2, ((0.0, 0.0), R), p)
    origin = [c for c in cg.cells if c.contains_point(g, (0.0, 0.0))]
    others = [c for c in cg.cells if not c.contains_point(g, (0.0, 0.0))]
    d_origin = [cell_degree_check(f2, c) for c in origin]
    d_other = {cell_degree_check(f2, c) for c in others}
    ok = d_origin == [1] and d_other == {0}
    report(8, ok, f"eps {eps}: {len(cg.cells)} cells, origin cell degree {d_origin}, others {sorted(d_other)}")


def test_09_s1_projection():
    eps, eta = 1e-2, 0.05
    coarse = approximation_error(eps, eta, 0.5)
    # eps^beta four times smaller: beta = 1/2 + log 4 / |log eps|
    fine = approximation_error(eps, eta, 0.5 + math.log(4) / abs(math.log(eps)))
    factor = coarse["l2_sq"] / fine["l2_sq"]
    unit = max(coarse["unit_err"], fine["unit_err"])
    ok = factor >= 2.5 and unit <= 1e-12 and abs(coarse["cell_size"] / fine["cell_size"] - 4) < 1e-9
    report(9, ok, f"cell {coarse['cell_size']:.4f} -> {fine['cell_size']:.4f}, L2^2 {coarse['l2_sq']:.3e} -> "
                  f"{fine['l2_sq']:.3e} (factor {factor:.1f}), unit err {unit:.1e}")


def test_10_tangency_necessity():
    rep = H.tangency_divergence([1 / 64, 1 / 128, 1 / 256, 1 / 512])
    ok = rep["constant_diverges"] and rep["tangent_bounded"]
    report(10, ok, f"constant ratios {[round(r, 4) for r in rep['ratios_constant']]}, "
                   f"tangent ratios {[round(r, 4) for r in rep['ratios_tangent']]}")


def test_11_oracle_equivalence():
    t = np.linspace(-1, 1, 2049)
    h = t[1] - t[0]
    fixtures = []
    for k, w in enumerate((0.05, 0.1, 0.2, 0.3)):
        v = np.exp(-((t - 0.1 * k) / w) ** 2)
        fixtures.append(v - np.linspace(v[0], v[-1], t.size))
    for m in (1, 2, 3):
        fixtures.append(np.sin(m * math.pi * t) * (1 - t * t))
    fixtures.append((1 - t * t) ** 2)
    fixtures.append(np.cos(math.pi * t / 2) ** 3)
    fixtures.append(np.exp(1 - 1 / np.maximum(1 - t * t, 1e-300)))  # smooth compactly supported bump
    errs = [abs(seminorm_h12_1d_spectral(v, h, pad=64) / seminorm_h12_1d(v, h) - 1) for v in fixtures]
    report(11, len(fixtures) == 10 and max(errs) <= 1e-4, f"max relative difference {max(errs):.2e} over {len(errs)} fixtures")

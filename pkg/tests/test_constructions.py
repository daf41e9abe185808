import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.ndimage import maximum_filter

from thinfilm import constructions as C
from thinfilm.constructions import REGION_NAMES
from thinfilm.energy import Params
from thinfilm.errors import CoreOutsideDomain, InvalidParameter
from thinfilm.geometry import Corner, Cusp, Disk, Field, Grid, Stadium, cusp_gamma, make_grid
from thinfilm.topology import _masked_gradient_norm, circle, degree, tangency_residual

LAM = 0.05 * abs(math.log(0.05))


# ---------------------------------------------------------------------------
# Neel wall
# ---------------------------------------------------------------------------


def test_wall_profile_values():
    lam = 0.01
    e = math.sqrt(1 - lam * lam)
    assert float(C.wall_u(0.0, lam)) == pytest.approx(1.0, abs=1e-14)
    assert float(C.wall_v(0.0, lam)) == pytest.approx(0.0, abs=1e-7)
    assert float(C.wall_u(e, lam)) == pytest.approx(0.0, abs=1e-14)
    assert float(C.wall_u(-e, lam)) == pytest.approx(0.0, abs=1e-14)
    assert float(C.wall_v(-1.0, lam)) == -1.0
    assert float(C.wall_v(1.0, lam)) == 1.0


@settings(max_examples=30, deadline=None)
@given(st.floats(1e-5, 0.49))
def test_wall_profile_invariants(lam):
    p = C.neel_wall_profile(lam, h=min(lam / 4, 1e-3))
    assert np.allclose(p.u ** 2 + p.v ** 2, 1.0, atol=1e-12)
    assert np.all(p.v[p.t < 0] <= 0) and np.all(p.v[p.t > 0] >= 0)
    assert np.all(p.u[np.abs(p.t) >= 1] == 0)
    x2 = np.linspace(-1, 1, 101)
    assert np.allclose(p.theta_bar(-x2) + p.theta_bar(x2), math.pi, atol=1e-12)


def test_wall_phase_theta_values():
    assert float(C.wall_phase_theta(LAM, 0.0)) == pytest.approx(math.pi / 2, abs=1e-7)
    assert float(C.wall_phase_theta(LAM, -1.0)) == 0.0
    assert float(C.wall_phase_theta(LAM, 1.0)) == pytest.approx(math.pi)


def test_wall_profile_limit():
    lams = np.geomspace(1e-4, 1e-3, 6)
    u = [float(C.wall_u(0.5, lam)) for lam in lams]
    assert all(b > a for a, b in zip(u, u[1:]))  # u(0.5) decreases as lam decreases


def test_wall_profile_invalid():
    with pytest.raises(InvalidParameter):
        C.neel_wall_profile(0.5)
    with pytest.raises(InvalidParameter):
        C.neel_wall_profile(0.0)


def test_wall_exchange_matches_samples():
    p = C.neel_wall_profile(0.05, h=1e-5)
    du = np.diff(p.u) / p.h
    dv = np.diff(p.v) / p.h
    assert p.exchange() == pytest.approx(float((du ** 2 + dv ** 2).sum() * p.h), rel=1e-2)


# ---------------------------------------------------------------------------
# stadium
# ---------------------------------------------------------------------------


def centered_stadium_grid(h, half=None):
    """Stadium grid with a node exactly at the origin and symmetric under x -> -x."""
    kx = int(math.ceil((half or 2.0) / h)) + 2
    ky = int(math.ceil((half or 1.0) / h)) + 2
    return Grid.from_domain(Stadium(), h, 2 * kx + 1, 2 * ky + 1, (-kx * h, -ky * h))


@pytest.fixture(scope="module")
def stadium():
    p = Params(0.02, 0.05)
    g = centered_stadium_grid(0.005)
    return p, g, C.stadium_landau_state(p, g)


def test_stadium_unit_length(stadium):
    _, g, f = stadium
    assert np.allclose(np.linalg.norm(f.values, axis=-1)[g.mask], 1.0, atol=1e-12)


def test_stadium_core(stadium):
    p, g, f = stadium
    i0 = (g.nx - 1) // 2
    j0 = (g.ny - 1) // 2
    assert abs(g.x[i0]) < 1e-12 and abs(g.y[j0]) < 1e-12
    assert f.values[i0, j0, 2] == pytest.approx(1.0)
    X, Y = g.coords()
    far = (np.hypot(X, Y) >= p.eps) & g.mask
    assert np.all(f.values[..., 2][far] == 0.0)


def test_stadium_cap_vortex_value():
    p = Params(0.02, 0.05)
    phase, amp, labels = C.stadium_phase(np.array([1.5]), np.array([0.0]), p)
    assert REGION_NAMES[int(labels[0])] == "Omega11"
    assert amp[0] == 1.0
    assert (math.cos(phase[0]), math.sin(phase[0])) == pytest.approx((0.0, 1.0), abs=1e-12)


def test_stadium_symmetries(stadium):
    _, g, f = stadium
    m = f.values
    # the mask may differ by roundoff on nodes lying on the boundary itself
    both = g.mask & g.mask[::-1, ::-1] & g.mask[:, ::-1] & g.mask[::-1, :]
    assert (g.mask & ~both).sum() <= 8
    # m'(x) = -m'(-x); m1(x1, x2) = -m1(x1, -x2); m2(x1, x2) = -m2(-x1, x2)
    assert np.allclose(m[..., :2][both], -m[::-1, ::-1, :2][both], atol=1e-10)
    assert np.allclose(m[..., 0][both], -m[:, ::-1, 0][both], atol=1e-10)
    assert np.allclose(m[..., 1][both], -m[::-1, :, 1][both], atol=1e-10)


def test_stadium_regions_partition(stadium):
    p, g, _ = stadium
    R = C.stadium_regions(p, g)
    lab = R.labels
    assert np.all(lab[g.mask] > 0) and np.all(lab[~g.mask] == 0)
    assert sum(R.count(n) for n in REGION_NAMES[1:]) == int(g.mask.sum())
    X, Y = g.coords()
    core = (np.hypot(X, Y) < p.eps) & g.mask
    assert np.all(lab[core] == REGION_NAMES.index("B_eps"))
    for name in REGION_NAMES[1:]:
        assert R.count(name) > 0, name


def test_stadium_interface_mismatch_is_zero(stadium):
    p, g, _ = stadium
    assert C.stadium_regions(p, g).interface_mismatch < 1e-12


def test_stadium_parameter_checks():
    g = make_grid(Stadium(), 0.05)
    with pytest.raises(InvalidParameter):
        C.stadium_landau_state(Params(0.1, 0.3), g)  # 2 delta >= 1
    with pytest.raises(InvalidParameter):
        C.stadium_landau_state(Params(0.04, 0.05), g)  # h > eps/4
    with pytest.warns(RuntimeWarning):
        C.stadium_landau_state(Params(0.2, 0.05), g, check_resolution=True)


def _stadium_tangency(h, p):
    g = make_grid(Stadium(), h, margin=2 * h)
    f = C.stadium_landau_state(p, g, check_resolution=False)
    d = Stadium()
    X, Y = g.coords()
    X, Y = np.broadcast_arrays(X, Y)
    sel = g.mask & (d.signed_distance(X, Y) > -h)
    s, _ = d.project(X[sel], Y[sel])
    _, _, nu = d.boundary(s)
    r = np.abs((f.values[..., :2][sel] * nu).sum(-1))
    away = np.abs(X[sel]) > p.delta
    return float(r.max()), float(r[away].max())


@pytest.mark.xfail(strict=True, reason="sqrt(h) tangency defect where omega1 meets the boundary; see ledger")
def test_stadium_tangency_within_5h():
    p = Params(0.02, 0.05)
    h = p.eps / 4
    total, _ = _stadium_tangency(h, p)
    assert total <= 5 * h


def test_stadium_tangency_structure():
    p = Params(0.02, 0.05)
    rows = [_stadium_tangency(h, p) for h in (0.005, 0.0025, 0.00125)]
    # away from the pinch points the node residual is the phase slope 1/delta times h
    for (_, away), h in zip(rows, (0.005, 0.0025, 0.00125)):
        assert away <= 1.05 * h / p.delta
    # at the pinch points it decays like sqrt(h)
    ratios = [b[0] / a[0] for a, b in zip(rows, rows[1:])]
    assert all(0.6 <= r <= 0.8 for r in ratios)


def _max_region_jump(h, p, far_from_core=False):
    g = make_grid(Stadium(), h, margin=2 * h)
    f = C.stadium_landau_state(p, g, check_resolution=False)
    lab = C.stadium_regions(p, g).labels
    X, Y = g.coords()
    X, Y = np.broadcast_arrays(X, Y)
    best = 0.0
    for ax in (0, 1):
        a = tuple(slice(0, -1) if k == ax else slice(None) for k in (0, 1))
        b = tuple(slice(1, None) if k == ax else slice(None) for k in (0, 1))
        sel = (lab[a] != lab[b]) & g.mask[a] & g.mask[b]
        if far_from_core:
            sel &= np.hypot(X[a], Y[a]) > 0.1
        j = np.linalg.norm(f.values[a] - f.values[b], axis=-1)[sel]
        best = max(best, float(j.max()))
    return best


@pytest.mark.xfail(strict=True, reason="continuity modulus is sqrt(h) at the pinch points; see ledger")
def test_stadium_continuity_linear_in_h():
    p = Params(0.02, 0.05)
    jumps = [_max_region_jump(h, p) for h in (p.eps / 4, p.eps / 8, p.eps / 16)]
    assert all(b / a <= 0.6 for a, b in zip(jumps, jumps[1:]))


def test_stadium_continuity_holds():
    p = Params(0.02, 0.05)
    hs = (p.eps / 4, p.eps / 8, p.eps / 16)
    jumps = [_max_region_jump(h, p) for h in hs]
    assert all(b < a for a, b in zip(jumps, jumps[1:]))
    pinch = [_max_region_jump(h, p, far_from_core=True) for h in hs]
    for a, b in zip(pinch, pinch[1:]):
        assert b / a == pytest.approx(math.sqrt(0.5), abs=0.08)


# ---------------------------------------------------------------------------
# vortices
# ---------------------------------------------------------------------------


def test_interior_vortex():
    g = Grid.from_domain(Disk(), 0.01, 201, 201, (-1.0, -1.0))
    c = (0.2, -0.1)
    f = C.interior_vortex(0.05, c, g)
    assert np.allclose(np.linalg.norm(f.values, axis=-1)[g.mask], 1.0, atol=1e-12)
    assert f.values[120, 90, 2] == pytest.approx(1.0)  # node at the center
    f2 = Field(g, f.values[..., :2])
    for r in (0.06, 0.2, 0.5):
        assert degree(f2, circle(c, r, 0.005)) == 1
    with pytest.raises(CoreOutsideDomain):
        C.interior_vortex(0.05, (0.97, 0.0), g)


def test_cusp_vortex():
    eps = 1e-3
    g = make_grid(Cusp(1.0 / 200), eps / 20)
    f = C.boundary_vortex_cusp(eps, g)
    X, Y = g.coords()
    assert np.all(np.hypot(X, Y)[f.grid.mask] < 1.0 / 200)
    r = np.geomspace(1e-6, 1.0 / 200 * 0.999, 50)
    assert np.all(C.cusp_phase(r, 0.0) == 0.0)
    dt = C.cusp_delta_theta(r)
    assert np.all(dt < 0) and np.all(dt > -math.pi / 2)
    gam = cusp_gamma(r)
    edge = C.cusp_phase(r, gam)
    assert np.allclose(edge, gam + dt)
    assert np.all(np.abs(edge) < math.pi / 2)
    assert np.allclose(C.cusp_phase(r, -gam), -edge)
    # tangency along the two cusp curves; the truncating arc |x| = r_max is excluded
    d = Cusp(1.0 / 200)
    X, Y = np.broadcast_arrays(*g.coords())
    sd = d.signed_distance(X, Y)
    sel = f.grid.mask & (sd > -g.h) & (np.hypot(X, Y) < 0.9 / 200)
    s, _ = d.project(X[sel], Y[sel])
    _, _, nu = d.boundary(s)
    grad = maximum_filter(_masked_gradient_norm(f.values[..., :2], f.grid.mask, g.h), size=3)
    res = np.abs((f.values[..., :2][sel] * nu).sum(-1)) - np.abs(sd[sel]) * grad[sel]
    assert res.max() <= 5 * g.h
    with pytest.raises(InvalidParameter):
        C.boundary_vortex_cusp(0.1, g)


def test_cusp_phase_is_tangent_on_boundary():
    # the phase on theta = gamma(r) equals the boundary tangent angle
    r = np.geomspace(1e-5, 4e-3, 40)
    gam = cusp_gamma(r)
    w = np.stack([r * np.cos(gam), r * np.sin(gam)], -1)
    dr = 1e-9 * r
    g2 = cusp_gamma(r + dr)
    w2 = np.stack([(r + dr) * np.cos(g2), (r + dr) * np.sin(g2)], -1)
    t = (w2 - w) / np.linalg.norm(w2 - w, axis=-1, keepdims=True)
    ph = C.cusp_phase(r, gam)
    assert np.allclose(np.abs(np.cos(ph) * t[:, 1] - np.sin(ph) * t[:, 0]), 0.0, atol=1e-5)


def test_corner_vortex():
    eps = 0.05
    g = make_grid(Corner(math.pi / 2), eps / 4, anchor=(0.0, 0.0))
    f = C.corner_vortex(eps, g)
    X, Y = g.coords()
    r = np.hypot(X, Y)
    mod = np.linalg.norm(f.values, axis=-1)
    assert np.allclose(mod[(r > eps) & g.mask], 1.0)
    g0 = Grid.from_domain(Corner(math.pi), 0.01, 21, 21, (-0.1, 0.0))
    assert np.allclose(C.corner_vortex(eps, g0).values[10, 0], 0.0)


# ---------------------------------------------------------------------------
# tangent fixtures
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("a,b", [(0.0, math.pi), (0.3, 2.5), (1.0, 4.0)])
def test_dipole_fixture(a, b):
    g = make_grid(Disk(), 0.01, margin=0.3)
    f = C.tangent_dipole_disk(g, a, b)
    assert degree(f, circle((0, 0), 0.5, 0.01)) == 0
    assert tangency_residual(f, Disk(), allowance=True) <= 10 * g.h
    mod = np.linalg.norm(f.values, axis=-1)
    assert mod.max() <= 1 + 1e-12


def test_onion_fixture():
    g = make_grid(Stadium(), 0.01, margin=0.3)
    for sign in (1, -1):
        f = C.stadium_onion(g, sign=sign)
        assert degree(f, circle((0, 0), 0.5, 0.01)) == 0
        assert tangency_residual(f, Stadium(), allowance=True) <= 10 * g.h

"""Explicit magnetization configurations.

* the logarithmic Neel wall ansatz ``u_lam``, ``v_lam`` and its angle profile,
* the Landau state on the stadium (one Bloch line at the origin, a Neel wall
  along ``x2 = 0`` and two vortex-like caps),
* interior, cusp-boundary and corner vortices,
* tangent degree-zero fixtures with two boundary zeros used by the topology
  tests.

Phases are assembled as angles and exponentiated once at the end.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .energy import Params
from .errors import CoreOutsideDomain, InvalidParameter
from .geometry import Cusp, Field, Grid, cusp_dgamma, cusp_gamma

# ---------------------------------------------------------------------------
# Neel wall
# ---------------------------------------------------------------------------


def _check_lam(lam):
    if not 0.0 < lam < 0.5:
        raise InvalidParameter("wall core scale must lie in (0, 1/2)")


def wall_u(t, lam):
    """``u_lam(t) = |log sqrt(t^2 + lam^2)| / |log lam|`` on ``|t| <= sqrt(1 - lam^2)``."""
    _check_lam(lam)
    t = np.asarray(t, dtype=float)
    L = abs(math.log(lam))
    r2 = t * t + lam * lam
    u = -0.5 * np.log(np.minimum(r2, 1.0)) / L
    return np.where(r2 < 1.0, u, 0.0)


def wall_v(t, lam):
    """``v_lam = -sqrt(1-u^2)`` for ``t <= 0`` and ``+sqrt(1-u^2)`` for ``t > 0``."""
    t = np.asarray(t, dtype=float)
    u = wall_u(t, lam)
    s = np.sqrt(np.maximum(0.0, 1.0 - u * u))
    return np.where(t <= 0.0, -s, s)


def wall_derivatives(t, lam):
    """Exact ``u'`` and ``v'`` (with ``1 - u`` evaluated through ``log1p``)."""
    t = np.asarray(t, dtype=float)
    L = abs(math.log(lam))
    inside = t * t + lam * lam < 1.0
    du = np.where(inside, -t / ((t * t + lam * lam) * L), 0.0)
    u = wall_u(t, lam)
    one_minus_u = np.log1p(t * t / (lam * lam)) / (2.0 * L)
    with np.errstate(divide="ignore", invalid="ignore"):
        dv = np.where(inside, np.abs(u * du) / np.sqrt(one_minus_u * (1.0 + u)), 0.0)
    dv = np.where(t == 0.0, 1.0 / (lam * math.sqrt(L)), dv)
    return du, dv


def wall_phase_theta(lam, x2):
    """Angle ``theta_bar(x2)`` in ``[0, pi]`` with ``e^{i theta_bar} = (-v, u)``."""
    _check_lam(lam)
    x2 = np.asarray(x2, dtype=float)
    L = abs(math.log(lam))
    b = -np.abs(x2)
    r2 = b * b + lam * lam
    lower = np.where(r2 < 1.0, np.arcsin(np.clip(-0.5 * np.log(np.minimum(r2, 1.0)) / L, 0.0, 1.0)), 0.0)
    return np.where(x2 > 0.0, math.pi - lower, lower)


@dataclass(frozen=True)
class WallProfile:
    """Sampled Neel wall ``u_lam``, ``v_lam`` on ``[-1, 1]``."""

    lam: float
    t: np.ndarray
    u: np.ndarray
    v: np.ndarray

    @property
    def h(self):
        return float(self.t[1] - self.t[0])

    def theta_bar(self, x2):
        return wall_phase_theta(self.lam, x2)

    def exchange(self):
        """``int (u'^2 + v'^2) dt`` by adaptive quadrature of the exact derivatives."""
        lam = self.lam
        edge = math.sqrt(1.0 - lam * lam)

        def f(t):
            du, dv = wall_derivatives(np.array([t]), lam)
            return float(du[0] ** 2 + dv[0] ** 2)

        pts = [lam * 0.1, lam, 10 * lam, 100 * lam]
        pts = [p for p in pts if p < edge]
        val, _ = quad(f, 0.0, edge, points=pts, limit=400, epsabs=0, epsrel=1e-10)
        return 2.0 * val


def neel_wall_profile(lam: float, h: float | None = None) -> WallProfile:
    """Sample the wall on ``[-1, 1]`` (spacing defaults to ``min(lam/20, 1e-3)``)."""
    _check_lam(lam)
    if h is None:
        h = min(lam / 20.0, 1e-3)
    n = int(round(1.0 / h))
    t = np.linspace(-1.0, 1.0, 2 * n + 1)
    return WallProfile(lam, t, wall_u(t, lam), wall_v(t, lam))


# ---------------------------------------------------------------------------
# stadium Landau state
# ---------------------------------------------------------------------------

REGION_NAMES = ("outside", "B_eps", "omega1", "omega2", "omega3",
                "Omega21", "Omega12", "Omega11", "Omega3-mirror")


@dataclass(frozen=True)
class StadiumRegions:
    """Per-node region label (index into ``REGION_NAMES``) and phase."""

    labels: np.ndarray
    phase: np.ndarray
    amplitude: np.ndarray
    interface_mismatch: float

    def count(self, name):
        return int((self.labels == REGION_NAMES.index(name)).sum())


def _stadium_base(a, b, eps, lam, delta):
    """Phase and label in the quadrant ``a >= 0``, ``b <= 0``."""
    r = np.hypot(a, b)
    sd = math.sqrt(1.0 - delta * delta)
    theta = wall_phase_theta(lam, b)
    alpha_d = np.arcsin(delta / np.sqrt(b * b + delta * delta))
    vortex0 = np.arctan2(a, -b)
    low = b < -sd

    core = r < eps
    w1 = (a <= delta) & (r < 1.0)
    w2 = (a <= delta) & (r >= 1.0)
    w3 = (a > delta) & (a <= 2 * delta)
    o21 = (a > 2 * delta) & (a <= 1.0)
    o12 = (a > 1.0) & (a <= 1.0 + delta)
    o11 = a > 1.0 + delta

    with np.errstate(divide="ignore", invalid="ignore"):
        # omega2: affine in x2 between the bottom edge and the unit circle
        den = 1.0 - np.sqrt(np.clip(1.0 - a * a, 0.0, 1.0))
        t2 = np.clip(np.where(den > 0, (b + 1.0) / den, 0.0), 0.0, 1.0)
        ph_w2 = t2 * np.arcsin(np.clip(a, 0.0, 1.0))
        # omega3: affine in x1 between x1 = delta and x1 = 2 delta
        tau = np.clip((a - delta) / delta, 0.0, 1.0)
        left3 = np.where(low, (b + 1.0) / (1.0 - sd) * math.asin(delta), alpha_d)
        ph_w3 = (1.0 - tau) * left3 + tau * theta
        # Omega12: affine in x1 between the wall and the cap vortex
        half = np.sqrt(np.clip(1.0 - b * b, 0.0, 1.0))
        t_low = np.clip(np.where(half > 0, (a - 1.0) / half, 0.0), 0.0, 1.0)
        t_mid = np.clip((a - 1.0) / delta, 0.0, 1.0)
        ph_12 = np.where(low, t_low * np.arcsin(half) + (1.0 - t_low) * theta,
                         t_mid * alpha_d + (1.0 - t_mid) * theta)
    ph_11 = np.arctan2(a - 1.0, -b)

    conds = [core, w1, w2, w3, o21, o12, o11]
    phase = np.select(conds, [vortex0, vortex0, ph_w2, ph_w3, theta, ph_12, ph_11])
    labels = np.select(conds, [1, 2, 3, 4, 5, 6, 7], default=0)
    return phase, labels


def stadium_phase(x, y, params: Params):
    """Phase, core amplitude and region label of the Landau state at points."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x, y = np.broadcast_arrays(x, y)
    a = np.abs(x)
    b = -np.abs(y)
    base, labels = _stadium_base(a, b, params.eps, params.lam, params.delta)
    # reflection x2 -> -x2 on the right half, then point symmetry for x1 < 0
    right = np.where(y > 0.0, math.pi - base, base)
    left = np.where(y < 0.0, 2.0 * math.pi - base, math.pi + base)
    phase = np.where(x >= 0.0, right, left)
    labels = np.where((x <= -1.0) & (labels != 1), 8, labels)
    r = np.hypot(x, y)
    amp = np.where(r < params.eps, np.sin(0.5 * math.pi * r / params.eps), 1.0)
    return phase, amp, labels


def _interface_mismatch(params):
    """Jump between the two Omega12 formulas at ``x2 = -sqrt(1 - delta^2)``."""
    delta, lam = params.delta, params.lam
    x2 = -math.sqrt(1.0 - delta * delta)
    t = np.linspace(0.0, 1.0, 101)
    theta = float(wall_phase_theta(lam, x2))
    low = t * math.asin(math.sqrt(1.0 - x2 * x2)) + (1.0 - t) * theta
    mid = t * math.asin(delta / math.sqrt(x2 * x2 + delta * delta)) + (1.0 - t) * theta
    return float(np.abs(low - mid).max())


def stadium_regions(params: Params, grid: Grid) -> StadiumRegions:
    X, Y = grid.coords()
    phase, amp, labels = stadium_phase(X, Y, params)
    labels = np.where(grid.mask, labels, 0)
    return StadiumRegions(labels, phase, amp, _interface_mismatch(params))


def _check_stadium_params(params: Params):
    if 2.0 * params.delta >= 1.0:
        raise InvalidParameter("the wall construction needs 2*delta < 1 (eta below ~0.2)")
    if params.lam >= 0.5:
        raise InvalidParameter("wall core scale eta|log eta| must be below 1/2")
    if params.eps >= params.eta:
        warnings.warn("stadium_landau_state: eps >= eta is outside the construction regime",
                      RuntimeWarning, stacklevel=3)


def stadium_landau_state(params: Params, grid: Grid, check_resolution: bool = True) -> Field:
    """Landau state on the stadium as a 3-component field on ``grid``.

    ``check_resolution`` enforces ``h <= eps/4``; the composite evaluation
    in :mod:`thinfilm.harness` switches it off for the coarse outer grid.
    """
    _check_stadium_params(params)
    if check_resolution and grid.h > params.eps / 4.0 * (1 + 1e-9):
        raise InvalidParameter("stadium state needs h <= eps/4")
    X, Y = grid.coords()
    phase, amp, _ = stadium_phase(X, Y, params)
    m3 = np.sqrt(np.maximum(0.0, 1.0 - amp * amp))
    m3 = np.broadcast_to(m3, phase.shape)
    vals = np.stack([amp * np.cos(phase), amp * np.sin(phase), m3], -1)
    return Field(grid, vals)


# ---------------------------------------------------------------------------
# vortices
# ---------------------------------------------------------------------------


def _vortex_values(grid, eps, center):
    X, Y = grid.coords()
    dx = X - center[0]
    dy = Y - center[1]
    r = np.hypot(dx, dy)
    with np.errstate(divide="ignore", invalid="ignore"):
        ex = np.where(r > 0, -dy / r, 0.0)
        ey = np.where(r > 0, dx / r, 0.0)
    amp = np.where(r < eps, np.sin(0.5 * math.pi * r / eps), 1.0)
    m3 = np.sqrt(np.maximum(0.0, 1.0 - amp * amp))
    return np.stack([amp * ex, amp * ey, m3], -1)


def interior_vortex(eps: float, center, grid: Grid) -> Field:
    """Bloch line ``sin(pi|x-c|/2eps) (x-c)^perp/|x-c|`` with ``m3 >= 0``."""
    if not eps > 0:
        raise InvalidParameter("eps must be positive")
    c = (float(center[0]), float(center[1]))
    if grid.domain is not None and not float(grid.domain.signed_distance(c[0], c[1])) < -eps:
        raise CoreOutsideDomain("the vortex core must lie inside the domain")
    return Field(grid, _vortex_values(grid, eps, c))


def smoothstep5(t):
    """Quintic smoothstep: 0 for ``t <= 0``, 1 for ``t >= 1``."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    return t * t * t * (t * (6.0 * t - 15.0) + 10.0)


def cusp_delta_theta(r):
    """``delta_theta(r) = arctan(r gamma'(r))`` in ``(-pi/2, 0)``."""
    return np.arctan(r * cusp_dgamma(r))


def cusp_phase(r, theta):
    """Phase ``(1 + delta_theta/gamma) theta``; tangent on both cusp sides."""
    r = np.asarray(r, dtype=float)
    g = cusp_gamma(r)
    return (1.0 + cusp_delta_theta(r) / g) * theta


def boundary_vortex_cusp(eps: float, grid: Grid) -> Field:
    """Half vortex at the cusp tip, ``f(|x|/eps) e^{i phi}`` on ``Omega cap B_{1/200}``."""
    if not 0.0 < eps < 0.05:
        raise InvalidParameter("eps must lie in (0, 1/20)")
    dom = grid.domain
    if not isinstance(dom, Cusp):
        raise InvalidParameter("boundary_vortex_cusp needs a cusp grid")
    X, Y = grid.coords()
    r = np.hypot(X, Y)
    keep = r < 1.0 / 200.0
    if not np.all(keep[grid.mask]):
        grid = grid.restrict(np.broadcast_to(keep, grid.shape))
    th = np.arctan2(Y, X)
    rr = np.clip(r, 1e-300, 1.0 / 200.0)
    phi = np.where(r > 0, cusp_phase(rr, th), 0.0)
    f = smoothstep5(r / eps)
    vals = np.stack([f * np.cos(phi), f * np.sin(phi)], -1)
    return Field(grid, np.broadcast_to(vals, grid.shape + (2,)))


def corner_vortex(eps: float, grid: Grid) -> Field:
    """Radial field ``x/|x|`` for ``|x| > eps`` and ``x/eps`` inside."""
    if not 0.0 < eps < 1.0:
        raise InvalidParameter("eps must lie in (0, 1)")
    X, Y = grid.coords()
    r = np.hypot(X, Y)
    s = 1.0 / np.maximum(r, eps)
    vals = np.stack(np.broadcast_arrays(X * s, Y * s), -1)
    return Field(grid, vals)


# ---------------------------------------------------------------------------
# tangent fixtures with two boundary zeros
# ---------------------------------------------------------------------------


def tangent_dipole_disk(grid: Grid, a: float = 0.0, b: float = math.pi, eps: float = 0.02) -> Field:
    """Tangent field on the unit disk with zeros at ``e^{ia}``, ``e^{ib}``.

    The direction is that of the polynomial ``i e^{-i(a+b)/2} (z - p)(z - q)``,
    which is tangent on the unit circle and has no zero inside, so its degree
    on every interior circle is 0.  The modulus is cut off as
    ``smoothstep(|z-p||z-q| / (eps |p-q|))`` near the two zeros.
    """
    X, Y = grid.coords()
    z = X + 1j * Y
    p, q = np.exp(1j * a), np.exp(1j * b)
    w = 1j * np.exp(-0.5j * (a + b)) * (z - p) * (z - q)
    mod = np.abs(w)
    with np.errstate(divide="ignore", invalid="ignore"):
        d = np.where(mod > 0, w / mod, 0.0)
    amp = smoothstep5(mod / (eps * abs(p - q)))
    f = amp * d
    return Field(grid, np.stack([f.real, f.imag], -1))


def stadium_onion(grid: Grid, eps: float = 0.02, sign: float = 1.0) -> Field:
    """Onion state on the stadium: ``(1, 0)`` on the square, cap flows with
    head-to-head zeros at the tips ``(+-2, 0)``; degree 0 inside."""
    X, Y = grid.coords()
    X, Y = np.broadcast_arrays(X, Y)
    w = np.ones(X.shape, dtype=complex)
    for cx, sel in ((1.0, X > 1.0), (-1.0, X < -1.0)):
        z = (X - cx) + 1j * Y
        w = np.where(sel, 1.0 - z * z, w)
    mod = np.abs(w)
    with np.errstate(divide="ignore", invalid="ignore"):
        d = np.where(mod > 0, w / mod, 0.0)
    amp = smoothstep5(mod / (2.0 * eps))
    f = sign * amp * d
    return Field(grid, np.stack([f.real, f.imag], -1))

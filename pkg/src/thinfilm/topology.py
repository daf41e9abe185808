"""Winding numbers, mirror extension across the boundary, vortex detection
and the cell-wise S1 approximation.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field as dc_field

import numpy as np
from scipy import fft as sfft
from scipy.ndimage import maximum_filter

from . import constructions as C
from .energy import Params, gl_density, gl_energy, gl_energy_on_curve
from .errors import (AmbiguousDegree, DegreeOutOfRange, EnergyBudgetExceeded, InvalidParameter,
                     LiftFailure, ModulusTooSmall, ModulusViolation, NoGoodRadius,
                     NonzeroDegreeCell, OutOfBounds, OutsideSecurityRegion, TangencyViolation)
from .geometry import Curve, Domain, Field, Grid, bilinear, bilinear_inside, boundary_curve, make_grid

# ---------------------------------------------------------------------------
# degree
# ---------------------------------------------------------------------------


def winding(vectors, min_modulus=0.5):
    """Degree of a closed sequence of plane vectors (last may repeat first).

    Sums principal-value angle increments; raises if a sample is too short
    or the sum is not within 0.1 of an integer multiple of ``2 pi``.
    """
    v = np.asarray(vectors, dtype=float)
    mod = np.hypot(v[:, 0], v[:, 1])
    if np.any(mod < min_modulus):
        raise ModulusTooSmall(f"|m'| = {mod.min():.3g} < {min_modulus} on the curve")
    if not np.allclose(v[0], v[-1], atol=1e-12, rtol=0):
        v = np.vstack([v, v[:1]])
    ang = np.arctan2(v[:, 1], v[:, 0])
    inc = np.angle(np.exp(1j * np.diff(ang)))
    turns = inc.sum() / (2.0 * math.pi)
    d = int(round(turns))
    if abs(turns - d) >= 0.1:
        raise AmbiguousDegree(f"winding {turns:.3f} is not close to an integer")
    return d


def degree(field: Field, curve) -> int:
    """Winding number of ``m'`` along a closed curve (``Curve`` or point array)."""
    pts = curve.points if isinstance(curve, Curve) else np.asarray(curve, dtype=float)
    vals = bilinear(field.values[..., :2], field.grid, pts[:, 0], pts[:, 1])
    return winding(vals)


def circle(center, radius, resolution):
    n = max(16, int(math.ceil(2 * math.pi * radius / resolution)))
    a = np.linspace(0.0, 2 * math.pi, n + 1)
    return np.stack([center[0] + radius * np.cos(a), center[1] + radius * np.sin(a)], -1)


# ---------------------------------------------------------------------------
# mirror extension
# ---------------------------------------------------------------------------


def reflection_matrix(T):
    """``S = 2 T (x) T - Id`` for unit tangents ``T`` (shape ``(..., 2)``)."""
    T = np.asarray(T, dtype=float)
    S = 2.0 * T[..., :, None] * T[..., None, :]
    S[..., 0, 0] -= 1.0
    S[..., 1, 1] -= 1.0
    return S


def mirror_points(domain: Domain, pts):
    """Reflect points across the boundary along the normal: ``w(s) + t nu -> w(s) - t nu``."""
    pts = np.asarray(pts, dtype=float)
    s, t = domain.project(pts[..., 0], pts[..., 1])
    w, T, nu = domain.boundary(s)
    return w - t[..., None] * nu, s, t


def _masked_gradient_norm(values, mask, h):
    """``|grad m'|`` from differences that only use inside nodes.

    Each axis uses the average of the forward and backward difference that
    are available; nodes without an inside neighbor along an axis get 0.
    """
    g2 = np.zeros(mask.shape)
    for ax in (0, 1):
        d = np.diff(values, axis=ax) / h
        ok = np.logical_and(np.take(mask, range(mask.shape[ax] - 1), axis=ax),
                            np.take(mask, range(1, mask.shape[ax]), axis=ax))
        d = np.where(ok[..., None], d, 0.0)
        pad_lo = [(0, 0)] * 3
        pad_hi = [(0, 0)] * 3
        pad_lo[ax] = (1, 0)
        pad_hi[ax] = (0, 1)
        fwd, okf = np.pad(d, pad_hi), np.pad(ok, pad_hi[:2])
        bwd, okb = np.pad(d, pad_lo), np.pad(ok, pad_lo[:2])
        cnt = np.maximum(okf.astype(int) + okb.astype(int), 1)
        g2 += ((fwd + bwd) ** 2).sum(-1) / cnt ** 2
    return np.sqrt(g2)


def tangency_residual(field: Field, domain: Domain, band=None, allowance: bool = False):
    """Max of ``|m' . nu|`` over inside nodes within ``band`` (default ``h``) of the boundary.

    With ``allowance`` the quantity ``|m'(x) . nu| - dist(x) |grad m'(x)|`` is
    used instead: an exactly tangent field can only drift off tangency by its
    own variation between the node and its closest boundary point (the
    gradient is taken as its maximum over the 3x3 node neighborhood).
    """
    grid = field.grid
    band = grid.h if band is None else band
    X, Y = grid.coords()
    X, Y = np.broadcast_arrays(X, Y)
    sd = domain.signed_distance(X, Y)
    sel = grid.mask & (sd > -band)
    if not sel.any():
        return 0.0
    s, _ = domain.project(X[sel], Y[sel])
    _, _, nu = domain.boundary(s)
    r = np.abs((field.values[..., :2][sel] * nu).sum(-1))
    if allowance:
        G = maximum_filter(_masked_gradient_norm(field.values[..., :2], grid.mask, grid.h), size=3)
        r = r - np.abs(sd[sel]) * G[sel]
    return float(max(r.max(), 0.0))


def reflect_extend(field: Field, domain: Domain, depth: float, tol: float | None = None) -> Field:
    """Extend a tangent field across the boundary by the mirror rule.

    Each exterior node ``y`` with ``0 <= dist(y, Omega) < depth`` receives
    ``S(s) m'(Phi(y))`` where ``w(s)`` is its closest boundary point and
    ``Phi(y)`` the mirror image inside.  Inside values are unchanged.  The
    returned field lives on the same lattice with the mask enlarged to the
    band.
    """
    grid = field.grid
    if not 0.0 < depth < domain.r_sec:
        raise OutsideSecurityRegion("extension depth must lie in (0, R_sec)")
    tol = 10.0 * grid.h if tol is None else tol
    res = tangency_residual(field, domain, allowance=True)
    if res > tol:
        raise TangencyViolation(f"|m'.nu| = {res:.3g} exceeds {tol:.3g} near the boundary")
    X, Y = grid.coords()
    X, Y = np.broadcast_arrays(X, Y)
    sd = domain.signed_distance(X, Y)
    band = (~grid.mask) & (sd < depth)
    vals = np.array(field.values[..., :2])
    if band.any():
        pts = np.stack([X[band], Y[band]], -1)
        img, s, _ = mirror_points(domain, pts)
        _, T, _ = domain.boundary(s)
        src = bilinear_inside(field.values[..., :2], grid, img[:, 0], img[:, 1])
        vals[band] = np.einsum("nij,nj->ni", reflection_matrix(T), src)
    ext = Grid(grid.nx, grid.ny, grid.h, grid.origin, grid.mask | band, grid.domain)
    return Field(ext, vals)


# ---------------------------------------------------------------------------
# detection
# ---------------------------------------------------------------------------


@dataclass
class Ball:
    center: tuple
    radius: float
    degree: int
    gl_enclosed: float
    location: str

    def to_dict(self):
        return {"center": [float(self.center[0]), float(self.center[1])], "radius": float(self.radius),
                "degree": int(self.degree), "gl_enclosed": float(self.gl_enclosed),
                "location": self.location}


@dataclass
class VortexReport:
    case: str
    r1: float | None
    r_star: float
    balls: list = dc_field(default_factory=list)
    diagnostics: dict = dc_field(default_factory=dict)

    def to_dict(self):
        return {"case": self.case, "r1": self.r1, "r_star": self.r_star,
                "balls": [b.to_dict() for b in self.balls]}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def good_radius_scan(field: Field, domain: Domain, eps: float, step: float | None = None):
    """Curve energies on ``d Omega_r`` for ``r`` in ``(1/(2|log eps|), 2/|log eps|)``."""
    L = abs(math.log(eps))
    lo, hi = 0.5 / L, 2.0 / L
    if hi >= domain.r_sec:
        raise OutsideSecurityRegion("scan interval exceeds the security region; eps too large")
    h = field.grid.h
    step = h if step is None else step
    n = max(3, int(math.floor((hi - lo) / step)))
    radii = lo + (hi - lo) * (np.arange(n) + 0.5) / n
    energies = np.array([gl_energy_on_curve(field, boundary_curve(domain, r, h), eps) for r in radii])
    return radii, energies


def good_radius(field: Field, domain: Domain, eps: float, step: float | None = None) -> float:
    """Offset radius whose curve carries the least GL line energy (at most ``|log eps|^3``)."""
    radii, energies = good_radius_scan(field, domain, eps, step)
    k = int(np.argmin(energies))
    if energies[k] > abs(math.log(eps)) ** 3:
        raise NoGoodRadius(f"minimal curve energy {energies[k]:.4g} exceeds |log eps|^3")
    return float(radii[k])


def _disk_region(center, r):
    cx, cy = center

    def inside(x, y):
        return (x - cx) ** 2 + (y - cy) ** 2 < r * r

    return inside


def _ball_degree(field, center, radius):
    try:
        return degree(field, circle(center, radius, field.grid.h))
    except (ModulusTooSmall, AmbiguousDegree, OutOfBounds):
        return None


def detect_vortices(field: Field, domain: Domain, params: Params, check_budget: bool = True) -> VortexReport:
    """Locate the vortex ball(s) of a tangent field with near-minimal GL energy.

    Follows the good-radius / degree / mirror-extension pipeline: an
    interior ball of radius ``r* = |log eps|^-3`` when the degree on the
    good curve is +-1, otherwise two boundary balls of radius ``10 r*``.
    """
    eps = params.eps
    L = abs(math.log(eps))
    r_star = L ** -3
    grid = field.grid
    total = gl_energy(field, eps=eps)
    budget = 2 * math.pi * (1 + params.alpha) * L
    if check_budget and total > budget:
        raise EnergyBudgetExceeded(f"GL energy {total:.4g} exceeds 2pi(1+alpha)|log eps| = {budget:.4g}")
    r1 = good_radius(field, domain, eps)
    curve = boundary_curve(domain, r1, grid.h)
    d = degree(field, curve)
    diag = {"gl_total": total, "degree_r1": d,
            "curve_energy": gl_energy_on_curve(field, curve, eps)}
    if abs(d) >= 2:
        raise DegreeOutOfRange(f"degree {d} on the good curve")
    X, Y = grid.coords()
    X, Y = np.broadcast_arrays(X, Y)
    mod = np.hypot(field.values[..., 0], field.values[..., 1])
    if abs(d) == 1:
        sd = domain.signed_distance(X, Y)
        cand = grid.mask & (sd < -r1)
        k = np.argmin(np.where(cand, mod, np.inf))
        c = (float(X.flat[k]), float(Y.flat[k]))
        e = gl_energy(field, eps=eps, region=_disk_region(c, r_star))
        ball = Ball(c, r_star, d, e, "interior")
        return VortexReport("interior-vortex", r1, r_star, [ball], diag)
    # degree zero: mirror-extend and look for two modulus minima in the band
    depth = min(r1 + 2 * grid.h, 0.95 * domain.r_sec)
    ext = reflect_extend(field, domain, depth)
    emod = np.hypot(ext.values[..., 0], ext.values[..., 1])
    sd = domain.signed_distance(X, Y)
    band = ext.grid.mask & (np.abs(sd) < r1)
    work = np.where(band, emod, np.inf)
    centers = []
    sep = 20.0 * r_star
    for _ in range(2):
        k = int(np.argmin(work))
        if not np.isfinite(work.flat[k]) or work.flat[k] >= 0.5:
            break
        p = (float(X.flat[k]), float(Y.flat[k]))
        centers.append(p)
        work = np.where((X - p[0]) ** 2 + (Y - p[1]) ** 2 < sep * sep, np.inf, work)
    if not centers:
        return VortexReport("none", r1, r_star, [], diag)
    if len(centers) == 1:
        centers.append(centers[0])
    balls = []
    for p in centers:
        s, _ = domain.project(np.array([p[0]]), np.array([p[1]]))
        w, _, _ = domain.boundary(s)
        c = (float(w[0, 0]), float(w[0, 1]))
        rad = 10.0 * r_star
        e = gl_energy(field, eps=eps, region=_disk_region(c, rad))
        dg = _ball_degree(ext, c, rad)
        balls.append(Ball(c, rad, 1 if dg is None else dg, e, "boundary"))
    return VortexReport("two-boundary-vortices", r1, r_star, balls, diag)


# ---------------------------------------------------------------------------
# cell grid and S1 projection
# ---------------------------------------------------------------------------


@dataclass
class Cell:
    """Square of ``n`` lattice steps with lower-left node ``(i0, j0)``."""

    i0: int
    j0: int
    n: int

    def boundary_nodes(self):
        """Counterclockwise node indices along the cell boundary (closed)."""
        i0, j0, n = self.i0, self.j0, self.n
        k = np.arange(n)
        ii = np.concatenate([i0 + k, np.full(n, i0 + n), i0 + n - k, np.full(n, i0)])
        jj = np.concatenate([np.full(n, j0), j0 + k, np.full(n, j0 + n), j0 + n - k])
        return np.append(ii, ii[0]), np.append(jj, jj[0])

    def contains_point(self, grid, p):
        x0 = grid.origin[0] + grid.h * self.i0
        y0 = grid.origin[1] + grid.h * self.j0
        s = grid.h * self.n
        return x0 <= p[0] <= x0 + s and y0 <= p[1] <= y0 + s


@dataclass
class CellGrid:
    shift: tuple
    cell_size: float
    n: int
    cells: list
    line_energy: tuple
    region: tuple
    region_energy: float
    candidates: int

    @property
    def line_energy_total(self):
        return float(sum(self.line_energy))


def _line_energies(g, inB, n, offsets, axis, h):
    """Energy on lattice lines ``index = offset (mod n)`` restricted to the ball."""
    dens = np.where(inB, g, 0.0).sum(axis=1 - axis) * h  # per line index
    idx = np.arange(dens.size)
    return np.array([dens[(idx - o) % n == 0].sum() for o in offsets])


def build_cell_grid(field: Field, region, params: Params, K: int = 16) -> CellGrid:
    """Net of lines at spacing ``eps^beta`` with the shift of least line energy.

    ``region`` is ``(center, radius)`` of a ball inside the domain.  Cells
    cover the concentric ball of half the radius.
    """
    (cx, cy), R = region
    grid = field.grid
    h = grid.h
    n = max(2, int(round(params.eps ** params.beta / h)))
    X, Y = grid.coords()
    inB = ((X - cx) ** 2 + (Y - cy) ** 2 < R * R) & grid.mask
    if not inB.any():
        raise InvalidParameter("region ball contains no inside nodes")
    g = gl_density(field.values[..., :2], h, params.eps)
    region_energy = float(np.where(inB, g, 0.0).sum()) * h * h
    offsets = sorted({int(round(k * n / K)) % n for k in range(K)})
    ex = _line_energies(g, inB, n, offsets, 0, h)  # vertical lines x = const
    ey = _line_energies(g, inB, n, offsets, 1, h)  # horizontal lines y = const
    ox = offsets[int(np.argmin(ex))]
    oy = offsets[int(np.argmin(ey))]
    # cells meeting the half-radius ball
    r2 = 0.5 * R
    fx = lambda x: (x - grid.origin[0]) / h
    fy = lambda y: (y - grid.origin[1]) / h
    i_lo = int(math.floor((fx(cx - r2) - ox) / n)) * n + ox
    i_hi = int(math.ceil((fx(cx + r2) - ox) / n)) * n + ox
    j_lo = int(math.floor((fy(cy - r2) - oy) / n)) * n + oy
    j_hi = int(math.ceil((fy(cy + r2) - oy) / n)) * n + oy
    cells = []
    for i0 in range(i_lo, i_hi, n):
        for j0 in range(j_lo, j_hi, n):
            xa, xb = grid.origin[0] + h * i0, grid.origin[0] + h * (i0 + n)
            ya, yb = grid.origin[1] + h * j0, grid.origin[1] + h * (j0 + n)
            qx, qy = min(max(cx, xa), xb), min(max(cy, ya), yb)
            if (qx - cx) ** 2 + (qy - cy) ** 2 >= r2 * r2:
                continue
            corners = [(xa, ya), (xb, ya), (xa, yb), (xb, yb)]
            if any((x - cx) ** 2 + (y - cy) ** 2 >= R * R for x, y in corners):
                raise InvalidParameter("cell size too large for the region")
            if i0 < 0 or j0 < 0 or i0 + n >= grid.nx or j0 + n >= grid.ny:
                raise InvalidParameter("cells leave the grid")
            cells.append(Cell(i0, j0, n))
    mod = np.hypot(field.values[..., 0], field.values[..., 1])
    for c in cells:
        ii, jj = c.boundary_nodes()
        if mod[ii, jj].min() <= 0.5 or not grid.mask[ii, jj].all():
            raise ModulusViolation("|m'| <= 1/2 on a grid line")
    return CellGrid((ox * h, oy * h), n * h, n, cells, (float(ey.min()), float(ex.min())),
                    ((cx, cy), R), region_energy, len(offsets))


def cell_degree_check(field: Field, cell: Cell, params: Params | None = None) -> int:
    """Degree of ``m'`` along the boundary nodes of one cell."""
    ii, jj = cell.boundary_nodes()
    return winding(field.values[ii, jj, :2])


def cell_energies(field: Field, cell: Cell, eps: float):
    """GL energy on the cell boundary and in the cell (diagnostics for the zero-degree cell criterion)."""
    h = field.grid.h
    i0, j0, n = cell.i0, cell.j0, cell.n
    g = gl_density(field.values[i0:i0 + n + 1, j0:j0 + n + 1, :2], h, eps)
    ii, jj = cell.boundary_nodes()
    edge = float(g[ii[:-1] - i0, jj[:-1] - j0].sum()) * h
    inner = float(g.sum()) * h * h
    return edge, inner


def _dirichlet_laplace(bvals, n):
    """Discrete harmonic extension on ``(n+1)^2`` nodes for a batch of cells.

    ``bvals`` has shape ``(m, n+1, n+1)`` with the boundary filled; interior
    values are replaced by the 5-point Dirichlet solution (DST-I solver).
    """
    U = np.array(bvals, dtype=float)
    rhs = np.zeros((U.shape[0], n - 1, n - 1))
    rhs[:, 0, :] -= U[:, 0, 1:-1]
    rhs[:, -1, :] -= U[:, -1, 1:-1]
    rhs[:, :, 0] -= U[:, 1:-1, 0]
    rhs[:, :, -1] -= U[:, 1:-1, -1]
    k = np.arange(1, n)
    lam = 2.0 * np.cos(np.pi * k / n) - 2.0
    denom = lam[:, None] + lam[None, :]
    R = sfft.dstn(rhs, type=1, axes=(1, 2))
    U[:, 1:-1, 1:-1] = sfft.idstn(R / denom, type=1, axes=(1, 2))
    return U


def _laplace_residual(U):
    r = (U[:, 2:, 1:-1] + U[:, :-2, 1:-1] + U[:, 1:-1, 2:] + U[:, 1:-1, :-2] - 4 * U[:, 1:-1, 1:-1])
    return float(np.abs(r).max()) if r.size else 0.0


def s1_project(field: Field, cell_grid: CellGrid, return_info: bool = False):
    """Replace ``m'`` in every cell by ``e^{i Phi}``, ``Phi`` the discrete
    harmonic extension of the lifted boundary phase.

    The result lives on the nodes covered by the cells (closed squares).
    With ``return_info`` a dict of per-cell Dirichlet-energy ratios and the
    solver residual is returned as well.
    """
    grid = field.grid
    n = cell_grid.n
    v = field.values[..., :2]
    out = np.zeros(grid.shape + (2,))
    covered = np.zeros(grid.shape, bool)
    batch = np.zeros((len(cell_grid.cells), n + 1, n + 1))
    for c_idx, cell in enumerate(cell_grid.cells):
        ii, jj = cell.boundary_nodes()
        b = v[ii, jj]
        d = winding(b)
        if d != 0:
            raise NonzeroDegreeCell(f"cell at ({cell.i0}, {cell.j0}) has degree {d}")
        phi = np.unwrap(np.arctan2(b[:, 1], b[:, 0]))
        if abs(phi[-1] - phi[0]) >= 0.1:
            raise LiftFailure("boundary phase does not close up")
        bv = batch[c_idx]
        bv[ii[:-1] - cell.i0, jj[:-1] - cell.j0] = phi[:-1]
    if cell_grid.cells:
        U = _dirichlet_laplace(batch, n)
        resid = _laplace_residual(U)
    else:
        U, resid = batch, 0.0
    ratios = []
    h = grid.h
    for c_idx, cell in enumerate(cell_grid.cells):
        Phi = U[c_idx]
        sl = (slice(cell.i0, cell.i0 + n + 1), slice(cell.j0, cell.j0 + n + 1))
        out[sl] = np.stack([np.cos(Phi), np.sin(Phi)], -1)
        covered[sl] = True
        if return_info:
            dir_in = float((np.diff(Phi, axis=0) ** 2).sum() + (np.diff(Phi, axis=1) ** 2).sum())
            ii, jj = cell.boundary_nodes()
            ph = Phi[ii - cell.i0, jj - cell.j0]
            dir_bd = float((np.diff(ph) ** 2).sum()) / h
            ratios.append(dir_in / (n * h * dir_bd) if dir_bd > 0 else 0.0)
    res = Field(Grid(grid.nx, grid.ny, grid.h, grid.origin, covered & grid.mask, grid.domain), out)
    if return_info:
        return res, {"residual": resid, "dirichlet_ratios": ratios}
    return res


def l2_distance_sq(a: Field, b: Field, mask=None) -> float:
    """``sum |a - b|^2 h^2`` over the nodes of ``mask`` (default: ``a``'s mask)."""
    m = a.grid.mask if mask is None else mask
    d = a.values[..., :2] - b.values[..., :2]
    return float((d[m] ** 2).sum()) * a.grid.h ** 2


def approximation_error(eps, eta, beta, center=(0.55, 0.0), radius=0.4, h=None, alpha=0.1, cap=None):
    """``||M' - m'||^2_{L2}`` on the stadium state over a ball away from the core."""
    params = Params(eps, eta, beta=beta, alpha=alpha)
    h = eps / 4.0 if h is None else h
    from .geometry import Stadium
    box = (center[0] - radius, center[0] + radius, center[1] - radius, center[1] + radius)
    grid = make_grid(Stadium(), h, margin=2 * h, cap=cap, box=box)
    f = C.stadium_landau_state(params, grid)
    f2 = Field(grid, f.values[..., :2])
    cg = build_cell_grid(f2, (center, radius), params)
    M, info = s1_project(f2, cg, return_info=True)
    dist = l2_distance_sq(M, f2)
    mod = np.hypot(M.values[..., 0], M.values[..., 1])[M.grid.mask]
    return {"eps": eps, "eta": eta, "beta": beta, "cell_size": cg.cell_size, "cells": len(cg.cells),
            "l2_sq": dist, "unit_err": float(np.abs(mod - 1).max()),
            "laplace_residual": info["residual"], "max_dirichlet_ratio": max(info["dirichlet_ratios"])}

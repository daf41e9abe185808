"""Domains, node-centered grids, offset curves and field storage.

Every boundary is parametrized counterclockwise by arclength ``s`` with unit
tangent ``T = dw/ds`` and outer normal ``nu = (T2, -T1)``.  Signed distances
are negative inside the domain.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.spatial import cKDTree

from .errors import InvalidParameter, OutOfBounds, OutsideSecurityRegion, ResourceLimit

DEFAULT_GRID_CAP = 20_000_000

__all__ = [
    "Domain", "Disk", "Square", "Stadium", "Cusp", "Corner",
    "Grid", "Field", "Curve",
    "make_domain", "make_grid", "boundary_curve", "interp", "bilinear",
    "DEFAULT_GRID_CAP",
]


def _as_xy(x, y=None):
    if y is None:
        p = np.asarray(x, dtype=float)
        return p[..., 0], p[..., 1]
    return np.asarray(x, dtype=float), np.asarray(y, dtype=float)


def _frame(T):
    """Outer normal from a counterclockwise unit tangent."""
    return np.stack([T[..., 1], -T[..., 0]], axis=-1)


class Domain:
    """Base class for analytic planar domains.

    Subclasses provide ``signed_distance``, ``boundary`` (position, tangent
    and normal at arclength ``s``), the total ``length``, the bounding box
    and the depth ``r_sec`` of the security region.
    """

    kind = "abstract"
    length: float = 0.0
    r_sec: float = 0.0

    def params(self) -> dict:
        raise NotImplementedError

    def bbox(self):
        raise NotImplementedError

    def signed_distance(self, x, y=None):
        raise NotImplementedError

    def contains(self, x, y=None):
        return self.signed_distance(x, y) < 0.0

    def boundary(self, s):
        raise NotImplementedError

    @property
    def diameter(self) -> float:
        # the longer bounding-box side: a lower bound that is exact for the
        # disk, the square sides and the stadium
        x0, x1, y0, y1 = self.bbox()
        return max(x1 - x0, y1 - y0)

    # -- closest-point projection ---------------------------------------
    def project(self, x, y=None):
        """Closest boundary arclength and signed distance for each point.

        Generic version: nearest of a dense boundary sample, then a
        golden-section search in the bracketing arclength interval and one
        Newton step on ``(w(s) - p) . T(s) = 0``.
        """
        px, py = _as_xy(x, y)
        shape = px.shape
        px, py = px.ravel(), py.ravel()
        n = max(4096, int(self.length / 1e-4) if self.length < 1 else 4096)
        n = min(n, 200_000)
        ss = np.linspace(0.0, self.length, n, endpoint=False)
        w, _, _ = self.boundary(ss)
        tree = cKDTree(w)
        _, k = tree.query(np.stack([px, py], axis=1))
        ds = self.length / n
        a = ss[k] - ds
        b = ss[k] + ds
        g = (math.sqrt(5.0) - 1.0) / 2.0

        def d2(s):
            ww, _, _ = self.boundary(np.mod(s, self.length))
            return (ww[:, 0] - px) ** 2 + (ww[:, 1] - py) ** 2

        c = b - g * (b - a)
        d = a + g * (b - a)
        fc, fd = d2(c), d2(d)
        for _ in range(60):
            left = fc < fd
            b = np.where(left, d, b)
            a = np.where(left, a, c)
            c = b - g * (b - a)
            d = a + g * (b - a)
            fc, fd = d2(c), d2(d)
        s = 0.5 * (a + b)
        # one Newton step on f(s) = (w - p) . T, derivative by differences
        e = 1e-7 * max(self.length, 1.0)

        def f(sv):
            ww, tt, _ = self.boundary(np.mod(sv, self.length))
            return (ww[:, 0] - px) * tt[:, 0] + (ww[:, 1] - py) * tt[:, 1]

        fs = f(s)
        fp = (f(s + e) - f(s - e)) / (2 * e)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(np.abs(fp) > 1e-3, fs / fp, 0.0)
        step = np.clip(step, -ds, ds)
        s_new = s - step
        better = d2(s_new) <= d2(s)
        s = np.mod(np.where(better, s_new, s), self.length)
        dist = np.sqrt(d2(s))
        sign = np.where(self.contains(px, py), -1.0, 1.0)
        return s.reshape(shape), (sign * dist).reshape(shape)

    def offset_points(self, r: float, resolution: float):
        """Vertices of the level curve at distance ``r`` inside (``r > 0``)."""
        curv = 1.0 / self.r_sec if self.r_sec > 0 else 0.0
        stretch = 1.0 + abs(r) * curv
        n = max(8, int(math.ceil(self.length * stretch / resolution)))
        s = np.linspace(0.0, self.length, n + 1)
        w, T, nu = self.boundary(s[:-1])
        pts = w - r * nu
        pts = np.vstack([pts, pts[:1]])
        T = np.vstack([T, T[:1]])
        nu = np.vstack([nu, nu[:1]])
        return pts, T, nu


@dataclass(frozen=True, eq=False)
class Disk(Domain):
    radius: float = 1.0
    center: tuple = (0.0, 0.0)
    kind = "disk"

    def __post_init__(self):
        if not self.radius > 0:
            raise InvalidParameter("disk radius must be positive")

    @property
    def length(self):
        return 2.0 * math.pi * self.radius

    @property
    def r_sec(self):
        return self.radius

    def params(self):
        return {"radius": self.radius, "center": list(self.center)}

    def bbox(self):
        cx, cy = self.center
        R = self.radius
        return cx - R, cx + R, cy - R, cy + R

    def signed_distance(self, x, y=None):
        px, py = _as_xy(x, y)
        return np.hypot(px - self.center[0], py - self.center[1]) - self.radius

    def boundary(self, s):
        s = np.asarray(s, dtype=float)
        a = s / self.radius
        c, sn = np.cos(a), np.sin(a)
        w = np.stack([self.center[0] + self.radius * c, self.center[1] + self.radius * sn], -1)
        T = np.stack([-sn, c], -1)
        return w, T, _frame(T)

    def project(self, x, y=None):
        px, py = _as_xy(x, y)
        dx, dy = px - self.center[0], py - self.center[1]
        a = np.mod(np.arctan2(dy, dx), 2 * math.pi)
        return a * self.radius, np.hypot(dx, dy) - self.radius


@dataclass(frozen=True, eq=False)
class Square(Domain):
    """Axis-aligned rectangle ``(-a, a) x (-b, b)``; a square when ``a == b``."""

    half: float = 1.0
    half_y: float | None = None
    kind = "square"

    def __post_init__(self):
        if not self.half > 0 or (self.half_y is not None and not self.half_y > 0):
            raise InvalidParameter("square half-sides must be positive")

    @property
    def a(self):
        return self.half

    @property
    def b(self):
        return self.half if self.half_y is None else self.half_y

    @property
    def length(self):
        return 4.0 * (self.a + self.b)

    @property
    def r_sec(self):
        return min(self.a, self.b)

    def params(self):
        p = {"half": self.half}
        if self.half_y is not None:
            p["half_y"] = self.half_y
        return p

    def bbox(self):
        return -self.a, self.a, -self.b, self.b

    def signed_distance(self, x, y=None):
        px, py = _as_xy(x, y)
        qx = np.abs(px) - self.a
        qy = np.abs(py) - self.b
        outside = np.hypot(np.maximum(qx, 0), np.maximum(qy, 0))
        inside = np.minimum(np.maximum(qx, qy), 0)
        return outside + inside

    def _segments(self):
        a, b = self.a, self.b
        # start, direction, length; counterclockwise from (-a, -b)
        return [((-a, -b), (1.0, 0.0), 2 * a), ((a, -b), (0.0, 1.0), 2 * b),
                ((a, b), (-1.0, 0.0), 2 * a), ((-a, b), (0.0, -1.0), 2 * b)]

    def boundary(self, s):
        s = np.mod(np.asarray(s, dtype=float), self.length)
        w = np.zeros(s.shape + (2,))
        T = np.zeros(s.shape + (2,))
        s0 = 0.0
        for (px, py), (tx, ty), L in self._segments():
            sel = (s >= s0) & (s < s0 + L)
            u = s[sel] - s0
            w[sel] = np.stack([px + tx * u, py + ty * u], -1)
            T[sel] = (tx, ty)
            s0 += L
        return w, T, _frame(T)

    def project(self, x, y=None):
        px, py = _as_xy(x, y)
        a, b = self.a, self.b
        sd = self.signed_distance(px, py)
        inside = sd < 0
        # distances to the four sides for interior points
        dist = np.stack([py + b, a - px, b - py, px + a], -1)
        side_in = np.argmin(dist, axis=-1)
        qx = np.clip(px, -a, a)
        qy = np.clip(py, -b, b)
        # exterior points: clamp; pick side from clamped location
        side_out = np.select(
            [(qy <= -b) & (qx < a), qx >= a, qy >= b],
            [0, 1, 2], default=3)
        side = np.where(inside, side_in, side_out)
        qx = np.where(inside & ((side == 1) | (side == 3)), np.where(side == 1, a, -a), qx)
        qy = np.where(inside & ((side == 0) | (side == 2)), np.where(side == 0, -b, b), qy)
        s = np.select([side == 0, side == 1, side == 2],
                      [qx + a, 2 * a + qy + b, 2 * a + 2 * b + a - qx],
                      default=4 * a + 2 * b + b - qy)
        return np.mod(s, self.length), sd

    def offset_points(self, r, resolution):
        if r >= 0:
            inner = Square(self.a - r, self.b - r)
            n = max(8, int(math.ceil(inner.length / resolution)))
            s = np.linspace(0, inner.length, n + 1)
            w, T, nu = inner.boundary(s[:-1])
            return (np.vstack([w, w[:1]]), np.vstack([T, T[:1]]), np.vstack([nu, nu[:1]]))
        # exterior offset: straight sides pushed out, corners rounded
        d = -r
        pts, Ts = [], []
        for (px, py), (tx, ty), L in self._segments():
            nx_, ny_ = ty, -tx
            n = max(2, int(math.ceil(L / resolution)))
            u = np.linspace(0, L, n, endpoint=False)
            pts.append(np.stack([px + tx * u + d * nx_, py + ty * u + d * ny_], -1))
            Ts.append(np.tile([tx, ty], (n, 1)))
            # quarter arc around the end corner
            cx, cy = px + tx * L, py + ty * L
            a0 = math.atan2(ny_, nx_)
            m = max(2, int(math.ceil(0.5 * math.pi * d / resolution)))
            ang = a0 + np.linspace(0, 0.5 * math.pi, m, endpoint=False)
            pts.append(np.stack([cx + d * np.cos(ang), cy + d * np.sin(ang)], -1))
            Ts.append(np.stack([-np.sin(ang), np.cos(ang)], -1))
        pts = np.vstack(pts)
        T = np.vstack(Ts)
        return np.vstack([pts, pts[:1]]), np.vstack([T, T[:1]]), _frame(np.vstack([T, T[:1]]))


@dataclass(frozen=True, eq=False)
class Stadium(Domain):
    """Square ``(-1,1)^2`` capped by unit half-disks at ``x1 = +-1``."""

    kind = "stadium"

    @property
    def length(self):
        return 4.0 + 2.0 * math.pi

    @property
    def r_sec(self):
        return 1.0

    def params(self):
        return {}

    def bbox(self):
        return -2.0, 2.0, -1.0, 1.0

    def signed_distance(self, x, y=None):
        px, py = _as_xy(x, y)
        qx = px - np.clip(px, -1.0, 1.0)
        return np.hypot(qx, py) - 1.0

    def boundary(self, s):
        s = np.mod(np.asarray(s, dtype=float), self.length)
        pi = math.pi
        w = np.zeros(s.shape + (2,))
        T = np.zeros(s.shape + (2,))
        bot = s < 2.0
        right = (s >= 2.0) & (s < 2.0 + pi)
        top = (s >= 2.0 + pi) & (s < 4.0 + pi)
        left = s >= 4.0 + pi
        w[bot] = np.stack([-1.0 + s[bot], -np.ones(bot.sum())], -1)
        T[bot] = (1.0, 0.0)
        a = -0.5 * pi + (s[right] - 2.0)
        w[right] = np.stack([1.0 + np.cos(a), np.sin(a)], -1)
        T[right] = np.stack([-np.sin(a), np.cos(a)], -1)
        w[top] = np.stack([1.0 - (s[top] - 2.0 - pi), np.ones(top.sum())], -1)
        T[top] = (-1.0, 0.0)
        a = 0.5 * pi + (s[left] - 4.0 - pi)
        w[left] = np.stack([-1.0 + np.cos(a), np.sin(a)], -1)
        T[left] = np.stack([-np.sin(a), np.cos(a)], -1)
        return w, T, _frame(T)

    def project(self, x, y=None):
        px, py = _as_xy(x, y)
        pi = math.pi
        cx = np.clip(px, -1.0, 1.0)
        dx, dy = px - cx, py
        a = np.arctan2(dy, dx)
        mid = np.abs(px) <= 1.0
        s_mid = np.where(dy < 0, px + 1.0, 2.0 + pi + (1.0 - px))
        s_right = 2.0 + (a + 0.5 * pi)
        s_left = 4.0 + pi + np.mod(a - 0.5 * pi, 2 * pi)
        s = np.where(mid, s_mid, np.where(px > 1.0, s_right, s_left))
        return np.mod(s, self.length), np.hypot(dx, dy) - 1.0


class _SampledBoundary(Domain):
    """Domains whose boundary is tabulated and inverted by interpolation."""

    def _build(self, pts):
        seg = np.hypot(*np.diff(pts, axis=0).T)
        self._s_tab = np.concatenate([[0.0], np.cumsum(seg)])
        self._pts = pts
        self._tree = cKDTree(pts)
        object.__setattr__(self, "_length", float(self._s_tab[-1]))

    @property
    def length(self):
        return self._length

    def boundary(self, s):
        s = np.mod(np.asarray(s, dtype=float), self.length)
        x = np.interp(s, self._s_tab, self._pts[:, 0])
        y = np.interp(s, self._s_tab, self._pts[:, 1])
        e = 1e-7 * self.length
        xp = np.interp(np.minimum(s + e, self.length), self._s_tab, self._pts[:, 0])
        yp = np.interp(np.minimum(s + e, self.length), self._s_tab, self._pts[:, 1])
        xm = np.interp(np.maximum(s - e, 0), self._s_tab, self._pts[:, 0])
        ym = np.interp(np.maximum(s - e, 0), self._s_tab, self._pts[:, 1])
        T = np.stack([xp - xm, yp - ym], -1)
        T /= np.linalg.norm(T, axis=-1, keepdims=True)
        return np.stack([x, y], -1), T, _frame(T)

    def signed_distance(self, x, y=None):
        px, py = _as_xy(x, y)
        d, _ = self._tree.query(np.stack([px.ravel(), py.ravel()], 1))
        d = d.reshape(px.shape)
        return np.where(self.contains(px, py), -d, d)


def cusp_gamma(r):
    """Half opening ``pi/2 - 1/log log(1/r)`` of the C1 cusp domain."""
    r = np.asarray(r, dtype=float)
    return 0.5 * math.pi - 1.0 / np.log(np.log(1.0 / r))


def cusp_dgamma(r):
    r = np.asarray(r, dtype=float)
    L = np.log(1.0 / r)
    return -1.0 / (r * L * np.log(L) ** 2)


class Cusp(_SampledBoundary):
    """``{0 < r < r_max, |theta| < gamma(r)}``; C1 with vertical tangent at 0."""

    kind = "cusp"

    def __init__(self, r_max: float = 1.0 / 20.0):
        if not (0.0 < r_max <= 1.0 / 20.0):
            raise InvalidParameter("cusp radius must lie in (0, 1/20]")
        self.r_max = float(r_max)
        r = np.unique(np.concatenate([
            np.geomspace(1e-14, r_max, 4000),
            np.linspace(0.0, r_max, 20001)[1:]]))
        g = cusp_gamma(r)
        lower = np.stack([r * np.cos(g), -r * np.sin(g)], -1)
        upper = lower[::-1] * np.array([1.0, -1.0])
        ga = float(cusp_gamma(r_max))
        ang = np.linspace(-ga, ga, 4001)[1:-1]
        arc = np.stack([r_max * np.cos(ang), r_max * np.sin(ang)], -1)
        pts = np.vstack([[[0.0, 0.0]], lower, arc, upper, [[0.0, 0.0]]])
        self._build(pts)

    r_sec = 0.0

    def params(self):
        return {"r_max": self.r_max}

    def bbox(self):
        return 0.0, self.r_max, -self.r_max, self.r_max

    def contains(self, x, y=None):
        px, py = _as_xy(x, y)
        r = np.hypot(px, py)
        th = np.arctan2(py, px)
        with np.errstate(divide="ignore", invalid="ignore"):
            g = np.where((r > 0) & (r < self.r_max), cusp_gamma(np.clip(r, 1e-300, 0.3)), -1.0)
        return (r > 0) & (r < self.r_max) & (np.abs(th) < g)


class Corner(_SampledBoundary):
    """Sector ``{|x| < radius, |arg x - pi/2| < alpha/2}`` of opening ``alpha``."""

    kind = "corner"
    r_sec = 0.0

    def __init__(self, alpha: float = 0.5 * math.pi, radius: float = 1.0):
        if not (0.0 < alpha <= math.pi):
            raise InvalidParameter("corner opening must lie in (0, pi]")
        if not radius > 0:
            raise InvalidParameter("corner radius must be positive")
        self.alpha = float(alpha)
        self.radius = float(radius)
        h = 0.5 * self.alpha
        e = np.array([math.sin(h), math.cos(h)])
        t = np.linspace(0, 1, 4001)[:, None]
        right = t * e * radius
        ang = 0.5 * math.pi - h + np.linspace(0, self.alpha, 8001)[1:-1]
        arc = radius * np.stack([np.cos(ang), np.sin(ang)], -1)
        left = right[::-1] * np.array([-1.0, 1.0])
        self._build(np.vstack([right, arc, left]))

    def params(self):
        return {"alpha": self.alpha, "radius": self.radius}

    def bbox(self):
        h = 0.5 * self.alpha
        xr = self.radius * (math.sin(h) if h < 0.5 * math.pi else 1.0)
        y0 = min(0.0, self.radius * math.cos(h))
        return -xr, xr, y0, self.radius

    def signed_distance(self, x, y=None):
        # exact sector distance
        px, py = _as_xy(x, y)
        h = 0.5 * self.alpha
        cx, cy = math.sin(h), math.cos(h)
        ax = np.abs(px)
        l = np.hypot(ax, py) - self.radius
        k = np.clip(ax * cx + py * cy, 0.0, self.radius)
        m = np.hypot(ax - cx * k, py - cy * k)
        side = np.sign(cy * ax - cx * py)
        return np.maximum(l, m * side)


_KINDS = {"disk": Disk, "square": Square, "stadium": Stadium, "cusp": Cusp, "corner": Corner}


def make_domain(kind: str, **params) -> Domain:
    """Build a domain by name: ``stadium``, ``disk``, ``square``, ``cusp``, ``corner``."""
    if kind not in _KINDS:
        raise InvalidParameter(f"unknown domain kind {kind!r}")
    if kind == "disk" and "center" in params:
        params = dict(params, center=tuple(params["center"]))
    try:
        return _KINDS[kind](**params)
    except TypeError as exc:
        raise InvalidParameter(str(exc)) from exc


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform node-centered lattice with an inside mask.

    Node ``(i, j)`` sits at ``origin + h * (i, j)``; arrays are indexed
    ``[i, j]`` with ``i`` along ``x1``.
    """

    nx: int
    ny: int
    h: float
    origin: tuple
    mask: np.ndarray = dc_field(repr=False)
    domain: Domain | None = None

    def __post_init__(self):
        if not self.h > 0:
            raise InvalidParameter("grid spacing must be positive")
        if self.nx < 2 or self.ny < 2:
            raise InvalidParameter("grid needs at least 2 nodes per axis")
        m = np.asarray(self.mask, dtype=bool)
        if m.shape != (self.nx, self.ny):
            raise InvalidParameter("mask shape does not match grid")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "mask", m)

    @classmethod
    def from_domain(cls, domain, h, nx, ny, origin):
        x = origin[0] + h * np.arange(nx)
        y = origin[1] + h * np.arange(ny)
        mask = domain.contains(x[:, None], y[None, :])
        return cls(nx, ny, float(h), (float(origin[0]), float(origin[1])), mask, domain)

    @property
    def x(self):
        return self.origin[0] + self.h * np.arange(self.nx)

    @property
    def y(self):
        return self.origin[1] + self.h * np.arange(self.ny)

    @property
    def shape(self):
        return (self.nx, self.ny)

    def coords(self):
        """Broadcastable coordinate arrays ``(X[:, None], Y[None, :])``."""
        return self.x[:, None], self.y[None, :]

    def restrict(self, keep):
        """Same lattice with the mask intersected by ``keep``."""
        return Grid(self.nx, self.ny, self.h, self.origin, self.mask & np.asarray(keep, bool), self.domain)

    def shifted(self, dx, dy):
        """Translate lattice and domain-free mask by a vector (for invariance checks)."""
        return Grid(self.nx, self.ny, self.h, (self.origin[0] + dx, self.origin[1] + dy), self.mask, None)


def make_grid(domain: Domain, h: float, margin: float = 0.0, cap: int | None = None,
              anchor=None, box=None) -> Grid:
    """Grid of cells of size ``h`` tiling the inflated bounding box, nodes at cell centers.

    With ``anchor`` given, the lattice is shifted (by less than ``h``) so that
    the anchor point is a cell corner, which keeps the node pattern around a
    singular point identical across resolutions.  ``box = (x0, x1, y0, y1)``
    replaces the domain's bounding box (a window onto part of the domain).
    """
    if not (h > 0) or not math.isfinite(h):
        raise InvalidParameter("h must be positive")
    if margin < 0:
        raise InvalidParameter("margin must be nonnegative")
    cap = DEFAULT_GRID_CAP if cap is None else int(cap)
    x0, x1, y0, y1 = domain.bbox() if box is None else box
    x0, x1, y0, y1 = x0 - margin, x1 + margin, y0 - margin, y1 + margin
    nx = max(2, int(math.ceil((x1 - x0) / h - 1e-9)))
    ny = max(2, int(math.ceil((y1 - y0) / h - 1e-9)))
    if nx * ny > cap:
        raise ResourceLimit(f"grid {nx}x{ny} exceeds cap {cap}")
    ox = 0.5 * (x0 + x1) - 0.5 * (nx - 1) * h
    oy = 0.5 * (y0 + y1) - 0.5 * (ny - 1) * h
    if anchor is not None:
        nx, ny = nx + 1, ny + 1
        ox -= 0.5 * h
        oy -= 0.5 * h
        ox = anchor[0] + h * (math.floor((ox - anchor[0]) / h) + 0.5)
        oy = anchor[1] + h * (math.floor((oy - anchor[1]) / h) + 0.5)
        if nx * ny > cap:
            raise ResourceLimit(f"grid {nx}x{ny} exceeds cap {cap}")
    return Grid.from_domain(domain, h, nx, ny, (ox, oy))


# ---------------------------------------------------------------------------
# fields and interpolation
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Field:
    """Node values of a 2- or 3-component magnetization, zero outside the mask."""

    grid: Grid
    values: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 3 or v.shape[:2] != self.grid.shape or v.shape[2] not in (2, 3):
            raise InvalidParameter(f"field values must have shape (nx, ny, 2|3), got {v.shape}")
        v[~self.grid.mask] = 0.0
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def ncomp(self):
        return self.values.shape[2]

    @property
    def inplane(self):
        return self.values[..., :2]

    def with_values(self, values, grid=None):
        return Field(grid or self.grid, values)


def bilinear(values, grid: Grid, px, py):
    """Bilinear interpolation of node arrays ``values[i, j, ...]`` at points."""
    px = np.asarray(px, dtype=float)
    py = np.asarray(py, dtype=float)
    fx = (px - grid.origin[0]) / grid.h
    fy = (py - grid.origin[1]) / grid.h
    tol = 1e-9
    if np.any(fx < -tol) or np.any(fx > grid.nx - 1 + tol) or np.any(fy < -tol) or np.any(fy > grid.ny - 1 + tol):
        raise OutOfBounds("interpolation point outside grid bounding box")
    i = np.clip(np.floor(fx).astype(int), 0, grid.nx - 2)
    j = np.clip(np.floor(fy).astype(int), 0, grid.ny - 2)
    tx = np.clip(fx - i, 0.0, 1.0)
    ty = np.clip(fy - j, 0.0, 1.0)
    extra = (slice(None),) * 0
    v00 = values[i, j]
    v10 = values[i + 1, j]
    v01 = values[i, j + 1]
    v11 = values[i + 1, j + 1]
    if v00.ndim > tx.ndim:
        tx = tx[..., None]
        ty = ty[..., None]
    del extra
    return (v00 * (1 - tx) * (1 - ty) + v10 * tx * (1 - ty)
            + v01 * (1 - tx) * ty + v11 * tx * ty)


def bilinear_inside(values, grid: Grid, px, py):
    """Bilinear interpolation using inside nodes only, weights renormalized.

    Near the boundary this avoids the artificial drop in modulus caused by
    the zero exterior values.  Points with no inside neighbor get zero.
    """
    px = np.asarray(px, dtype=float)
    py = np.asarray(py, dtype=float)
    w = bilinear(grid.mask.astype(float), grid, px, py)
    v = bilinear(values, grid, px, py)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(w > 1e-12, 1.0 / w, 0.0)
    return v * scale[..., None] if v.ndim > scale.ndim else v * scale


def interp(field: Field, point):
    """Bilinear value of ``field`` at ``point`` (shape ``(..., 2)``)."""
    p = np.asarray(point, dtype=float)
    return bilinear(field.values, field.grid, p[..., 0], p[..., 1])


# ---------------------------------------------------------------------------
# curves
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Curve:
    """Closed polyline (first vertex repeated at the end) with frame data."""

    points: np.ndarray
    tangents: np.ndarray
    normals: np.ndarray
    r: float = 0.0

    @property
    def length(self):
        return float(np.hypot(*np.diff(self.points, axis=0).T).sum())

    @property
    def spacing(self):
        return np.hypot(*np.diff(self.points, axis=0).T)


def boundary_curve(domain: Domain, r: float, resolution: float) -> Curve:
    """Level curve ``w(s) - r nu(s)`` sampled at steps no longer than ``resolution``."""
    if not resolution > 0:
        raise InvalidParameter("resolution must be positive")
    if r != 0 and abs(r) >= domain.r_sec:
        raise OutsideSecurityRegion(f"|r| = {abs(r)} is not below R_sec = {domain.r_sec}")
    pts, T, nu = domain.offset_points(float(r), float(resolution))
    return Curve(pts, T, nu, float(r))

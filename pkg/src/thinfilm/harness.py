"""Sweeps, scaling fits and the tangency-divergence experiment.

Every experiment is deterministic.  Sweep points may run in a thread pool,
but rows are emitted in the order of the spec.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field as dc_field

import numpy as np

from . import constructions as C
from .energy import (EnergyReport, Params, exchange_energy, gl_energy, penalty_energy,
                     seminorm_h12_1d, stray_energy)
from .errors import DegenerateAbscissa, InvalidSpec, ThinFilmError
from .geometry import Corner, Disk, Field, Grid, Stadium, make_domain, make_grid

EXPERIMENTS = ("vortex-scaling", "corner-scaling", "wall-scaling", "stadium-bound",
               "tangency-divergence", "detect", "approx")


# ---------------------------------------------------------------------------
# fits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r2: float
    target: float | None
    rel_err: float | None
    model: str = "log"

    def to_dict(self):
        return asdict(self)


MODELS = {
    "log": lambda x: abs(math.log(x)),  # E = a |log eps| + b
    "wall": lambda x: 1.0 / (x * abs(math.log(x))),  # E = a / (eta |log eta|) + b
}


def fit_scaling(points, model: str = "log", target: float | None = None) -> FitResult:
    """Ordinary least squares of ``E`` against the transformed abscissa.

    ``points`` is a sequence of ``(parameter, E)`` pairs; ``model`` is
    ``"log"`` (abscissa ``|log eps|``) or ``"wall"`` (``1/(eta |log eta|)``).
    """
    if model not in MODELS:
        raise InvalidSpec(f"unknown model {model!r}")
    pts = list(points)
    if len(pts) < 3:
        raise InvalidSpec("a fit needs at least 3 points")
    x = np.array([MODELS[model](float(p)) for p, _ in pts])
    y = np.array([float(e) for _, e in pts])
    if np.ptp(x) <= 1e-14 * max(1.0, np.abs(x).max()):
        raise DegenerateAbscissa("all abscissae coincide")
    A = np.vstack([x, np.ones_like(x)]).T
    (a, b), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (a * x + b)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot == 0 else max(0.0, min(1.0, 1.0 - float((resid ** 2).sum()) / ss_tot))
    rel = None if target is None else abs(a - target) / abs(target)
    return FitResult(float(a), float(b), r2, target, rel, model)


# ---------------------------------------------------------------------------
# single experiments
# ---------------------------------------------------------------------------


def energy_report(field: Field, params: Params, pad: float = 2.0, cap=None,
                  scheme: str = "zero-extension") -> EnergyReport:
    """Energy report for 2- or 3-component fields (penalty 0 for in-plane fields)."""
    grid = field.grid
    ex = exchange_energy(field)
    pen = penalty_energy(field, eps=params.eps) if field.ncomp == 3 else 0.0
    st, res = stray_energy(field, params.eta, pad=pad, cap=cap, scheme=scheme)
    gl = gl_energy(field, eps=params.eps)
    return EnergyReport(ex, pen, st, gl, ex + pen + st, res, params.eps, params.eta, grid.h)


def vortex_point(eps, eta=0.05, h_factor=0.25, margin=0.5, cap=None):
    """Interior vortex at the center of the unit disk."""
    grid = make_grid(Disk(), eps * h_factor, margin=margin, cap=cap)
    f = C.interior_vortex(eps, (0.0, 0.0), grid)
    return energy_report(f, Params(eps, eta), cap=cap)


def corner_point(eps, alpha_c, eta=0.05, h_factor=0.25, margin=0.0, cap=None):
    """Radial corner vortex; the apex is kept at a cell corner for every eps."""
    grid = make_grid(Corner(alpha_c), eps * h_factor, margin=margin, cap=cap, anchor=(0.0, 0.0))
    f = C.corner_vortex(eps, grid)
    ex = exchange_energy(f)
    gl = gl_energy(f, eps=eps)
    return EnergyReport(ex, 0.0, 0.0, gl, ex, 0.0, eps, eta, grid.h)


def wall_point(eta):
    """Seminorm and exchange of the Neel wall with ``lam = eta |log eta|``."""
    lam = eta * abs(math.log(eta))
    prof = C.neel_wall_profile(lam)
    semi = seminorm_h12_1d(prof.u, prof.h)
    exch = prof.exchange()
    return {"eta": eta, "lam": lam, "seminorm": semi,
            "seminorm_ratio": semi / (math.pi / abs(math.log(eta))),
            "exchange": exch, "exchange_scaled": exch * lam * abs(math.log(lam))}


def stadium_bound(eps, eta, h_fine=None, h_coarse=2.5e-3, patch_radius=0.15,
                  margin=1.0, cap=None, pad=2.0, scheme="zero-extension"):
    """Energy of the stadium Landau state with a fine patch around the core.

    The local terms are split along ``|x| = patch_radius``: inside, a patch
    grid of spacing ``h_fine`` (default ``eps/4``) resolves the Bloch line;
    outside, the coarse grid of spacing ``h_coarse`` is used.  The stray
    term comes from the coarse grid alone, since the field is
    divergence-free on the patch (core and ``omega1`` are rotations of
    ``x^perp/|x|``).

    ``cap`` limits the nodes of each field grid; the zero-padded stray
    transform (twice the grid per axis) is allowed four times that.
    """
    params = Params(eps, eta)
    h_fine = eps / 4.0 if h_fine is None else h_fine
    dom = Stadium()
    R = patch_radius

    def inside_patch(x, y):
        return x * x + y * y < R * R

    def outside_patch(x, y):
        return x * x + y * y >= R * R

    coarse = make_grid(dom, h_coarse, margin=margin, cap=cap)
    fc = C.stadium_landau_state(params, coarse, check_resolution=False)
    fft_cap = None if cap is None else int(pad * pad * cap)
    stray, residual = stray_energy(fc, eta, pad=pad, cap=fft_cap, scheme=scheme)
    ex = exchange_energy(fc, region=outside_patch)
    pen = penalty_energy(fc, eps=eps, region=outside_patch)
    gl = gl_energy(fc, eps=eps, region=outside_patch)
    del fc
    fine = make_grid(dom, h_fine, margin=2 * h_fine, cap=cap, anchor=(0.0, 0.0), box=(-R, R, -R, R))
    ff = C.stadium_landau_state(params, fine, check_resolution=True)
    ex += exchange_energy(ff, region=inside_patch)
    pen += penalty_energy(ff, eps=eps, region=inside_patch)
    gl += gl_energy(ff, eps=eps, region=inside_patch)
    return EnergyReport(ex, pen, stray, gl, ex + pen + stray, residual, eps, eta, h_fine)


def _constant_field(grid):
    v = np.zeros(grid.shape + (2,))
    v[..., 0] = 1.0
    return Field(grid, v)


def _tilted_vortex(grid, tilt=0.3, eps=0.05):
    """Tangent vortex on the unit disk with a radial tilt vanishing on the circle.

    ``m' = f(r/eps) (cos(b) e_theta + sin(b) e_r)`` with
    ``sin b = tilt * r (1 - r^2)``: tangent at ``r = 1`` but carrying bulk
    charge, so its stray energy has a finite nonzero limit.
    """
    X, Y = grid.coords()
    r = np.hypot(X, Y)
    with np.errstate(divide="ignore", invalid="ignore"):
        er = np.stack(np.broadcast_arrays(np.where(r > 0, X / r, 0), np.where(r > 0, Y / r, 0)), -1)
    et = np.stack([-er[..., 1], er[..., 0]], -1)
    sb = tilt * r * (1 - r * r)
    cb = np.sqrt(np.clip(1 - sb * sb, 0.0, 1.0))
    f = C.smoothstep5(r / eps)
    v = f[..., None] * (cb[..., None] * et + sb[..., None] * er)
    return Field(grid, v)


def _pure_vortex(grid, eps=0.05):
    X, Y = grid.coords()
    r = np.hypot(X, Y)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(r > 0, C.smoothstep5(r / eps) / r, 0.0)
    return Field(grid, np.stack(np.broadcast_arrays(-Y * s, X * s), -1))


def tangency_divergence(h_list, eta=1.0, margin=0.5, cap=None, tilt=0.3, scheme="zero-extension"):
    """Stray energy under refinement for a non-tangent and a tangent field.

    (a) the constant field ``(1, 0)`` on the unit disk; (b) a regularized
    tangent vortex with a small radial tilt.  The divergence-free vortex is
    reported as well for reference.
    """
    hs = [float(h) for h in h_list]
    if len(hs) < 3:
        raise InvalidSpec("need at least 3 grid spacings")
    for a, b in zip(hs, hs[1:]):
        if abs(b - 0.5 * a) > 1e-12 * a:
            raise InvalidSpec("each spacing must halve the previous one")
    rows = []
    for h in hs:
        grid = make_grid(Disk(), h, margin=margin, cap=cap)
        a, _ = stray_energy(_constant_field(grid), eta, cap=cap, scheme=scheme)
        b, res = stray_energy(_tilted_vortex(grid, tilt), eta, cap=cap, scheme=scheme)
        c, _ = stray_energy(_pure_vortex(grid), eta, cap=cap, scheme=scheme)
        rows.append({"h": h, "constant": a, "tangent": b, "tangent_residual": res,
                     "divergence_free_vortex": c})
    ra = [rows[k + 1]["constant"] / rows[k]["constant"] for k in range(len(rows) - 1)]
    rb = [rows[k + 1]["tangent"] / rows[k]["tangent"] for k in range(len(rows) - 1)]
    return {"h": hs, "rows": rows, "ratios_constant": ra, "ratios_tangent": rb,
            "constant_diverges": all(r >= 1.05 for r in ra),
            "tangent_bounded": abs(rb[-1] - 1.0) <= 0.02}


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------


def _monotone(xs):
    return all(b > a for a, b in zip(xs, xs[1:])) or all(b < a for a, b in zip(xs, xs[1:]))


@dataclass
class SweepSpec:
    experiment: str
    eps: list = dc_field(default_factory=list)
    eta: list = dc_field(default_factory=list)
    h: list = dc_field(default_factory=list)
    alpha_c: list = dc_field(default_factory=list)
    beta: list = dc_field(default_factory=list)
    h_factor: float = 0.25
    grid_cap: int | None = None
    out: str | None = None
    options: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise InvalidSpec(f"unknown experiment {self.experiment!r}")
        need = {
            "vortex-scaling": ["eps"], "corner-scaling": ["eps", "alpha_c"],
            "wall-scaling": ["eta"], "stadium-bound": ["eps", "eta"],
            "tangency-divergence": ["h"], "detect": ["eps"], "approx": ["eps", "eta", "beta"],
        }[self.experiment]
        for name in ("eps", "eta", "h", "alpha_c", "beta"):
            xs = [float(x) for x in getattr(self, name)]
            setattr(self, name, xs)
            if name in need and not xs:
                raise InvalidSpec(f"parameter list {name!r} is empty")
            if xs and not _monotone(xs) and len(xs) > 1:
                raise InvalidSpec(f"parameter list {name!r} must be strictly monotone")
        if self.experiment in ("vortex-scaling", "corner-scaling"):
            e = self.eps
            if len(e) < 3 or max(e) / min(e) < 10.0 * (1 - 1e-12):
                raise InvalidSpec("log fits need >= 3 eps values spanning a decade")
        if self.experiment == "tangency-divergence" and len(self.h) < 3:
            raise InvalidSpec("need at least 3 grid spacings")

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if "experiment" not in d:
            raise InvalidSpec("spec needs an 'experiment' field")
        known = {f for f in cls.__dataclass_fields__}
        opts = {k: v for k, v in d.items() if k not in known}
        base = {k: v for k, v in d.items() if k in known}
        base.setdefault("options", {}).update(opts)
        try:
            return cls(**base)
        except TypeError as exc:
            raise InvalidSpec(str(exc)) from exc

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            try:
                return cls.from_dict(json.load(fh))
            except json.JSONDecodeError as exc:
                raise InvalidSpec(f"bad JSON: {exc}") from exc

    def points(self):
        """Deterministic list of parameter dicts in emission order."""
        eta0 = self.eta[0] if self.eta else 0.05
        ex = self.experiment
        if ex == "vortex-scaling":
            return [{"eps": e, "eta": eta0} for e in self.eps]
        if ex == "corner-scaling":
            return [{"eps": e, "alpha_c": a, "eta": eta0} for a in self.alpha_c for e in self.eps]
        if ex == "wall-scaling":
            return [{"eta": n} for n in self.eta]
        if ex == "stadium-bound":
            return [{"eps": e, "eta": n} for n in self.eta for e in self.eps]
        if ex == "tangency-divergence":
            return [{"h": self.h}]
        if ex == "detect":
            return [{"eps": e} for e in self.eps]
        return [{"eps": e, "eta": n, "beta": b} for n in self.eta for e in self.eps for b in self.beta]


def _evaluate(spec: SweepSpec, p: dict):
    ex = spec.experiment
    cap = spec.grid_cap
    if ex == "vortex-scaling":
        return vortex_point(p["eps"], p["eta"], spec.h_factor, cap=cap).to_dict()
    if ex == "corner-scaling":
        return corner_point(p["eps"], p["alpha_c"], p["eta"], spec.h_factor, cap=cap).to_dict()
    if ex == "wall-scaling":
        return wall_point(p["eta"])
    if ex == "stadium-bound":
        rep = stadium_bound(p["eps"], p["eta"], cap=cap, **spec.options).to_dict()
        rep["stray_target"] = 2 * math.pi / (p["eta"] * abs(math.log(p["eta"])))
        rep["excess"] = rep["total"] - 2 * math.pi * abs(math.log(p["eps"]))
        return rep
    if ex == "tangency-divergence":
        rep = tangency_divergence(p["h"], cap=cap, **spec.options)
        return {"ratios_constant": json.dumps(rep["ratios_constant"]),
                "ratios_tangent": json.dumps(rep["ratios_tangent"]),
                "constant_diverges": rep["constant_diverges"],
                "tangent_bounded": rep["tangent_bounded"]}
    if ex == "detect":
        from .topology import detect_vortices
        grid = make_grid(Disk(), p["eps"] * spec.options.get("h_factor", 0.5), cap=cap)
        f = C.interior_vortex(p["eps"], (0.0, 0.0), grid)
        rep = detect_vortices(Field(grid, f.values[..., :2]), grid.domain, Params(p["eps"]))
        return {"case": rep.case, "r1": rep.r1, "r_star": rep.r_star,
                "balls": json.dumps([b.to_dict() for b in rep.balls])}
    from .topology import approximation_error
    return approximation_error(p["eps"], p["eta"], p["beta"], cap=cap, **spec.options)


def _safe_evaluate(spec, p):
    try:
        return _evaluate(spec, p)
    except ThinFilmError as exc:
        return {"error": exc.code, "message": str(exc)}
    except MemoryError as exc:
        return {"error": "resource-limit", "message": str(exc)}


FIT_TARGETS = {"vortex-scaling": ("log", "gl", lambda p: 2 * math.pi),
               "corner-scaling": ("log", "gl", lambda p: p["alpha_c"])}


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


def run_sweep(spec: SweepSpec, workers: int = 1, out=None):
    """Evaluate every point of ``spec``; rows are written to ``out`` in order.

    Returns a list of ``(params, result)`` pairs where ``result`` is a dict
    (an :class:`EnergyReport` dict, a detection summary, or an error entry).
    Scaling experiments get extra ``fit`` rows with slope, intercept, r2 and
    relative error against the predicted coefficient.
    """
    pts = spec.points()
    out = out or spec.out
    results = []
    writer = None
    fh = None
    header = None
    try:
        if out is not None:
            fh = open(out, "w", newline="") if isinstance(out, str) else out
        with ThreadPoolExecutor(max_workers=max(1, int(workers))) as pool:
            for p, r in zip(pts, pool.map(lambda q: _safe_evaluate(spec, q), pts)):
                results.append((p, r))
                if fh is not None:
                    row = {"experiment": spec.experiment, **p, **r}
                    if header is None:
                        header = list(row)
                        writer = csv.writer(fh)
                        writer.writerow(header + ["error", "message"] if "error" not in header else header)
                    if "error" in row and "error" not in header:
                        vals = [_fmt(row.get(k, "")) for k in header] + [row["error"], row["message"]]
                    else:
                        vals = [_fmt(row.get(k, "")) for k in header]
                        if "error" not in header:
                            vals += ["", ""]
                    writer.writerow(vals)
                    fh.flush()
        for fit in sweep_fits(spec, results):
            results.append(({"fit": fit["group"]}, fit))
            if fh is not None and writer is not None:
                writer.writerow(["fit:" + json.dumps(fit, sort_keys=True)])
    finally:
        if fh is not None and isinstance(out, str):
            fh.close()
    return results


def sweep_fits(spec, results):
    """Least-squares fits for scaling experiments (one per ``alpha_c`` group)."""
    if spec.experiment not in FIT_TARGETS:
        return []
    model, key, target = FIT_TARGETS[spec.experiment]
    groups = {}
    for p, r in results:
        if "error" in r:
            continue
        g = p.get("alpha_c", None)
        groups.setdefault(g, []).append((p, r))
    fits = []
    for g, rows in groups.items():
        if len(rows) < 3:
            continue
        res = fit_scaling([(p["eps"], r[key]) for p, r in rows], model, target(rows[0][0]))
        fits.append({"group": g, **res.to_dict()})
    return fits


def read_sweep_csv(path):
    """Parse a sweep CSV back into row dicts (fit rows are skipped)."""
    rows = []
    with open(path, newline="") as fh:
        rd = csv.reader(fh)
        header = next(rd)
        for rec in rd:
            if rec and rec[0].startswith("fit:"):
                continue
            d = {}
            for k, v in zip(header, rec):
                try:
                    d[k] = float(v)
                except ValueError:
                    d[k] = v
            rows.append(d)
    return rows


def fit_csv(path, model="log", key=None, param=None, target=None):
    """Fit the rows of a sweep CSV; the abscissa column defaults to ``eps``/``eta``."""
    rows = [r for r in read_sweep_csv(path) if not r.get("error")]
    param = param or ("eps" if model == "log" else "eta")
    key = key or ("gl" if model == "log" else "stray")
    return fit_scaling([(r[param], r[key]) for r in rows], model, target)


def dumps(obj):
    """Stable JSON text (sorted keys) for byte-identical outputs."""
    buf = io.StringIO()
    json.dump(obj, buf, sort_keys=True, indent=2)
    return buf.getvalue() + "\n"

"""Command line entry point.

    thinfilm build    --kind interior-vortex --eps 0.01 --out v.field
    thinfilm energy   v.field --out report.json
    thinfilm detect   v.field
    thinfilm sweep    --config spec.json --out sweep.csv --workers 2
    thinfilm fit      sweep.csv
    thinfilm appendix --h 0.015625 0.0078125 0.00390625

Exit status: 0 on success, 2 for invalid input, 3 when a resource limit is hit,
1 for any other library error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

from . import constructions as C
from . import harness
from .energy import Params
from .errors import InvalidParameter, InvalidSpec, ResourceLimit, ThinFilmError
from .fieldio import read_field, write_field
from .geometry import Corner, Cusp, Disk, Field, Stadium, make_grid

BUILD_KINDS = ("interior-vortex", "corner-vortex", "cusp-vortex", "stadium", "dipole", "onion")


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_config(path):
    if not path:
        return {}
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, ValueError) as exc:
        raise InvalidSpec(f"cannot read config {path}: {exc}") from exc


def build_field(kind, eps, eta=0.05, h=None, beta=0.5, alpha=0.25, center=(0.0, 0.0),
                alpha_c=math.pi / 2, cap=None):
    """Construct one of the named configurations; returns ``(field, header_params)``.

    Disk and stadium grids get a margin of a quarter diameter so the stray
    field and the mirror extension have room outside the domain.
    """
    h = eps / 4.0 if h is None else h
    if kind == "interior-vortex":
        f = C.interior_vortex(eps, tuple(center), make_grid(Disk(), h, margin=0.5, cap=cap))
    elif kind == "corner-vortex":
        f = C.corner_vortex(eps, make_grid(Corner(alpha_c), h, cap=cap, anchor=(0.0, 0.0)))
    elif kind == "cusp-vortex":
        f = C.boundary_vortex_cusp(eps, make_grid(Cusp(1.0 / 200), h, cap=cap))
    elif kind == "stadium":
        p = Params(eps, eta, beta=beta, alpha=alpha)
        f = C.stadium_landau_state(p, make_grid(Stadium(), h, margin=1.0, cap=cap))
    elif kind == "dipole":
        f = C.tangent_dipole_disk(make_grid(Disk(), h, margin=0.5, cap=cap), eps=eps)
    elif kind == "onion":
        f = C.stadium_onion(make_grid(Stadium(), h, margin=1.0, cap=cap), eps=eps)
    else:
        raise InvalidParameter(f"unknown kind {kind!r}; choose from {', '.join(BUILD_KINDS)}")
    return f, {"eps": eps, "eta": eta, "beta": beta, "alpha": alpha, "kind": kind}


def _params_from(header, args):
    hp = header.get("params", {})
    eps = args.eps if args.eps is not None else hp.get("eps")
    eta = args.eta if args.eta is not None else hp.get("eta", 0.05)
    if eps is None:
        raise InvalidSpec("eps is neither in the field header nor given with --eps")
    return Params(eps, eta, beta=hp.get("beta", 0.5), alpha=hp.get("alpha", 0.25))


def cmd_build(args):
    cfg = _load_config(args.config)
    kw = {"kind": args.kind, "eps": args.eps, "eta": args.eta, "h": args.h, "beta": args.beta,
          "alpha": args.alpha}
    if args.center is not None:
        kw["center"] = args.center
    kw = {k: v for k, v in kw.items() if v is not None}
    kw = {**cfg, **kw}
    if "kind" not in kw or "eps" not in kw:
        raise InvalidSpec("build needs --kind and --eps (or a config providing them)")
    if not args.out:
        raise InvalidSpec("build needs --out")
    f, hp = build_field(cap=args.grid_cap, **kw)
    write_field(f, args.out, hp)
    return 0


def cmd_energy(args):
    f, header = read_field(args.field)
    rep = harness.energy_report(f, _params_from(header, args), cap=args.grid_cap, scheme=args.scheme)
    _emit(harness.dumps(rep.to_dict()), args.out)
    return 0


def cmd_detect(args):
    from .topology import detect_vortices
    f, header = read_field(args.field)
    f2 = Field(f.grid, f.values[..., :2])
    rep = detect_vortices(f2, f.grid.domain, _params_from(header, args), check_budget=not args.no_budget)
    _emit(harness.dumps(rep.to_dict()), args.out)
    return 0


def cmd_sweep(args):
    if not args.config:
        raise InvalidSpec("sweep needs --config")
    spec = harness.SweepSpec.from_json(args.config)
    if args.grid_cap is not None:
        spec.grid_cap = args.grid_cap
    out = args.out or spec.out
    if not out:
        raise InvalidSpec("sweep needs --out or an 'out' entry in the spec")
    harness.run_sweep(spec, workers=args.workers, out=out)
    return 0


def cmd_fit(args):
    res = harness.fit_csv(args.csv, model=args.model, key=args.key, param=args.param, target=args.target)
    _emit(harness.dumps(res.to_dict()), args.out)
    return 0


def cmd_appendix(args):
    hs = args.h
    if not hs and args.config:
        hs = _load_config(args.config).get("h")
    if not hs:
        raise InvalidSpec("appendix needs --h values")
    rep = harness.tangency_divergence(hs, cap=args.grid_cap)
    _emit(harness.dumps(rep), args.out)
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="thinfilm", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON configuration file")
    common.add_argument("--out", help="output path (default: stdout where sensible)")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--grid-cap", type=int, default=None, help="maximum number of grid nodes")
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", parents=[common], help="write a Field file")
    b.add_argument("--kind", choices=BUILD_KINDS)
    b.add_argument("--eps", type=float)
    b.add_argument("--eta", type=float)
    b.add_argument("--h", type=float)
    b.add_argument("--beta", type=float)
    b.add_argument("--alpha", type=float)
    b.add_argument("--center", type=float, nargs=2)
    b.set_defaults(func=cmd_build)

    for name, func, hlp in (("energy", cmd_energy, "energy report of a Field file"),
                            ("detect", cmd_detect, "vortex report of a Field file")):
        p = sub.add_parser(name, parents=[common], help=hlp)
        p.add_argument("field")
        p.add_argument("--eps", type=float)
        p.add_argument("--eta", type=float)
        if name == "detect":
            p.add_argument("--no-budget", action="store_true", help="skip the energy budget check")
        else:
            p.add_argument("--scheme", choices=("zero-extension", "flux"), default="zero-extension",
                           help="discrete divergence used for the stray field")
        p.set_defaults(func=func)

    s = sub.add_parser("sweep", parents=[common], help="run a SweepSpec")
    s.set_defaults(func=cmd_sweep)

    f = sub.add_parser("fit", parents=[common], help="fit a sweep CSV")
    f.add_argument("csv")
    f.add_argument("--model", choices=sorted(harness.MODELS), default="log")
    f.add_argument("--key")
    f.add_argument("--param")
    f.add_argument("--target", type=float)
    f.set_defaults(func=cmd_fit)

    a = sub.add_parser("appendix", parents=[common], help="tangency divergence experiment")
    a.add_argument("--h", type=float, nargs="+")
    a.set_defaults(func=cmd_appendix)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InvalidSpec, InvalidParameter) as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 2
    except ResourceLimit as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 3
    except MemoryError as exc:
        print(f"error [resource-limit]: {exc}", file=sys.stderr)
        return 3
    except ThinFilmError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Reading and writing fields: one JSON header line followed by CSV rows.

The header carries ``nx, ny, h, origin, ncomp, domain-kind, params``; each
following row is ``i,j,m1,m2[,m3]`` for an inside node, rows ordered with
``i`` outer and ``j`` inner.  Reals are written with 17 significant digits
so a round trip is exact.
"""
from __future__ import annotations

import json

import numpy as np

from .errors import InvalidSpec
from .geometry import Field, Grid, make_domain

FMT = "%.17g"


def write_field(field: Field, path, params: dict | None = None):
    """Write ``field`` to ``path``; ``params`` (e.g. eps, eta) goes into the header."""
    g = field.grid
    header = {"nx": g.nx, "ny": g.ny, "h": g.h, "origin": [float(g.origin[0]), float(g.origin[1])],
              "ncomp": field.ncomp, "domain-kind": g.domain.kind,
              "params": {"domain": g.domain.params(), **(params or {})}}
    ii, jj = np.nonzero(g.mask)  # row-major: i outer, j inner
    rows = np.column_stack([ii, jj, field.values[ii, jj]])
    fmt = ["%d", "%d"] + [FMT] * field.ncomp
    with open(path, "w") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        np.savetxt(fh, rows, fmt=fmt, delimiter=",")


def read_field(path):
    """Return ``(field, header)``; the mask is the set of listed nodes."""
    try:
        fh = open(path)
    except OSError as exc:
        raise InvalidSpec(f"cannot read field file: {exc}") from exc
    with fh:
        first = fh.readline()
        try:
            header = json.loads(first)
            nx, ny, h = int(header["nx"]), int(header["ny"]), float(header["h"])
            origin = tuple(float(v) for v in header["origin"])
            ncomp = int(header["ncomp"])
            dparams = dict(header.get("params", {}).get("domain", {}))
            domain = make_domain(header["domain-kind"], **dparams)
        except (ValueError, KeyError, TypeError) as exc:
            raise InvalidSpec(f"bad field header: {exc}") from exc
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.size and data.shape[1] != 2 + ncomp:
        raise InvalidSpec("row width does not match ncomp")
    mask = np.zeros((nx, ny), bool)
    values = np.zeros((nx, ny, ncomp))
    if data.size:
        ii, jj = data[:, 0].astype(int), data[:, 1].astype(int)
        mask[ii, jj] = True
        values[ii, jj] = data[:, 2:]
    grid = Grid(nx, ny, h, origin, mask, domain)
    return Field(grid, values), header

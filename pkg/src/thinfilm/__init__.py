"""Thin-film micromagnetic energies, explicit constructions and defect detection."""
from .geometry import (Corner, Curve, Cusp, Disk, Domain, Field, Grid, Square, Stadium,
                       boundary_curve, interp, make_domain, make_grid)

__version__ = "0.1.0"

"""Exception hierarchy shared by every module.

Each error carries a short machine-readable ``code`` so that the CLI can map
failures onto exit codes and sweep rows can record them.
"""


class ThinFilmError(Exception):
    code = "error"


class InvalidParameter(ThinFilmError, ValueError):
    code = "invalid-parameter"


class InvalidSpec(ThinFilmError, ValueError):
    code = "invalid-spec"


class ResourceLimit(ThinFilmError, MemoryError):
    code = "resource-limit"


class OutsideSecurityRegion(ThinFilmError, ValueError):
    code = "outside-security-region"


class OutOfBounds(ThinFilmError, ValueError):
    code = "out-of-bounds"


class WrongComponentCount(ThinFilmError, ValueError):
    code = "wrong-component-count"


class NonzeroTails(ThinFilmError, ValueError):
    code = "nonzero-tails"


class CoreOutsideDomain(ThinFilmError, ValueError):
    code = "core-outside-domain"


class ModulusTooSmall(ThinFilmError, ValueError):
    code = "modulus-too-small"


class AmbiguousDegree(ThinFilmError, ValueError):
    code = "ambiguous-degree"


class TangencyViolation(ThinFilmError, ValueError):
    code = "tangency-violation"


class NoGoodRadius(ThinFilmError, ValueError):
    code = "no-good-radius"


class EnergyBudgetExceeded(ThinFilmError, ValueError):
    code = "energy-budget-exceeded"


class DegreeOutOfRange(ThinFilmError, ValueError):
    code = "degree-out-of-range"


class ModulusViolation(ThinFilmError, ValueError):
    code = "modulus-violation"


class NonzeroDegreeCell(ThinFilmError, ValueError):
    code = "nonzero-degree-cell"


class LiftFailure(ThinFilmError, ValueError):
    code = "lift-failure"


class DegenerateAbscissa(ThinFilmError, ValueError):
    code = "degenerate-abscissa"

"""Exception hierarchy.

Every error carries a stable ``code`` that the CLI copies into reports.
"""

import math


class GateForgeError(ValueError):
    code = "E_GATEFORGE"


class DimensionError(GateForgeError):
    code = "E_DIMENSION"


class HermiticityError(GateForgeError):
    code = "E_HERMITICITY"


class UnitarityError(GateForgeError):
    code = "E_UNITARITY"


class ConvergenceError(GateForgeError):
    code = "E_CONVERGENCE"


class ShapeError(GateForgeError):
    code = "E_SHAPE"


class FitError(GateForgeError):
    code = "E_FIT"


class LinearTermError(GateForgeError):
    """E3 != E4 for a branch that was required to have no single-spin terms."""

    code = "E_LINEAR_TERM"

    def __init__(self, rho, delta, n3, n4, suggestion=None):
        self.rho, self.delta, self.n3, self.n4 = rho, delta, n3, n4
        msg = (
            f"E3 != E4: rho - 2*pi*N3 = {rho - 2 * math.pi * n3!r} but "
            f"delta - 2*pi*N4 = {delta - 2 * math.pi * n4!r} "
            f"(rho={rho!r}, delta={delta!r}, N3={n3}, N4={n4})"
        )
        if suggestion is not None:
            msg += f"; nearest aligned branch: N3={suggestion[0]}, N4={suggestion[1]}"
        super().__init__(msg)


class GridError(GateForgeError):
    code = "E_GRID"


class PurelyOscillatoryError(GateForgeError):
    """Protocol integrates to zero over its window and cannot be normalized."""

    code = "E_PURELY_OSCILLATORY"


class SpecValidationError(GateForgeError):
    """Aggregated job-spec problems; ``errors`` is a list of (path, message)."""

    code = "E_SPEC"

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(f"{path}: {msg}" for path, msg in self.errors))


ERROR_CODES = {
    cls.__name__: cls.code
    for cls in (
        GateForgeError,
        DimensionError,
        HermiticityError,
        UnitarityError,
        ConvergenceError,
        ShapeError,
        FitError,
        LinearTermError,
        GridError,
        PurelyOscillatoryError,
        SpecValidationError,
    )
}

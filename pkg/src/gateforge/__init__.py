"""Interaction Hamiltonians for quantum NOT gates.

Synthesizes one-spin and two-spin (Input/Output) NOT Hamiltonians from
target unitaries, expands them over Pauli tensor products, and checks the
resulting gates under constant and time-dependent protocols.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConvergenceError,
    DimensionError,
    FitError,
    GateForgeError,
    GridError,
    HermiticityError,
    LinearTermError,
    PurelyOscillatoryError,
    ShapeError,
    SpecValidationError,
    UnitarityError,
)
from .families import *  # noqa: E402,F401,F403
from .protocols import *  # noqa: E402,F401,F403
from .qmatrix import *  # noqa: E402,F401,F403
from .synthesis import *  # noqa: E402,F401,F403

"""Target unitaries for the one-spin NOT and the two-spin (Input/Output) NOT.

Three parametrizations are supported:

* ``SimpleNotParams``: ``[[0, e^{i beta}], [e^{i alpha}, 0]]``.
* ``ExtendedGeneralParams``: the eight-angle family covering every unitary
  with the two-spin NOT zero pattern.
* ``ExtendedRestrictedParams``: the four-phase slice with one phase per
  column (``Omega = Upsilon = 0``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .errors import FitError, ShapeError
from .qmatrix import CHECK_TOL, as_qmatrix, is_unitary, max_norm

__all__ = [
    "ExtendedGeneralParams",
    "ExtendedRestrictedParams",
    "SimpleNotParams",
    "angle_distance",
    "build_extended_general",
    "build_extended_restricted",
    "build_simple_not",
    "fit_extended_general",
    "is_not_shape",
    "random_block_not_unitary",
    "random_unitary_2x2",
    "wrap_angle",
]

FIT_TOL = 1e-9
# entries that must vanish: Input-up columns (0, 1) may only feed rows 1, 3 and
# Input-down columns (2, 3) only rows 0, 2
NOT_ZERO_ENTRIES = ((0, 0), (0, 1), (1, 2), (1, 3), (2, 0), (2, 1), (3, 2), (3, 3))
# sin/cos below this are treated as exactly zero when extracting phases
_VANISHING = 1e-12


def wrap_angle(x: float) -> float:
    """Map an angle to (-pi, pi]."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"angle must be finite, got {x!r}")
    y = math.remainder(x, 2 * math.pi)
    return math.pi if y <= -math.pi else y


def angle_distance(a: float, b: float) -> float:
    """Distance between two angles on the circle."""
    return abs(math.remainder(a - b, 2 * math.pi))


class _Angles:
    _bounded: tuple[str, ...] = ()

    def __post_init__(self):
        for f in fields(self):
            value = float(getattr(self, f.name))
            if f.name in self._bounded:
                if not 0.0 <= value <= math.pi / 2:
                    raise ValueError(f"{f.name} must lie in [0, pi/2], got {value!r}")
            else:
                value = wrap_angle(value)
            object.__setattr__(self, f.name, value)

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class SimpleNotParams(_Angles):
    alpha: float
    beta: float

    @property
    def gamma(self) -> float:
        return 0.5 * (self.alpha - self.beta)


@dataclass(frozen=True)
class ExtendedGeneralParams(_Angles):
    chi: float
    beta: float
    alpha: float
    rho: float
    eta: float
    delta: float
    Omega: float
    Upsilon: float

    _bounded = ("Omega", "Upsilon")


@dataclass(frozen=True)
class ExtendedRestrictedParams(_Angles):
    alpha: float
    beta: float
    rho: float
    delta: float

    @property
    def gamma(self) -> float:
        return 0.5 * (self.alpha - self.beta)


def _phase(x):
    return complex(math.cos(x), math.sin(x))


def build_simple_not(p: SimpleNotParams) -> np.ndarray:
    return np.array([[0, _phase(p.beta)], [_phase(p.alpha), 0]], dtype=complex)


def build_extended_general(p: ExtendedGeneralParams) -> np.ndarray:
    so, co = math.sin(p.Omega), math.cos(p.Omega)
    su, cu = math.sin(p.Upsilon), math.cos(p.Upsilon)
    u = np.zeros((4, 4), dtype=complex)
    u[0, 2] = _phase(p.chi) * so
    u[0, 3] = _phase(p.beta) * co
    u[1, 0] = -_phase(p.alpha + p.rho - p.eta) * su
    u[1, 1] = _phase(p.rho) * cu
    u[2, 2] = _phase(p.delta) * co
    u[2, 3] = -_phase(p.beta + p.delta - p.chi) * so
    u[3, 0] = _phase(p.alpha) * cu
    u[3, 1] = _phase(p.eta) * su
    return u


def build_extended_restricted(p: ExtendedRestrictedParams) -> np.ndarray:
    u = np.zeros((4, 4), dtype=complex)
    u[0, 3] = _phase(p.beta)
    u[1, 1] = _phase(p.rho)
    u[2, 2] = _phase(p.delta)
    u[3, 0] = _phase(p.alpha)
    return u


def is_not_shape(u, tol: float = CHECK_TOL) -> bool:
    """True when ``u`` maps Input-up states to Output-down states and vice versa."""
    u = as_qmatrix(u, dims=(4,))
    return all(abs(u[idx]) <= tol for idx in NOT_ZERO_ENTRIES)


def fit_extended_general(u) -> ExtendedGeneralParams:
    """Recover the eight angles of a two-spin NOT unitary.

    Phases that only multiply vanishing entries are set to zero. When one
    such phase also enters a surviving entry through a combination
    (``beta + delta - chi`` or ``alpha + rho - eta``), the other member of
    the combination absorbs it.
    """
    u = as_qmatrix(u, dims=(4,))
    if not is_unitary(u) or not is_not_shape(u):
        raise ShapeError("fit_extended_general needs a unitary with the two-spin NOT zero pattern")

    omega = math.atan2(abs(u[0, 2]), abs(u[0, 3]))
    upsilon = math.atan2(abs(u[3, 1]), abs(u[3, 0]))
    sin_o, cos_o = math.sin(omega), math.cos(omega)
    sin_u, cos_u = math.sin(upsilon), math.cos(upsilon)

    chi = float(np.angle(u[0, 2])) if sin_o > _VANISHING else 0.0
    if cos_o > _VANISHING:
        beta = float(np.angle(u[0, 3]))
        delta = float(np.angle(u[2, 2]))
    else:
        beta = 0.0
        delta = float(np.angle(-u[2, 3])) + chi

    eta = float(np.angle(u[3, 1])) if sin_u > _VANISHING else 0.0
    if cos_u > _VANISHING:
        alpha = float(np.angle(u[3, 0]))
        rho = float(np.angle(u[1, 1]))
    else:
        alpha = 0.0
        rho = float(np.angle(-u[1, 0])) + eta

    p = ExtendedGeneralParams(
        chi=chi, beta=beta, alpha=alpha, rho=rho, eta=eta, delta=delta,
        Omega=omega, Upsilon=upsilon,
    )
    residual = max_norm(build_extended_general(p) - u)
    if residual > FIT_TOL:
        raise FitError(f"eight-angle family misses this unitary: residual {residual:.3e}")
    return p


def random_unitary_2x2(rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed 2x2 unitary from an overall phase, a mixing angle and two phases."""
    theta = math.asin(math.sqrt(rng.uniform()))
    phi, psi, chi = rng.uniform(-math.pi, math.pi, size=3)
    c, s = math.cos(theta), math.sin(theta)
    core = np.array(
        [[_phase(psi) * c, _phase(chi) * s], [-_phase(-chi) * s, _phase(-psi) * c]]
    )
    return _phase(phi) * core


def random_block_not_unitary(rng: np.random.Generator, blocks=None) -> np.ndarray:
    """Place two 2x2 unitaries into the two-spin NOT zero pattern.

    The first block maps Input-up columns (0, 1) to rows (1, 3), the second
    maps Input-down columns (2, 3) to rows (0, 2).
    """
    up, down = blocks if blocks is not None else (random_unitary_2x2(rng), random_unitary_2x2(rng))
    u = np.zeros((4, 4), dtype=complex)
    u[np.ix_([1, 3], [0, 1])] = up
    u[np.ix_([0, 2], [2, 3])] = down
    return u

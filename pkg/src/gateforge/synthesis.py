"""Interaction Hamiltonians that realize a target NOT unitary over a gate window.

A unitary only fixes the energies modulo ``2 pi hbar / delta_t``; the branch
integers ``N1..N4`` pick one of the allowed spectra. The Hamiltonian is
rebuilt as ``T diag(E) T^dag`` from the eigenvectors of the target and then
expanded over the Pauli basis.

Energies are in units of ``hbar / delta_t`` only through ``TimeBase``;
the default ``TimeBase()`` sets both to 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import LinearTermError
from .families import (
    ExtendedRestrictedParams,
    SimpleNotParams,
    build_extended_restricted,
    build_simple_not,
    wrap_angle,
)
from .qmatrix import (
    PauliDecomposition,
    as_qmatrix,
    basis_state,
    eig_normal,
    matrix_exp_evolution,
    max_norm,
    pauli_compose,
    pauli_decompose,
    phase_distance,
)

__all__ = [
    "BranchChoice",
    "EnergySpectrum",
    "HamiltonianResult",
    "SynthesisOptions",
    "TimeBase",
    "VerificationReport",
    "canonical_to_restricted",
    "choose_branch_min_splitting",
    "energies_extended",
    "energies_simple",
    "realized_global_phase",
    "synthesize_canonical_extended",
    "synthesize_extended",
    "synthesize_from_unitary",
    "synthesize_simple",
    "verify_gate",
]

VERIFY_TOL = 1e-9
ALIGN_TOL = 1e-10
TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class BranchChoice:
    N1: int = 0
    N2: int = 0
    N3: int = 0
    N4: int = 0

    def __post_init__(self):
        for name in ("N1", "N2", "N3", "N4"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise ValueError(f"{name} must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))

    @property
    def N(self) -> int:
        return self.N1 - self.N2

    def as_dict(self) -> dict[str, int]:
        return {"N1": self.N1, "N2": self.N2, "N3": self.N3, "N4": self.N4}


@dataclass(frozen=True)
class TimeBase:
    delta_t: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("delta_t", "hbar"):
            value = float(getattr(self, name))
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive, got {value!r}")
            object.__setattr__(self, name, value)

    @property
    def unit(self) -> float:
        """Energy unit ``hbar / delta_t``."""
        return self.hbar / self.delta_t


@dataclass(frozen=True)
class EnergySpectrum:
    levels: tuple[float, ...]
    splitting: float


@dataclass(frozen=True)
class SynthesisOptions:
    drop_identity: bool = False
    require_no_linear: bool = False
    minimize_splitting: bool = False


@dataclass(frozen=True)
class HamiltonianResult:
    """Synthesized Hamiltonian plus the bookkeeping needed to verify it.

    ``spectrum`` lists the eigenvalues of ``H`` itself, i.e. after the
    identity term was removed. ``expected_global_phase`` is the phase
    ``phi`` with ``target = exp(i phi) exp(-i H delta_t / hbar)``.
    """

    H: np.ndarray = field(repr=False)
    decomposition: PauliDecomposition
    spectrum: EnergySpectrum
    dropped_identity_coefficient: float = 0.0
    expected_global_phase: float = 0.0

    @property
    def ising(self) -> float:
        """Coupling of the two-spin Ising term (minus the ZZ coefficient)."""
        return -self.decomposition.coeff("ZZ")


@dataclass(frozen=True)
class VerificationReport:
    evolution: np.ndarray = field(repr=False)
    exact_distance: float
    phase_distance: float
    realized_phase: float | None
    up_to_phase: bool
    tolerance: float
    passed: bool
    not_behavior: bool | None = None


def _splitting(n, t):
    # straight from the integers, evaluated as |2N - 1| pi hbar / delta_t
    return abs(2 * n - 1) * math.pi * t.hbar / t.delta_t


def energies_simple(p: SimpleNotParams, b: BranchChoice = BranchChoice(), t: TimeBase = TimeBase()) -> EnergySpectrum:
    shift = -0.5 * (p.alpha + p.beta) * t.unit
    e1 = shift + TWO_PI * b.N1 * t.unit
    e2 = shift + TWO_PI * (b.N2 + 0.5) * t.unit
    return EnergySpectrum((e1, e2), _splitting(b.N, t))


def energies_extended(
    p: ExtendedRestrictedParams, b: BranchChoice = BranchChoice(), t: TimeBase = TimeBase()
) -> EnergySpectrum:
    e1, e2 = energies_simple(SimpleNotParams(p.alpha, p.beta), b, t).levels
    e3 = (-p.rho + TWO_PI * b.N3) * t.unit
    e4 = (-p.delta + TWO_PI * b.N4) * t.unit
    return EnergySpectrum((e1, e2, e3, e4), _splitting(b.N, t))


def choose_branch_min_splitting(base: BranchChoice) -> BranchChoice:
    """Branch with ``|N - 1/2| = 1/2``.

    Bases already at ``N = 0`` or ``N = 1`` come back unchanged; anything
    else is moved to ``N = 0`` by setting ``N1 = N2``.
    """
    if base.N in (0, 1):
        return base
    return BranchChoice(base.N2, base.N2, base.N3, base.N4)


def _assemble(t_vecs, levels, splitting, timebase, opts, linear_checked=False):
    levels = np.asarray(levels, dtype=float)
    h = t_vecs @ np.diag(levels) @ t_vecs.conj().T
    h = 0.5 * (h + h.conj().T)
    dec = pauli_decompose(h)
    terms = dec.as_dict()
    dim = dec.dim
    identity = "I" * (dim // 2)

    if linear_checked:
        scale = max(1.0, float(np.max(np.abs(levels))))
        for label in ("ZI", "IZ"):
            residue = abs(terms.pop(label, 0.0))
            if residue > 1e-10 * scale:
                raise RuntimeError(f"{label} coefficient {residue} survived E3 = E4")

    dropped = 0.0
    if opts.drop_identity:
        dropped = float(terms.pop(identity, 0.0))
    phase = wrap_angle(-dropped * timebase.delta_t / timebase.hbar)

    dec = PauliDecomposition(dim, terms)
    spectrum = EnergySpectrum(tuple(float(e - dropped) for e in levels), splitting)
    return HamiltonianResult(pauli_compose(dec), dec, spectrum, dropped, phase)


def synthesize_simple(
    p: SimpleNotParams,
    b: BranchChoice = BranchChoice(),
    t: TimeBase = TimeBase(),
    opts: SynthesisOptions = SynthesisOptions(),
) -> HamiltonianResult:
    """One-spin NOT Hamiltonian ``c0 I + c (cos g X + sin g Y)``, ``g = (alpha - beta)/2``."""
    if opts.minimize_splitting:
        b = choose_branch_min_splitting(b)
    spectrum = energies_simple(p, b, t)
    _, t_vecs = eig_normal(build_simple_not(p), hint="analytic_simple")
    return _assemble(t_vecs, spectrum.levels, spectrum.splitting, t, opts)


def _aligned_n4(p, b):
    k = (p.delta - p.rho) / TWO_PI + b.N3
    return round(k) if abs(k - round(k)) * TWO_PI <= ALIGN_TOL else None


def synthesize_extended(
    p: ExtendedRestrictedParams,
    b: BranchChoice = BranchChoice(),
    t: TimeBase = TimeBase(),
    opts: SynthesisOptions = SynthesisOptions(),
) -> HamiltonianResult:
    """Two-spin NOT Hamiltonian for the restricted four-phase target.

    With ``require_no_linear`` the branch must give ``E3 = E4`` (no
    single-spin Z fields); otherwise ``LinearTermError`` is raised.
    """
    if opts.minimize_splitting:
        b = choose_branch_min_splitting(b)
    spectrum = energies_extended(p, b, t)
    levels = list(spectrum.levels)
    if opts.require_no_linear:
        mismatch = (p.rho - TWO_PI * b.N3) - (p.delta - TWO_PI * b.N4)
        if abs(mismatch) > ALIGN_TOL:
            n4 = _aligned_n4(p, b)
            raise LinearTermError(p.rho, p.delta, b.N3, b.N4, None if n4 is None else (b.N3, n4))
        levels[3] = levels[2]
    _, t_vecs = eig_normal(build_extended_restricted(p), hint="analytic_restricted")
    return _assemble(t_vecs, levels, spectrum.splitting, t, opts, linear_checked=opts.require_no_linear)


def synthesize_from_unitary(
    u,
    b: BranchChoice = BranchChoice(),
    t: TimeBase = TimeBase(),
    opts: SynthesisOptions = SynthesisOptions(),
) -> HamiltonianResult:
    """Hamiltonian for an arbitrary 2x2 or 4x4 unitary via numeric diagonalization.

    ``E_k = hbar/delta_t * (-arg u_k + 2 pi N_k)``, with the branch integers
    attached to eigenvalues in the order the numeric eigensolver returns
    them. ``require_no_linear`` is not applied here.
    """
    u = as_qmatrix(u)
    eigvals, t_vecs = eig_normal(u, hint="numeric")
    ns = (b.N1, b.N2, b.N3, b.N4)[: u.shape[0]]
    levels = [(-float(np.angle(z)) + TWO_PI * n) * t.unit for z, n in zip(eigvals, ns)]
    splitting = abs(levels[0] - levels[1])
    return _assemble(t_vecs, levels, splitting, t, SynthesisOptions(drop_identity=opts.drop_identity))


def synthesize_canonical_extended(
    ising: float, N: int, gamma: float, t: TimeBase = TimeBase()
) -> HamiltonianResult:
    """``-ising ZZ + (pi hbar / 2 delta_t)(N - 1/2)[cos g (XX - YY) + sin g (XY + YX)]``."""
    k = 0.5 * math.pi * (N - 0.5) * t.unit
    c, s = math.cos(gamma), math.sin(gamma)
    h = pauli_compose({"ZZ": -ising, "XX": k * c, "YY": -k * c, "XY": k * s, "YX": k * s})
    half = math.pi * (N - 0.5) * t.unit
    levels = (-ising + half, -ising - half, float(ising), float(ising))
    return HamiltonianResult(h, pauli_decompose(h), EnergySpectrum(levels, _splitting(N, t)))


def canonical_to_restricted(
    ising: float, N: int, gamma: float, t: TimeBase = TimeBase()
) -> tuple[ExtendedRestrictedParams, BranchChoice]:
    """Restricted target and branch whose identity-free Hamiltonian is the canonical one.

    Uses ``alpha = -beta = gamma`` and ``N2 = 0``, ``N1 = N``; ``rho = delta``
    and ``N3 = N4`` are then fixed by the Ising coupling.
    """
    g = wrap_angle(gamma)
    if g == math.pi:
        # beta = -pi would wrap to +pi and shift gamma by pi; flip the sign of (N - 1/2) instead
        g, N = 0.0, 1 - N
    # E3 = E4 = 2 ising + pi (N + 1/2) with alpha + beta = 0, N2 = 0
    e_same = (2 * ising) / t.unit + math.pi * (N + 0.5)
    rho = wrap_angle(-e_same)
    n3 = round((e_same + rho) / TWO_PI)
    params = ExtendedRestrictedParams(alpha=g, beta=-g, rho=rho, delta=rho)
    return params, BranchChoice(N, 0, n3, n3)


def realized_global_phase(evolution, target) -> float | None:
    """Phase ``phi`` with ``target ~ exp(i phi) evolution``; None if they are orthogonal."""
    overlap = np.trace(np.asarray(evolution).conj().T @ np.asarray(target))
    if abs(overlap) <= 1e-12:
        return None
    return float(np.angle(overlap))


def _not_behavior(u, tol):
    for spins in ("uu", "ud"):
        out = u @ basis_state(spins)
        if abs(out[0]) > tol or abs(out[2]) > tol:
            return False
    for spins in ("du", "dd"):
        out = u @ basis_state(spins)
        if abs(out[1]) > tol or abs(out[3]) > tol:
            return False
    return True


def verify_gate(
    r: HamiltonianResult,
    target,
    t: TimeBase = TimeBase(),
    up_to_phase: bool = True,
    tol: float = VERIFY_TOL,
) -> VerificationReport:
    """Evolve ``r.H`` over the gate window and compare with ``target``."""
    target = as_qmatrix(target)
    u = matrix_exp_evolution(r.H, t.delta_t, t.hbar)
    exact = max_norm(u - target)
    pdist = phase_distance(u, target)
    distance = pdist if up_to_phase else exact
    behavior = _not_behavior(u, tol) if u.shape[0] == 4 else None
    return VerificationReport(
        evolution=u,
        exact_distance=exact,
        phase_distance=pdist,
        realized_phase=realized_global_phase(u, target),
        up_to_phase=up_to_phase,
        tolerance=tol,
        passed=bool(distance <= tol),
        not_behavior=behavior,
    )

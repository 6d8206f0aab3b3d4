"""Time-dependent gate protocols ``H(t) = sum_k f_k(t) H_k``.

A protocol ``f`` lives on a window ``[start, start + duration]`` and is
normalized when it integrates to ``duration``; a normalized protocol on a
single, constant ``H`` produces the same gate as switching ``H`` on for the
whole window. Whether the time ordering matters is decided by the pairwise
commutators of the ``H_k`` (see ``commutation_audit``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import simpson

from .errors import DimensionError, GridError, HermiticityError, PurelyOscillatoryError
from .qmatrix import _expm_hermitian, as_qmatrix, bracket, is_hermitian, matrix_exp_evolution, max_norm
from .synthesis import TimeBase

__all__ = [
    "AuditReport",
    "PairAudit",
    "Protocol",
    "TimedHamiltonian",
    "commutation_audit",
    "evolve_time_ordered",
    "evolve_unordered",
    "normalize_protocol",
    "protocol_integral",
]

SHAPES = ("rectangular", "raised_cosine", "const_plus_cosine", "sampled")
ZERO_INTEGRAL_TOL = 1e-12
COMMUTE_TOL = 1e-12


@dataclass(frozen=True)
class Protocol:
    """Scalar time dependence on ``[start, start + duration]``.

    * ``rectangular``: ``scale``
    * ``raised_cosine``: ``scale * (1 - cos(2 pi (t - start) / duration))``
    * ``const_plus_cosine``: ``scale * (a + b cos(omega (t - start) + phase))``
    * ``sampled``: ``scale`` times the linear interpolant of ``(times, values)``
    """

    shape: str
    start: float = 0.0
    duration: float = 1.0
    scale: float = 1.0
    a: float = 0.0
    b: float = 0.0
    omega: float = 0.0
    phase: float = 0.0
    times: tuple[float, ...] = field(default=(), repr=False)
    values: tuple[float, ...] = field(default=(), repr=False)

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ValueError(f"unknown protocol shape {self.shape!r}; expected one of {SHAPES}")
        if not (math.isfinite(self.duration) and self.duration > 0):
            raise ValueError(f"duration must be positive, got {self.duration!r}")
        object.__setattr__(self, "times", tuple(float(x) for x in self.times))
        object.__setattr__(self, "values", tuple(float(x) for x in self.values))
        if self.shape == "sampled":
            if len(self.times) != len(self.values):
                raise GridError("sampled protocol needs as many values as times")
            if len(self.times) < 3:
                raise GridError("sampled protocol needs at least 3 points")
            if np.any(np.diff(self.times) <= 0):
                raise GridError("sample times must be strictly increasing")

    @classmethod
    def rectangular(cls, start=0.0, duration=1.0, scale=1.0):
        return cls("rectangular", start, duration, scale)

    @classmethod
    def raised_cosine(cls, start=0.0, duration=1.0, scale=1.0):
        return cls("raised_cosine", start, duration, scale)

    @classmethod
    def const_plus_cosine(cls, a, b, omega, phase=0.0, start=0.0, duration=1.0, scale=1.0):
        return cls("const_plus_cosine", start, duration, scale, a=a, b=b, omega=omega, phase=phase)

    @classmethod
    def sampled(cls, times, values, start=None, duration=None, scale=1.0):
        times = tuple(times)
        start = times[0] if start is None else start
        duration = times[-1] - start if duration is None else duration
        return cls("sampled", start, duration, scale, times=times, values=tuple(values))

    @property
    def end(self) -> float:
        return self.start + self.duration

    @property
    def window(self) -> tuple[float, float]:
        return (self.start, self.duration)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.shape == "rectangular":
            f = np.ones_like(t)
        elif self.shape == "raised_cosine":
            f = 1.0 - np.cos(2 * math.pi * (t - self.start) / self.duration)
        elif self.shape == "const_plus_cosine":
            f = self.a + self.b * np.cos(self.omega * (t - self.start) + self.phase)
        else:
            f = np.interp(t, self.times, self.values)
        return self.scale * f


def _sampled_window(p):
    times, values = np.array(p.times), np.array(p.values)
    slack = 1e-12 * p.duration
    if times[0] > p.start + slack or times[-1] < p.end - slack:
        raise GridError(
            f"sample grid [{times[0]!r}, {times[-1]!r}] does not cover window [{p.start!r}, {p.end!r}]"
        )
    inside = (times > p.start + slack) & (times < p.end - slack)
    t = np.concatenate(([p.start], times[inside], [p.end]))
    v = np.interp(t, times, values)
    if len(t) < 3:
        raise GridError("fewer than 3 samples inside the protocol window")
    return t, v


def protocol_integral(p: Protocol) -> float:
    """Integral of ``p`` over its window: closed form, or composite Simpson for samples."""
    if p.shape in ("rectangular", "raised_cosine"):
        # the cosine of the raised-cosine shape runs over one full period
        return p.scale * p.duration
    if p.shape == "const_plus_cosine":
        if p.omega == 0:
            osc = p.b * math.cos(p.phase) * p.duration
        else:
            osc = p.b * (math.sin(p.omega * p.duration + p.phase) - math.sin(p.phase)) / p.omega
        return p.scale * (p.a * p.duration + osc)
    t, v = _sampled_window(p)
    return p.scale * float(simpson(v, x=t))


def normalize_protocol(p: Protocol) -> Protocol:
    """Rescale ``p`` so that it integrates to its duration."""
    total = protocol_integral(p)
    if abs(total) < ZERO_INTEGRAL_TOL * p.duration:
        raise PurelyOscillatoryError(
            f"{p.shape} protocol integrates to {total!r} over its window; "
            "a purely oscillatory protocol cannot be normalized"
        )
    return replace(p, scale=p.scale * p.duration / total)


@dataclass(frozen=True)
class TimedHamiltonian:
    """Sum of Hermitian terms, each with its own protocol on a shared window."""

    terms: tuple[tuple[np.ndarray, Protocol], ...]

    def __post_init__(self):
        if not self.terms:
            raise ValueError("TimedHamiltonian needs at least one term")
        checked = []
        for h, p in self.terms:
            h = as_qmatrix(h)
            if not is_hermitian(h):
                raise HermiticityError("every term of a TimedHamiltonian must be Hermitian")
            checked.append((h, p))
        if len({h.shape for h, _ in checked}) != 1:
            raise DimensionError("terms act on different dimensions")
        windows = {p.window for _, p in checked}
        if len(windows) != 1:
            raise ValueError(f"protocols use different windows: {sorted(windows)}")
        object.__setattr__(self, "terms", tuple(checked))

    @classmethod
    def single(cls, h, protocol: Protocol) -> "TimedHamiltonian":
        return cls(((h, protocol),))

    @property
    def dim(self) -> int:
        return self.terms[0][0].shape[0]

    @property
    def window(self) -> tuple[float, float]:
        return self.terms[0][1].window

    def at(self, t: float) -> np.ndarray:
        return sum(float(p(t)) * h for h, p in self.terms)


def evolve_time_ordered(th: TimedHamiltonian, t: TimeBase = TimeBase(), steps: int = 1000) -> np.ndarray:
    """Ordered product of midpoint exponentials over ``steps`` equal slices.

    Later slices multiply from the left. The window comes from the
    protocols; ``t`` only supplies ``hbar``.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    start, duration = th.window
    dt = duration / steps
    mids = start + (np.arange(steps) + 0.5) * dt
    weights = np.array([p(mids) for _, p in th.terms])
    stack = np.array([h for h, _ in th.terms])
    slices = _expm_hermitian(np.einsum("ks,kij->sij", weights, stack), dt / t.hbar)
    u = np.eye(th.dim, dtype=complex)
    for step in slices:
        u = step @ u
    return u


def evolve_unordered(th: TimedHamiltonian, t: TimeBase = TimeBase()) -> np.ndarray:
    """``exp(-i sum_k (int f_k) H_k / hbar)``, i.e. Dyson series without ordering."""
    generator = sum(protocol_integral(p) * h for h, p in th.terms)
    return matrix_exp_evolution(generator, 1.0, t.hbar)


@dataclass(frozen=True)
class PairAudit:
    i: int
    j: int
    commutator_norm: float
    anticommutator_norm: float
    commutes: bool
    anticommutes: bool


@dataclass(frozen=True)
class AuditReport:
    pairs: tuple[PairAudit, ...]
    ordering_free: bool

    def pair(self, i: int, j: int) -> PairAudit:
        i, j = min(i, j), max(i, j)
        return next(a for a in self.pairs if (a.i, a.j) == (i, j))

    @property
    def anticommuting_pairs(self) -> list[tuple[int, int]]:
        return [(a.i, a.j) for a in self.pairs if a.anticommutes and not a.commutes]


def commutation_audit(th: TimedHamiltonian) -> AuditReport:
    """Pairwise commutator and anticommutator norms of the terms.

    ``ordering_free`` holds when every pair commutes; then ``H(t)`` commutes
    with itself at all times whatever the scalar protocols are.
    """
    pairs = []
    hs = [h for h, _ in th.terms]
    for i in range(len(hs)):
        for j in range(i + 1, len(hs)):
            tol = COMMUTE_TOL * max(1.0, max_norm(hs[i]) * max_norm(hs[j]))
            comm = max_norm(bracket(hs[i], hs[j], "commutator"))
            anti = max_norm(bracket(hs[i], hs[j], "anticommutator"))
            pairs.append(PairAudit(i, j, comm, anti, comm <= tol, anti <= tol))
    return AuditReport(tuple(pairs), all(p.commutes for p in pairs))

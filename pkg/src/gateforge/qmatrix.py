"""Dense complex matrix algebra for one and two spins.

Matrices are plain ``numpy`` complex arrays of shape (2, 2) or (4, 4).
Two-spin objects use the basis order |uu>, |ud>, |du>, |dd> where the
first arrow is the Input spin and the second the Output spin, so the
Input factor is always the left operand of a Kronecker product.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .errors import (
    ConvergenceError,
    DimensionError,
    HermiticityError,
    ShapeError,
    UnitarityError,
)

__all__ = [
    "PAULI",
    "PauliDecomposition",
    "as_qmatrix",
    "basis_state",
    "bracket",
    "eig_normal",
    "fix_column_phases",
    "is_hermitian",
    "is_unitary",
    "jacobi_eigh",
    "matrix_exp_evolution",
    "max_norm",
    "pauli_compose",
    "pauli_decompose",
    "pauli_labels",
    "pauli_matrix",
    "phase_distance",
    "tensor_product",
]

CHECK_TOL = 1e-10
ROUNDTRIP_TOL = 1e-12
PHASE_GRID_POINTS = 4096

PAULI = MappingProxyType(
    {
        "I": np.eye(2, dtype=complex),
        "X": np.array([[0, 1], [1, 0]], dtype=complex),
        "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
        "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    }
)
for _m in PAULI.values():
    _m.flags.writeable = False


def as_qmatrix(m, dims=(2, 4)) -> np.ndarray:
    """Return a complex copy of ``m`` after checking shape and finiteness."""
    arr = np.array(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {arr.shape}")
    if dims is not None and arr.shape[0] not in dims:
        raise DimensionError(f"matrix dimension {arr.shape[0]} not in {tuple(dims)}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


def basis_state(spins: str) -> np.ndarray:
    """Basis ket from a string of ``u``/``d`` (Input first), e.g. ``"ud"``."""
    vec = np.ones(1, dtype=complex)
    for s in spins:
        if s not in "ud":
            raise ValueError(f"spin label must be 'u' or 'd', got {s!r}")
        vec = np.kron(vec, [1, 0] if s == "u" else [0, 1])
    return vec


def max_norm(m) -> float:
    return float(np.max(np.abs(m))) if np.size(m) else 0.0


def _scale(m) -> float:
    return max(1.0, max_norm(m))


def is_hermitian(m, tol: float = CHECK_TOL) -> bool:
    m = np.asarray(m)
    return max_norm(m - m.conj().T) <= tol * _scale(m)


def is_unitary(m, tol: float = CHECK_TOL) -> bool:
    m = np.asarray(m)
    return max_norm(m.conj().T @ m - np.eye(m.shape[0])) <= tol


def _same_dim(a, b):
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")


def tensor_product(a, b) -> np.ndarray:
    """Input (``a``) times Output (``b``): ``(a x b)[2i+k, 2j+l] = a[i,j] b[k,l]``."""
    a = as_qmatrix(a, dims=(2,))
    b = as_qmatrix(b, dims=(2,))
    out = np.zeros((4, 4), dtype=complex)
    for i, j, k, l in itertools.product(range(2), repeat=4):
        out[2 * i + k, 2 * j + l] = a[i, j] * b[k, l]
    return out


def bracket(a, b, kind: str = "commutator") -> np.ndarray:
    """``AB - BA`` for ``kind="commutator"``, ``AB + BA`` for ``"anticommutator"``."""
    a = as_qmatrix(a, dims=None)
    b = as_qmatrix(b, dims=None)
    _same_dim(a, b)
    if kind == "commutator":
        return a @ b - b @ a
    if kind == "anticommutator":
        return a @ b + b @ a
    raise ValueError(f"unknown bracket kind {kind!r}")


# -- Pauli basis ------------------------------------------------------------


def pauli_labels(dim: int) -> list[str]:
    if dim == 2:
        return list("IXYZ")
    if dim == 4:
        return [p + q for p in "IXYZ" for q in "IXYZ"]
    raise DimensionError(f"no Pauli basis for dimension {dim}")


def pauli_matrix(label: str) -> np.ndarray:
    """Matrix of a one- or two-letter Pauli label (first letter = Input)."""
    if len(label) not in (1, 2) or any(c not in PAULI for c in label):
        raise ValueError(f"invalid Pauli label {label!r}")
    if len(label) == 1:
        return PAULI[label].copy()
    return tensor_product(PAULI[label[0]], PAULI[label[1]])


_BASIS_CACHE: dict[int, tuple[list[str], np.ndarray]] = {}


def _basis(dim):
    if dim not in _BASIS_CACHE:
        labels = pauli_labels(dim)
        _BASIS_CACHE[dim] = (labels, np.array([pauli_matrix(l) for l in labels]))
    return _BASIS_CACHE[dim]


@dataclass(frozen=True)
class PauliDecomposition:
    """Coefficients of a matrix over the (tensor-product) Pauli basis.

    ``terms`` only lists non-negligible coefficients, in canonical
    I, X, Y, Z order. Missing labels have coefficient zero.
    """

    dim: int
    terms: Mapping[str, complex]

    def __post_init__(self):
        labels = pauli_labels(self.dim)
        bad = [l for l in self.terms if l not in labels]
        if bad:
            raise DimensionError(f"labels {bad} do not match dimension {self.dim}")
        ordered = {l: self.terms[l] for l in labels if l in self.terms}
        object.__setattr__(self, "terms", MappingProxyType(ordered))

    def coeff(self, label: str) -> complex:
        return self.terms.get(label, 0.0)

    @property
    def is_real(self) -> bool:
        return all(isinstance(c, float) for c in self.terms.values())

    def as_dict(self) -> dict[str, complex]:
        return dict(self.terms)

    def isclose(self, other: "PauliDecomposition", tol: float = ROUNDTRIP_TOL) -> bool:
        if self.dim != other.dim:
            return False
        labels = set(self.terms) | set(other.terms)
        return all(abs(self.coeff(l) - other.coeff(l)) <= tol for l in labels)


def pauli_decompose(h, require_real: bool = False, atol: float = 1e-14) -> PauliDecomposition:
    """Expand ``h`` as sum_a c_a P_a with ``c_a = tr(P_a^dag h) / dim``.

    Hermitian input yields real (``float``) coefficients. Coefficients below
    ``atol * max(1, max|h|)`` are omitted. Raises ``HermiticityError`` when
    ``require_real`` is set and ``h`` is not Hermitian.
    """
    h = as_qmatrix(h)
    dim = h.shape[0]
    hermitian = is_hermitian(h)
    if require_real and not hermitian:
        raise HermiticityError("real Pauli coefficients requested for a non-Hermitian matrix")
    labels, basis = _basis(dim)
    # tr(P^dag h) = sum_ij conj(P_ij) h_ij
    coeffs = np.einsum("aij,ij->a", basis.conj(), h) / dim
    cutoff = atol * _scale(h)
    terms = {}
    for label, c in zip(labels, coeffs):
        if hermitian:
            c = float(c.real)
        else:
            c = complex(c)
        if abs(c) > cutoff:
            terms[label] = c
    return PauliDecomposition(dim, terms)


def pauli_compose(d) -> np.ndarray:
    """Rebuild the matrix from a ``PauliDecomposition`` or a ``{label: coeff}`` map."""
    if isinstance(d, PauliDecomposition):
        dim, terms = d.dim, d.terms
    else:
        terms = dict(d)
        lengths = {len(l) for l in terms}
        if len(lengths) > 1:
            raise DimensionError(f"mixed Pauli label lengths {sorted(lengths)}")
        dim = 2 ** lengths.pop() if lengths else 2
    out = np.zeros((dim, dim), dtype=complex)
    for label, c in terms.items():
        if 2 ** len(label) != dim:
            raise DimensionError(f"label {label!r} does not act on dimension {dim}")
        out += c * pauli_matrix(label)
    return out


# -- exponentials and diagonalization ---------------------------------------


def matrix_exp_evolution(h, duration: float = 1.0, hbar: float = 1.0) -> np.ndarray:
    """``exp(-i h duration / hbar)`` through the eigendecomposition of ``h``."""
    h = as_qmatrix(h, dims=None)
    if duration <= 0 or hbar <= 0:
        raise ValueError("duration and hbar must be positive")
    if not is_hermitian(h):
        raise HermiticityError("evolution generator is not Hermitian")
    return _expm_hermitian(0.5 * (h + h.conj().T), duration / hbar)


def _expm_hermitian(h, factor):
    """exp(-i factor h) for Hermitian ``h``; works on stacks of shape (..., d, d)."""
    w, v = np.linalg.eigh(h)
    phases = np.exp(-1j * factor * w)
    return (v * phases[..., None, :]) @ np.swapaxes(v.conj(), -1, -2)


def jacobi_eigh(a, max_sweeps: int = 60, tol: float = 1e-15):
    """Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Returns ``(w, V)`` with ascending real ``w`` and unitary ``V`` such that
    ``a @ V = V @ diag(w)``.
    """
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=complex)
    scale = max(np.linalg.norm(a), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = math.sqrt(sum(abs(a[p, q]) ** 2 for p in range(n) for q in range(n) if p != q))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                r = abs(a[p, q])
                if r <= 1e-300:
                    continue
                e = a[p, q] / r
                theta = (a[q, q].real - a[p, p].real) / (2.0 * r)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.hypot(t, 1.0)
                s = t * c
                # phase rotation diag(1, conj(e)) makes the pivot real, then a real Jacobi step
                j = np.eye(n, dtype=complex)
                j[p, p] = c
                j[p, q] = s
                j[q, p] = -s * e.conjugate()
                j[q, q] = c * e.conjugate()
                a = j.conj().T @ a @ j
                a[p, q] = a[q, p] = 0.0
                v = v @ j
    else:
        raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")
    w = a.diagonal().real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def _clusters(values, tol):
    groups, current = [], [0]
    for k in range(1, len(values)):
        if values[k] - values[current[-1]] <= tol:
            current.append(k)
        else:
            groups.append(current)
            current = [k]
    groups.append(current)
    return groups


def _refine(subspace, generators, tol, depth=0):
    """Diagonalize ``generators[0]`` on the subspace; recurse on degenerate clusters."""
    if subspace.shape[1] == 1 or not generators:
        return subspace
    g = subspace.conj().T @ generators[0] @ subspace
    w, rot = jacobi_eigh(g)
    rotated = subspace @ rot
    out = []
    for group in _clusters(w, tol):
        block = rotated[:, group]
        if len(group) > 1 and depth < 4:
            block = _refine(block, generators[1:] + generators[:1], tol, depth + 1)
        out.append(block)
    return np.hstack(out)


def _check_normal_input(m):
    if not (is_unitary(m) or is_hermitian(m)):
        raise UnitarityError("eig_normal expects a unitary or Hermitian matrix")


def eig_normal(m, hint: str = "numeric"):
    """Eigenvalues and unitary eigenvector matrix of a unitary or Hermitian matrix.

    ``hint="analytic_simple"`` and ``"analytic_restricted"`` return the
    closed-form eigensystems of the 2x2 NOT and the restricted two-spin NOT
    unitaries (eigenvectors exactly as written there, column phases
    included). ``"numeric"`` diagonalizes the Hermitian part with Jacobi
    rotations and splits degenerate clusters with the anti-Hermitian part.
    """
    m = as_qmatrix(m, dims=None)
    _check_normal_input(m)
    if hint == "analytic_simple":
        return _eig_simple_not(m)
    if hint == "analytic_restricted":
        return _eig_restricted_not(m)
    if hint != "numeric":
        raise ValueError(f"unknown hint {hint!r}")

    herm = 0.5 * (m + m.conj().T)
    anti = (m - m.conj().T) / 2j
    cluster_tol = 1e-2 * _scale(m)
    t = _refine(np.eye(m.shape[0], dtype=complex), [herm, anti], cluster_tol)
    u = np.einsum("ij,ik,kj->j", t.conj(), m, t)
    return u, t


def _require_pattern(m, nonzero, what):
    mask = np.zeros(m.shape, dtype=bool)
    for idx in nonzero:
        mask[idx] = True
    if max_norm(m[~mask]) > CHECK_TOL or np.any(np.abs(np.abs(m[mask]) - 1) > CHECK_TOL):
        raise ShapeError(f"matrix is not a {what} unitary")


def _eig_simple_not(m):
    _require_pattern(m, [(0, 1), (1, 0)], "2x2 NOT")
    alpha, beta = np.angle(m[1, 0]), np.angle(m[0, 1])
    u1 = np.exp(0.5j * (alpha + beta))
    ea, eb = np.exp(0.5j * alpha), np.exp(0.5j * beta)
    t = np.array([[eb, eb], [ea, -ea]]) / math.sqrt(2)
    return np.array([u1, -u1]), t


def _eig_restricted_not(m):
    _require_pattern(m, [(0, 3), (1, 1), (2, 2), (3, 0)], "restricted two-spin NOT")
    alpha, beta = np.angle(m[3, 0]), np.angle(m[0, 3])
    u1 = np.exp(0.5j * (alpha + beta))
    ea, eb = np.exp(0.5j * alpha), np.exp(0.5j * beta)
    r2 = math.sqrt(2)
    t = np.array(
        [
            [eb, eb, 0, 0],
            [0, 0, r2, 0],
            [0, 0, 0, r2],
            [ea, -ea, 0, 0],
        ]
    ) / r2
    u = np.array([u1, -u1, m[1, 1] / abs(m[1, 1]), m[2, 2] / abs(m[2, 2])])
    return u, t


def fix_column_phases(t) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real and positive.

    Ties are broken by the lowest row index.
    """
    t = np.array(t, dtype=complex)
    for j in range(t.shape[1]):
        col = np.abs(t[:, j])
        k = int(np.argmax(col >= col.max() - 1e-12))
        if col[k] > 0:
            t[:, j] *= abs(t[k, j]) / t[k, j]
    return t


# -- phase-insensitive comparison -------------------------------------------


def _phase_gap(a, b, phi):
    phi = np.atleast_1d(phi)
    return np.abs(np.exp(1j * phi)[:, None, None] * a[None] - b[None]).max(axis=(1, 2))


def phase_distance(a, b) -> float:
    """``min_phi max_ij |exp(i phi) a - b|`` for unitary ``a`` and ``b``.

    Seeds the search with the trace-aligned phase ``arg tr(a^dag b)``, scans a
    uniform grid and polishes the best grid point by golden-section search.
    """
    a = as_qmatrix(a, dims=None)
    b = as_qmatrix(b, dims=None)
    _same_dim(a, b)
    if not (is_unitary(a) and is_unitary(b)):
        raise UnitarityError("phase_distance expects unitary matrices")

    candidates = []
    overlap = np.trace(a.conj().T @ b)
    if abs(overlap) > 1e-12:
        candidates.append(float(np.angle(overlap)))
    grid = np.linspace(-math.pi, math.pi, PHASE_GRID_POINTS, endpoint=False)
    gaps = _phase_gap(a, b, grid)
    k = int(np.argmin(gaps))
    step = grid[1] - grid[0]
    candidates.append(_golden_min(lambda x: _phase_gap(a, b, x)[0], grid[k] - step, grid[k] + step))
    candidates.append(grid[k])
    return float(min(_phase_gap(a, b, np.array(candidates))))


def _golden_min(f, lo, hi, iters=90):
    invphi = (math.sqrt(5) - 1) / 2
    c, d = hi - invphi * (hi - lo), lo + invphi * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - invphi * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + invphi * (hi - lo)
            fd = f(d)
    return 0.5 * (lo + hi)

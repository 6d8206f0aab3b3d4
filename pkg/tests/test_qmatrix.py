import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import unitary_group

from gateforge.errors import (
    ConvergenceError,
    DimensionError,
    HermiticityError,
    ShapeError,
    UnitarityError,
)
from gateforge.families import (
    ExtendedRestrictedParams,
    SimpleNotParams,
    build_extended_restricted,
    build_simple_not,
)
from gateforge.qmatrix import (
    PAULI,
    PauliDecomposition,
    basis_state,
    bracket,
    eig_normal,
    fix_column_phases,
    jacobi_eigh,
    matrix_exp_evolution,
    pauli_compose,
    pauli_decompose,
    pauli_labels,
    pauli_matrix,
    phase_distance,
    tensor_product,
)

from conftest import I2, XX, XY, YX, YY, ZZ, X, Y, Z

finite = st.floats(-10, 10, allow_nan=False)


def random_matrix(rng, d=2):
    return rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))


def random_hermitian(rng, d, norm=1.0):
    m = random_matrix(rng, d)
    h = m + m.conj().T
    return norm * h / np.abs(h).max()


# -- tensor products and brackets -----------------------------------------


def test_tensor_product_examples():
    assert np.array_equal(tensor_product(Z, I2), np.diag([1, 1, -1, -1]))
    assert np.array_equal(tensor_product(I2, I2), np.eye(4))
    assert np.array_equal(tensor_product(X, X), np.fliplr(np.eye(4)))


def test_tensor_product_matches_kron(rng):
    for _ in range(20):
        a, b = random_matrix(rng), random_matrix(rng)
        assert np.allclose(tensor_product(a, b), np.kron(a, b), atol=0, rtol=1e-15)


def test_tensor_product_input_is_left_factor():
    # sigma_z on the Input spin flips the sign of |du> and |dd>
    zi = tensor_product(Z, I2)
    assert np.array_equal(zi @ basis_state("du"), -basis_state("du"))
    assert np.array_equal(zi @ basis_state("ud"), basis_state("ud"))


def test_tensor_product_rejects_wrong_dimension():
    with pytest.raises(DimensionError):
        tensor_product(np.eye(4), I2)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_mixed_product_property(seed):
    rng = np.random.default_rng(seed)
    a, b, c, d = (random_matrix(rng) for _ in range(4))
    lhs = tensor_product(a, b) @ tensor_product(c, d)
    rhs = tensor_product(a @ c, b @ d)
    assert np.abs(lhs - rhs).max() <= 1e-12 * max(1, np.abs(rhs).max())


def test_bracket_examples():
    assert np.allclose(bracket(X, Y, "commutator"), 2j * Z, atol=0)
    assert np.array_equal(bracket(XX - YY, XY + YX, "anticommutator"), np.zeros((4, 4)))
    assert np.array_equal(bracket(ZZ, XX - YY, "commutator"), np.zeros((4, 4)))


def test_bracket_errors():
    with pytest.raises(DimensionError):
        bracket(X, XX)
    with pytest.raises(ValueError):
        bracket(X, Y, "lie")


# -- Pauli decomposition ---------------------------------------------------


def test_pauli_basis_orthogonality():
    for dim in (2, 4):
        mats = [pauli_matrix(l) for l in pauli_labels(dim)]
        gram = np.array([[np.trace(a.conj().T @ b) for b in mats] for a in mats])
        assert np.allclose(gram, dim * np.eye(dim * dim), atol=0)


def test_pauli_decompose_examples():
    assert pauli_decompose(X).as_dict() == {"X": 1.0}
    assert pauli_decompose(np.eye(4)).as_dict() == {"II": 1.0}
    h = -1.0 * ZZ - math.pi / 4 * (XX - YY)
    d = pauli_decompose(h).as_dict()
    assert set(d) == {"ZZ", "XX", "YY"}
    assert d["ZZ"] == pytest.approx(-1.0, abs=1e-15)
    assert d["XX"] == pytest.approx(-math.pi / 4, abs=1e-15)
    assert d["YY"] == pytest.approx(math.pi / 4, abs=1e-15)


def test_pauli_decompose_real_for_hermitian(rng):
    d = pauli_decompose(random_hermitian(rng, 4, 5.0))
    assert d.is_real


def test_pauli_decompose_non_hermitian():
    m = np.array([[0, 1], [0, 0]], dtype=complex)
    d = pauli_decompose(m)
    assert d.coeff("X") == pytest.approx(0.5)
    assert d.coeff("Y") == pytest.approx(0.5j)
    with pytest.raises(HermiticityError):
        pauli_decompose(m, require_real=True)


def test_pauli_compose_examples():
    assert np.array_equal(pauli_compose({"X": 1.0}), X)
    assert np.array_equal(pauli_compose({"II": 2.5}), 2.5 * np.eye(4))
    target = -1.0 * ZZ - math.pi / 4 * (XX - YY)
    d = {"ZZ": -1.0, "XX": -math.pi / 4, "YY": math.pi / 4}
    assert np.abs(pauli_compose(d) - target).max() <= 1e-15
    assert pauli_decompose(pauli_compose(d)).isclose(PauliDecomposition(4, d))


def test_pauli_compose_rejects_mixed_labels():
    with pytest.raises(DimensionError):
        pauli_compose({"X": 1.0, "XX": 1.0})
    with pytest.raises(DimensionError):
        PauliDecomposition(2, {"XX": 1.0})


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 4]))
def test_pauli_roundtrips(seed, dim):
    rng = np.random.default_rng(seed)
    m = random_matrix(rng, dim) * 3
    assert np.abs(pauli_compose(pauli_decompose(m)) - m).max() <= 1e-12
    labels = pauli_labels(dim)
    d = PauliDecomposition(dim, {l: float(c) for l, c in zip(labels, rng.normal(size=dim * dim))})
    assert pauli_decompose(pauli_compose(d)).isclose(d, 1e-12)


# -- exponentials -----------------------------------------------------------


def test_matrix_exp_examples():
    assert np.abs(matrix_exp_evolution(-math.pi / 2 * X) - 1j * X).max() <= 1e-15
    assert np.array_equal(matrix_exp_evolution(np.zeros((2, 2))), np.eye(2))
    u = matrix_exp_evolution(math.pi / 2 * (I2 - X))
    assert np.abs(u - X).max() <= 1e-15


def test_matrix_exp_closed_form_rotation(rng):
    for theta in rng.uniform(-5, 5, size=10):
        expected = math.cos(theta) * I2 + 1j * math.sin(theta) * X
        assert np.abs(matrix_exp_evolution(-theta * X) - expected).max() <= 1e-14


def test_matrix_exp_matches_scipy(rng):
    for _ in range(20):
        h = random_hermitian(rng, 4, 10.0)
        duration, hbar = rng.uniform(0.1, 2, size=2)
        ref = scipy.linalg.expm(-1j * h * duration / hbar)
        assert np.abs(matrix_exp_evolution(h, duration, hbar) - ref).max() <= 1e-12


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 4]), st.floats(0, 100))
def test_matrix_exp_unitary(seed, dim, norm):
    h = random_hermitian(np.random.default_rng(seed), dim, norm)
    u = matrix_exp_evolution(h)
    assert np.abs(u.conj().T @ u - np.eye(dim)).max() <= 1e-12


def test_matrix_exp_rejects_bad_input():
    with pytest.raises(HermiticityError):
        matrix_exp_evolution(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValueError):
        matrix_exp_evolution(X, duration=0)


# -- diagonalization ----------------------------------------------------------


def test_jacobi_matches_numpy(rng):
    for d in (2, 3, 4):
        h = random_hermitian(rng, d, 3.0)
        w, v = jacobi_eigh(h)
        assert np.allclose(w, np.linalg.eigvalsh(h), atol=1e-13)
        assert np.abs(h @ v - v * w).max() <= 1e-13
        assert np.abs(v.conj().T @ v - np.eye(d)).max() <= 1e-13


def test_jacobi_budget_exhaustion():
    h = np.array([[1, 0.5], [0.5, 2]], dtype=complex)
    with pytest.raises(ConvergenceError):
        jacobi_eigh(h, max_sweeps=0)


def test_eig_normal_simple_not():
    u = build_simple_not(SimpleNotParams(0.3, 0.7))
    vals, t = eig_normal(u, hint="analytic_simple")
    assert np.allclose(vals, [np.exp(0.5j), -np.exp(0.5j)], atol=1e-15)
    vals_n, _ = eig_normal(u)
    assert np.allclose(sorted(vals_n, key=np.angle), sorted(vals, key=np.angle), atol=1e-12)


def test_eig_normal_restricted_not():
    u = build_extended_restricted(ExtendedRestrictedParams(0, 0, math.pi / 2, math.pi))
    for hint in ("analytic_restricted", "numeric"):
        vals, t = eig_normal(u, hint=hint)
        assert np.abs(u @ t - t * vals).max() <= 1e-12
        assert sorted(np.round(vals, 12).tolist(), key=lambda z: (z.real, z.imag)) == [-1, -1, 1j, 1]


def test_eig_normal_identity():
    vals, t = eig_normal(np.eye(4))
    assert np.array_equal(vals, np.ones(4))
    assert np.array_equal(t, np.eye(4))


def test_eig_normal_rejects():
    with pytest.raises(UnitarityError):
        eig_normal(np.array([[1, 1], [0, 1]]))
    with pytest.raises(ShapeError):
        eig_normal(np.eye(2), hint="analytic_simple")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 4]), st.booleans())
def test_eig_normal_reconstruction(seed, dim, hermitian):
    rng = np.random.default_rng(seed)
    if hermitian:
        m = random_hermitian(rng, dim, 4.0)
    else:
        m = unitary_group.rvs(dim, random_state=rng)
    vals, t = eig_normal(m)
    assert np.abs(m - t @ np.diag(vals) @ t.conj().T).max() <= 1e-10
    assert np.abs(t.conj().T @ t - np.eye(dim)).max() <= 1e-10


def test_eig_normal_degenerate_unitaries(rng):
    # conjugate pairs share a Hermitian part; the anti-Hermitian part must split them
    for eps in (0.0, 1e-12, 1e-8, 1e-5, 1e-3):
        v = unitary_group.rvs(4, random_state=rng)
        a = rng.uniform(0.2, 2.9)
        m = v @ np.diag(np.exp(1j * np.array([a, -a - eps, a, 2.0]))) @ v.conj().T
        vals, t = eig_normal(m)
        assert np.abs(m @ t - t * vals).max() <= 1e-10


def test_fix_column_phases():
    t = np.array([[1j, 0.3], [0.2, -1]]) / 1.0
    fixed = fix_column_phases(t)
    assert fixed[0, 0] == pytest.approx(1.0)
    assert fixed[1, 1] == pytest.approx(1.0)
    assert np.allclose(np.abs(fixed), np.abs(t))


# -- global phase comparison --------------------------------------------------


def test_phase_distance_examples():
    assert phase_distance(1j * X, X) <= 1e-15
    assert phase_distance(X, X) == 0.0
    # fine-grid scan oracle: every entry of exp(i phi) X - Z has modulus 1
    assert phase_distance(X, Z) == pytest.approx(1.0, abs=1e-12)


def test_phase_distance_is_min_max_entry():
    # scan oracle gives 2 sin(pi/8) at phi = -pi/4
    a = np.diag([1, 1j])
    assert phase_distance(a, I2) == pytest.approx(2 * math.sin(math.pi / 8), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), finite, finite)
def test_phase_distance_symmetry_and_invariance(seed, p, q):
    rng = np.random.default_rng(seed)
    a = unitary_group.rvs(4, random_state=rng)
    b = unitary_group.rvs(4, random_state=rng)
    d = phase_distance(a, b)
    assert d >= 0
    assert phase_distance(b, a) == pytest.approx(d, abs=1e-12)
    assert phase_distance(np.exp(1j * p) * a, np.exp(1j * q) * b) == pytest.approx(d, abs=1e-12)
    assert phase_distance(np.exp(1j * p) * a, a) <= 1e-12


def test_phase_distance_rejects():
    with pytest.raises(UnitarityError):
        phase_distance(2 * X, X)
    with pytest.raises(DimensionError):
        phase_distance(X, XX)


def test_pauli_table_is_read_only():
    with pytest.raises(ValueError):
        PAULI["X"][0, 0] = 5

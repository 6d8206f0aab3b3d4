import numpy as np
import pytest

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)


def kron(a, b):
    return np.kron(a, b)


XX, YY, ZZ = kron(X, X), kron(Y, Y), kron(Z, Z)
XY, YX = kron(X, Y), kron(Y, X)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)

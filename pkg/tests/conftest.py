import numpy as np
import pytest


def dag(a):
    return np.conj(a.T)


def rand_complex(rng, n):
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


def rand_hermitian(rng, n, scale=1.0):
    a = rand_complex(rng, n)
    return scale * (a + dag(a)) / 2


def rand_anti(rng, n, scale=1.0):
    a = rand_complex(rng, n)
    return scale * (a - dag(a)) / 2


def rand_faithful(rng, n, floor=0.2):
    a = rand_complex(rng, n)
    rho = a @ dag(a)
    rho = rho / np.trace(rho).real + floor * np.eye(n)
    return (rho + dag(rho)) / 2


def rand_invertible(rng, n, shift=1.5):
    return rand_complex(rng, n) + shift * np.eye(n)


def rand_unitary(rng, n):
    q, r = np.linalg.qr(rand_complex(rng, n))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def rand_lowrank(rng, n, rank):
    a = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    b = rng.normal(size=(rank, n)) + 1j * rng.normal(size=(rank, n))
    return a @ b


# dense superoperator oracles; vec is row-major, so vec(A X B) = kron(A, B^T) vec(X)

def left_mult(b):
    return np.kron(b, np.eye(b.shape[0]))


def right_mult(b):
    return np.kron(np.eye(b.shape[0]), b.T)


def apply_dense(superop, x):
    n = x.shape[0]
    return (superop @ x.reshape(-1)).reshape(n, n)


def dense_matfun(superop, phi):
    """phi of a diagonalizable dense superoperator via np.linalg.eig."""
    vals, vecs = np.linalg.eig(superop)
    return (vecs * phi(vals)) @ np.linalg.inv(vecs)


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)

"""Dense Hermitian linear algebra for small complex matrices.

Eigendecompositions, spectral functions of Hermitian operators, and the
paired-frame decomposition of a square matrix into singular values with
left/right orthonormal frames and its polar phase.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NonHermitianInput

TOL_HERM = 1e-10
TOL_PSD = 1e-10
TOL_REC = 1e-9
RANK_EPS_FACTOR = 1e-12


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(a.T)


def as_complex_matrix(a) -> np.ndarray:
    """Coerce to a finite square complex array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def herm_defect(a: np.ndarray) -> float:
    """Relative deviation of A from A = A^dagger."""
    a = np.asarray(a)
    scale = max(1.0, float(np.linalg.norm(a)))
    return float(np.linalg.norm(a - dagger(a))) / scale


def require_hermitian(a, tol: float = TOL_HERM) -> np.ndarray:
    m = as_complex_matrix(a)
    d = herm_defect(m)
    if d > tol:
        raise NonHermitianInput(
            f"matrix deviates from Hermitian symmetry by {d:.3e} (tol {tol:.1e})"
        )
    return m


def require_density(rho, tol: float = TOL_PSD) -> np.ndarray:
    """Validate a positive semidefinite Hermitian matrix with positive trace."""
    m = require_hermitian(rho, tol)
    vals = np.linalg.eigvalsh((m + dagger(m)) / 2)
    scale = max(1.0, float(vals[-1]))
    if vals[0] < -tol * scale:
        raise DomainError(f"matrix has negative eigenvalue {vals[0]:.3e}")
    if float(np.trace(m).real) <= 0:
        raise DomainError("density operator must have positive trace")
    return m


def eig_hermitian(a, tol: float = TOL_HERM):
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(vals, vecs)`` with eigenvalues in descending order and
    orthonormal eigenvectors as columns, so that
    ``a = vecs @ diag(vals) @ vecs.conj().T``.
    """
    m = require_hermitian(a, tol)
    vals, vecs = np.linalg.eigh((m + dagger(m)) / 2)
    return vals[::-1].copy(), vecs[:, ::-1].copy()


def matfun(a, phi, tol: float = TOL_HERM) -> np.ndarray:
    """Apply a scalar map to a Hermitian matrix through its spectrum.

    Computes ``U diag(phi(e)) U^dagger`` from ``a = U diag(e) U^dagger``.
    Raises ``DomainError`` if ``phi`` is undefined (NaN/Inf) at an eigenvalue.
    """
    vals, vecs = eig_hermitian(a, tol)
    with np.errstate(invalid="ignore", divide="ignore"):
        mapped = np.asarray(phi(vals))
    if mapped.shape != vals.shape:
        raise ValueError("scalar map must return one value per eigenvalue")
    if not np.all(np.isfinite(mapped)):
        bad = vals[~np.isfinite(np.asarray(mapped, dtype=complex).real)]
        raise DomainError(f"scalar map undefined at eigenvalue(s) {bad}")
    out = (vecs * mapped) @ dagger(vecs)
    if np.isrealobj(mapped) or np.allclose(np.asarray(mapped, dtype=complex).imag, 0.0):
        out = (out + dagger(out)) / 2
    return out


def sqrtm_psd(a, tol: float = TOL_PSD) -> np.ndarray:
    """Hermitian square root of a positive semidefinite matrix.

    Eigenvalues in ``(-tol*scale, 0)`` are clipped to zero; anything more
    negative raises ``DomainError``.
    """
    vals, vecs = eig_hermitian(a)
    scale = max(1.0, float(vals[0]))
    if vals[-1] < -tol * scale:
        raise DomainError(f"matrix is not PSD: eigenvalue {vals[-1]:.3e}")
    vals = np.clip(vals, 0.0, None)
    out = (vecs * np.sqrt(vals)) @ dagger(vecs)
    return (out + dagger(out)) / 2


def rank_eps(lambdas: np.ndarray, dim: int) -> float:
    """Spectral cutoff below which eigenvalues count as zero: n * max * 1e-12."""
    top = float(lambdas[0]) if len(lambdas) else 0.0
    return dim * max(top, 0.0) * RANK_EPS_FACTOR


@dataclass(frozen=True)
class SchmidtData:
    """Paired-frame data of a square matrix w.

    ``w = sum_k sqrt(lambdas[k]) |left[:,k]><right[:,k]|`` with orthonormal
    frames, ``lambdas`` the nonzero eigenvalues of ``w w^dagger`` in
    descending order, and ``phase`` the partial isometry of the polar
    split ``w = sqrt(w w^dagger) phase``.  ``left_full``/``right_full``
    carry an (arbitrary) orthonormal completion of the frames.
    """

    lambdas: np.ndarray
    left: np.ndarray
    right: np.ndarray
    rank: int
    phase: np.ndarray
    left_full: np.ndarray
    right_full: np.ndarray

    @property
    def dim(self) -> int:
        return self.left_full.shape[0]

    @property
    def lambdas_full(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[: self.rank] = self.lambdas
        return out

    def reconstruct(self) -> np.ndarray:
        return (self.left * np.sqrt(self.lambdas)) @ dagger(self.right)


def schmidt_decompose(w) -> SchmidtData:
    """Decompose w into weights, paired orthonormal frames, rank, and phase.

    The right frame is the one forced by the pairing
    ``right[:,k] = w^dagger left[:,k] / sqrt(lambdas[k])``.  A zero matrix
    yields rank 0 with an all-zero phase.
    """
    m = as_complex_matrix(w)
    u, s, vh = np.linalg.svd(m)
    lam = s**2
    eps = rank_eps(lam, m.shape[0])
    rank = int(np.sum(lam > eps))
    left = u[:, :rank]
    right = dagger(vh)[:, :rank]
    phase = left @ dagger(right)
    return SchmidtData(
        lambdas=lam[:rank].copy(),
        left=left.copy(),
        right=right.copy(),
        rank=rank,
        phase=phase,
        left_full=u,
        right_full=dagger(vh),
    )

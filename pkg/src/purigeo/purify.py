"""Purification space and its superoperator calculus.

A density operator rho lifts to any square matrix w with w w^dagger = rho;
the space of such lifts carries the Hilbert-Schmidt product.  This module
provides the two projections, the pushforward of lift tangents to state
tangents, the modular conjugation, spectral calculus for functions of the
left/right multiplication ratios (including the modular ratio), and the
metric-modified antilinear involution whose fixed points are the
horizontal tangents of a modified Hermitian product.
"""

import enum

import numpy as np

from .errors import DomainError, MissingBoundaryValue, RankDeficient
from .matcore import SchmidtData, as_complex_matrix, dagger, schmidt_decompose


class PurificationVector:
    """Square complex matrix viewed as a vector of the purification space.

    Caches its paired-frame decomposition; all operations treat the value
    as immutable.
    """

    def __init__(self, matrix):
        self.matrix = as_complex_matrix(matrix)
        self._schmidt = None

    @property
    def schmidt(self) -> SchmidtData:
        if self._schmidt is None:
            self._schmidt = schmidt_decompose(self.matrix)
        return self._schmidt

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def rank(self) -> int:
        return self.schmidt.rank

    @property
    def is_invertible(self) -> bool:
        return self.rank == self.dim

    def inverse(self) -> np.ndarray:
        """Inverse through the paired frames; raises at rank deficiency."""
        sd = self.schmidt
        if sd.rank < self.dim:
            raise RankDeficient("purification vector is not invertible")
        return (sd.right / np.sqrt(sd.lambdas)) @ dagger(sd.left)

    def condition_number(self) -> float:
        sd = self.schmidt
        if sd.rank == 0:
            return np.inf
        return float(np.sqrt(sd.lambdas[0] / sd.lambdas[sd.rank - 1]))


def as_purification(w) -> PurificationVector:
    return w if isinstance(w, PurificationVector) else PurificationVector(w)


def project(w) -> np.ndarray:
    """State of the lift: w w^dagger."""
    m = as_purification(w).matrix
    return m @ dagger(m)


def coproject(w) -> np.ndarray:
    """Partner state on the auxiliary factor: w^dagger w."""
    m = as_purification(w).matrix
    return dagger(m) @ m


def pushforward(w, x) -> np.ndarray:
    """State tangent of a lift tangent: xi = x w^dagger + w x^dagger."""
    m = as_purification(w).matrix
    x = as_complex_matrix(x)
    return x @ dagger(m) + m @ dagger(x)


def modular_conjugate(w, x) -> np.ndarray:
    """Antilinear conjugation J x = v x^dagger v with v the polar phase of w."""
    v = as_purification(w).schmidt.phase
    return v @ dagger(as_complex_matrix(x)) @ v


class SuperopKind(enum.Enum):
    """Which multiplication-ratio operator a scalar map is applied to.

    The two plain kinds act in the left frame of w, the tilde kinds in the
    right frame, and the modular kinds mix both frames.
    """

    L_OVER_R = "l_over_r"
    R_OVER_L = "r_over_l"
    DELTA = "delta"
    DELTA_INV = "delta_inv"
    LTILDE_OVER_RTILDE = "ltilde_over_rtilde"
    RTILDE_OVER_LTILDE = "rtilde_over_ltilde"


_INVERSE_KINDS = {SuperopKind.R_OVER_L, SuperopKind.DELTA_INV, SuperopKind.RTILDE_OVER_LTILDE}


def _ratio_coefficients(fn, lams: np.ndarray, rank: int) -> np.ndarray:
    """Matrix of fn(lams[j]/lams[k]) with the boundary conventions.

    Entries with a zero denominator but positive numerator take the
    declared limit at infinity; entries where both weights vanish take
    fn(1); a zero numerator against a positive denominator takes the
    declared limit at zero.
    """
    n = len(lams)
    coeff = np.empty((n, n), dtype=float)
    if rank > 0:
        lp = lams[:rank]
        coeff[:rank, :rank] = fn(lp[:, None] / lp[None, :])
    coeff[rank:, rank:] = float(fn(np.asarray(1.0)))
    if 0 < rank < n:
        label = getattr(fn, "name", "") or "function"
        at_inf = getattr(fn, "at_inf", None)
        if at_inf is None:
            raise MissingBoundaryValue(
                f"{label}: zero eigenvalue requires a declared limit at infinity"
            )
        if not np.isfinite(at_inf):
            raise DomainError(
                f"{label}: infinite limit at infinity triggered by a zero eigenvalue pair"
            )
        coeff[:rank, rank:] = at_inf
        at_zero = getattr(fn, "at_zero", None)
        if at_zero is None:
            raise MissingBoundaryValue(
                f"{label}: zero eigenvalue requires a declared limit at zero"
            )
        if not np.isfinite(at_zero):
            raise DomainError(
                f"{label}: infinite limit at zero triggered by a zero eigenvalue pair"
            )
        coeff[rank:, :rank] = at_zero
    if not np.all(np.isfinite(coeff)):
        raise DomainError("scalar map produced non-finite superoperator coefficients")
    return coeff


def superop_apply(fn, kind: SuperopKind, w, x) -> np.ndarray:
    """Apply a scalar function of a multiplication-ratio operator to x.

    The action is diagonal on the rank-one frame products of w; the
    eigenvalue on the (j, k) frame pair is fn evaluated at the spectral
    ratio, with declared endpoint limits filling in where the state has
    zero eigenvalues.
    """
    pv = as_purification(w)
    x = as_complex_matrix(x)
    sd = pv.schmidt
    lams = sd.lambdas_full
    coeff = _ratio_coefficients(fn, lams, sd.rank)
    if kind in _INVERSE_KINDS:
        coeff = coeff.T
    if kind in (SuperopKind.DELTA, SuperopKind.DELTA_INV):
        lf, rf = sd.left_full, sd.right_full
    elif kind in (SuperopKind.L_OVER_R, SuperopKind.R_OVER_L):
        lf = rf = sd.left_full
    else:
        lf = rf = sd.right_full
    comps = dagger(lf) @ x @ rf
    return lf @ (coeff * comps) @ dagger(rf)


def _modified_frame_data(k, w):
    pv = as_purification(w)
    if not pv.is_invertible:
        raise RankDeficient("modified involution operators need an invertible base point")
    sd = pv.schmidt
    ratios = sd.lambdas[:, None] / sd.lambdas[None, :]
    kr = k(ratios)
    return pv, sd, ratios, kr / kr.T


def tomita_modified(k, w, x) -> np.ndarray:
    """Action of the metric-modified antilinear involution on x.

    For k = 1 this is the plain involution (conjugation composed with the
    square root of the modular ratio); its fixed points at an invertible
    base point are exactly the tangents k(Delta)(g w) with Hermitian g.
    """
    _, sd, ratios, mod = _modified_frame_data(k, w)
    comps = dagger(sd.left_full) @ as_complex_matrix(x) @ sd.right_full
    out = mod * np.sqrt(1.0 / ratios) * np.conj(comps).T
    return sd.left_full @ out @ dagger(sd.right_full)


def tomita_delta(k, w, x) -> np.ndarray:
    """Modulus-squared part of the modified involution applied to x.

    Depends on k only through the ratio k(t)/k(1/t); for the canonical
    choice k(t)/k(1/t) = t it degenerates to the identity.
    """
    _, sd, ratios, mod = _modified_frame_data(k, w)
    comps = dagger(sd.left_full) @ as_complex_matrix(x) @ sd.right_full
    out = (ratios / mod) * comps
    return sd.left_full @ out @ dagger(sd.right_full)


def tomita_conjugation(k, w, x) -> np.ndarray:
    """Antiunitary part of the modified involution applied to x."""
    _, sd, ratios, mod = _modified_frame_data(k, w)
    comps = dagger(sd.left_full) @ as_complex_matrix(x) @ sd.right_full
    out = np.sqrt(mod) * np.conj(comps).T
    return sd.left_full @ out @ dagger(sd.right_full)

"""Vertical/horizontal geometry of lift tangents.

The gauge group acts on lifts by right multiplication with unitaries; a
connection form assigns to each tangent an anti-Hermitian gauge-algebra
value, splitting tangents into vertical and horizontal parts.  The
orthogonality split of the plain Hilbert-Schmidt product works at any
rank; the general F-indexed family needs an invertible base point.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import BasePointMismatch, RankDeficient, UnsolvableSupport
from .funzoo import ConnectionFunction
from .matcore import (
    as_complex_matrix,
    dagger,
    eig_hermitian,
    rank_eps,
    require_hermitian,
)
from .purify import SuperopKind, as_purification, pushforward, superop_apply

COND_WARN = 1e8


@dataclass(frozen=True)
class BuresSplit:
    """Orthogonal split x = g w + neutral + w a of a lift tangent.

    ``g`` is Hermitian (horizontal part), ``a`` anti-Hermitian (gauge
    part), and ``neutral`` is killed by w on both sides; g and a carry the
    minimal-support representative (zero on the null-frame block).
    """

    g: np.ndarray
    a: np.ndarray
    neutral: np.ndarray


def _sylvester(rho: np.ndarray, rhs: np.ndarray):
    """Minimal-support solution y of rho y + y rho = rhs in rho's eigenbasis.

    Returns (y, leftover) where leftover is the norm of the rhs components
    on the joint null block, which the solution cannot reproduce.
    """
    lam, u = eig_hermitian(rho)
    eps = rank_eps(lam, len(lam))
    comps = dagger(u) @ rhs @ u
    sums = lam[:, None] + lam[None, :]
    solvable = sums > eps
    y = np.where(solvable, comps / np.where(solvable, sums, 1.0), 0.0)
    leftover = float(np.linalg.norm(comps[~solvable]))
    return u @ y @ dagger(u), leftover


def sylvester_solve(rho, xi, tol: float = 1e-9) -> np.ndarray:
    """Solve rho g + g rho = xi for Hermitian g, minimal support.

    Requires xi to carry no weight on the null space of rho beyond
    ``tol`` (relative); the solution is zeroed on the joint null block.
    """
    rho = require_hermitian(rho)
    xi = require_hermitian(xi)
    g, leftover = _sylvester(rho, xi)
    if leftover > tol * max(1.0, float(np.linalg.norm(xi))):
        raise UnsolvableSupport(
            f"tangent has weight {leftover:.3e} on the null space of the state"
        )
    return (g + dagger(g)) / 2


def bures_decompose(w, x) -> BuresSplit:
    """Split a tangent at any rank into horizontal, neutral, and gauge parts.

    g solves rho g + g rho = pushforward(w, x) with rho = w w^dagger;
    a solves rho' a + a rho' = w^dagger x - x^dagger w with rho' = w^dagger w.
    """
    pv = as_purification(w)
    x = as_complex_matrix(x)
    m = pv.matrix
    xi = pushforward(pv, x)
    g, _ = _sylvester(m @ dagger(m), xi)
    g = (g + dagger(g)) / 2
    c = dagger(m) @ x - dagger(x) @ m
    a, _ = _sylvester(dagger(m) @ m, c)
    a = (a - dagger(a)) / 2
    neutral = x - g @ m - m @ a
    return BuresSplit(g=g, a=a, neutral=neutral)


def _inverse(pv, warn: bool = True) -> np.ndarray:
    cond = pv.condition_number()
    if warn and cond > COND_WARN:
        warnings.warn(
            f"inverting a lift with condition number {cond:.2e}", RuntimeWarning, stacklevel=3
        )
    return pv.inverse()


def connection_eval(conn: ConnectionFunction, w, x) -> np.ndarray:
    """Value of the F-indexed connection form on the tangent x at w.

    At an invertible base point:  a = (m - m^dagger)/2 + F(ratio)(m + m^dagger)/2
    with m = w^(-1) x and the ratio operator acting in the right frame.
    Rank-deficient base points are served only by the Bures choice of F,
    via the orthogonality split.
    """
    pv = as_purification(w)
    x = as_complex_matrix(x)
    if not pv.is_invertible:
        if conn.name == "bures":
            return bures_decompose(pv, x).a
        raise RankDeficient(
            f"connection {conn.name or '?'} is only defined at invertible lifts"
        )
    m = _inverse(pv) @ x
    sym = (m + dagger(m)) / 2
    a = (m - dagger(m)) / 2 + superop_apply(conn, SuperopKind.LTILDE_OVER_RTILDE, pv, sym)
    return (a - dagger(a)) / 2


def vertical_part(conn: ConnectionFunction, w, x) -> np.ndarray:
    """Gauge-direction component w a(x) of the tangent x."""
    pv = as_purification(w)
    if not pv.is_invertible:
        raise RankDeficient("vertical/horizontal split needs an invertible lift")
    return pv.matrix @ connection_eval(conn, pv, x)


def horizontal_part(conn: ConnectionFunction, w, x) -> np.ndarray:
    """Component of x annihilated by the connection form."""
    return as_complex_matrix(x) - vertical_part(conn, w, x)


def horizontal_lift(conn: ConnectionFunction, w, xi, at=None, tol: float = 1e-9) -> np.ndarray:
    """Unique horizontal tangent at w pushing forward to the state tangent xi:

    x_hor = (r(R/L) xi) (w^dagger)^(-1).
    """
    pv = as_purification(w)
    xi = require_hermitian(xi)
    if not pv.is_invertible:
        raise RankDeficient("horizontal lift needs an invertible lift point")
    if at is not None:
        target = as_complex_matrix(at)
        gap = float(np.linalg.norm(pv.matrix @ dagger(pv.matrix) - target))
        if gap > tol * max(1.0, float(np.linalg.norm(target))):
            raise BasePointMismatch(
                f"lift projects {gap:.3e} away from the declared base state"
            )
    weighted = superop_apply(conn.r, SuperopKind.R_OVER_L, pv, xi)
    return weighted @ dagger(_inverse(pv))


def tangent_split(rho, xi, cluster_tol: float = 1e-8):
    """Split a state tangent into the part commuting with rho and the rest.

    The commuting part keeps the diagonal blocks of xi over rho's
    eigenvalue clusters; the remainder is a commutator i[b, rho] for some
    Hermitian b.  Returns (xi_par, xi_perp).
    """
    rho = require_hermitian(rho)
    xi = require_hermitian(xi)
    lam, u = eig_hermitian(rho)
    scale = max(1.0, float(lam[0]))
    same = np.abs(lam[:, None] - lam[None, :]) <= cluster_tol * scale
    comps = dagger(u) @ xi @ u
    par = u @ np.where(same, comps, 0.0) @ dagger(u)
    par = (par + dagger(par)) / 2
    return par, xi - par

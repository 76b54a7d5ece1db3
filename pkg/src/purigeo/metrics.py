"""Metric evaluation on states and on the purification space.

State-space inner products take Hermitian tangents; Hermitian-valued forms
are conjugate-linear in their first tangent argument, matching the
Hilbert-Schmidt convention.  All faithful-only forms raise
``RankDeficient`` at singular states; the orthogonality-split form
(``bures_inner``) works at any rank under the usual support condition.
"""

from dataclasses import dataclass

import numpy as np

from .connect import horizontal_lift, sylvester_solve
from .errors import RankDeficient
from .funzoo import MetricFunction, reciprocal, rF_from_k
from .matcore import dagger, eig_hermitian, rank_eps, require_hermitian, sqrtm_psd
from .purify import SuperopKind, as_purification, superop_apply


@dataclass(frozen=True)
class MetricReport:
    """Evaluated metric value with its identifying label."""

    metric_id: str
    hermitian_value: complex
    real_value: float


def _eigframe_components(rho, eta, xi):
    rho = require_hermitian(rho)
    eta = require_hermitian(eta)
    xi = require_hermitian(xi)
    lam, u = eig_hermitian(rho)
    return lam, dagger(u) @ eta @ u, dagger(u) @ xi @ u


def _require_faithful(lam, what: str):
    eps = rank_eps(lam, len(lam))
    if lam[-1] <= eps:
        raise RankDeficient(f"{what} needs a faithful (invertible) state")


def bures_inner(rho, xi1, xi2, tol: float = 1e-9) -> float:
    """Riemannian product whose horizontal lifts are HS-orthogonal to fibers:

    (xi2, xi1) = 1/2 Tr xi2 g1  with  rho g1 + g1 rho = xi1.
    """
    g1 = sylvester_solve(rho, xi1, tol)
    xi2 = require_hermitian(xi2)
    return float(np.trace(xi2 @ g1).real) / 2


def canonical_inner(rho, eta, xi) -> float:
    """Anticommutator product (eta, xi) = 1/8 Tr (eta xi + xi eta) rho^(-1).

    Evaluated in the eigenbasis of rho; tangents must carry no weight
    touching the null space.
    """
    lam, ec, xc = _eigframe_components(rho, eta, xi)
    eps = rank_eps(lam, len(lam))
    alive = lam > eps
    dead = ~np.outer(alive, alive)
    weight = max(float(np.linalg.norm(ec[dead])), float(np.linalg.norm(xc[dead])))
    if weight > 1e-9 * max(1.0, float(np.linalg.norm(xc)), float(np.linalg.norm(ec))):
        raise RankDeficient("tangent weight touches the null space of the state")
    inv = np.where(alive, 1.0 / np.where(alive, lam, 1.0), 0.0)
    val = np.sum((ec @ xc + xc @ ec).diagonal() * inv) / 8
    return float(val.real)


def monotone_inner(f, rho, eta, xi) -> complex:
    """Hermitian product indexed by a positive function f:

    (eta, xi) = 1/4 sum_jk conj(eta_jk) xi_jk / (lam_k f(lam_j/lam_k))

    in the eigenbasis of rho.  Symmetric in (eta, xi) exactly when f is
    selftransposed.
    """
    lam, ec, xc = _eigframe_components(rho, eta, xi)
    _require_faithful(lam, "monotone metric")
    denom = lam[None, :] * f(lam[:, None] / lam[None, :])
    return complex(np.sum(np.conj(ec) * xc / denom) / 4)


def purification_inner(k: MetricFunction, w, x1, x2) -> complex:
    """Modified Hermitian product on lift tangents: (x1, k(Delta)^(-1) x2).

    Conjugate-linear in x1.  Positive definite at invertible lifts only,
    which is therefore required.
    """
    pv = as_purification(w)
    if not pv.is_invertible:
        raise RankDeficient("modified purification metric needs an invertible lift")
    weighted = superop_apply(reciprocal(k), SuperopKind.DELTA, pv, x2)
    return complex(np.trace(dagger(np.asarray(x1, dtype=complex)) @ weighted))


def induced_inner(k: MetricFunction, rho, eta, xi) -> complex:
    """State metric induced by lifting through the k-compatible connection,
    in closed form:

    (eta, xi) = Tr eta [ R k(L/R) / (R k(L/R) + L k(R/L))^2 ] xi.
    """
    lam, ec, xc = _eigframe_components(rho, eta, xi)
    _require_faithful(lam, "induced metric")
    ratio = lam[:, None] / lam[None, :]
    num = lam[None, :] * k(ratio)
    den = (num + lam[:, None] * k(1.0 / ratio)) ** 2
    return complex(np.sum(np.conj(ec) * xc * num / den))


def induced_inner_lifted(k: MetricFunction, rho, eta, xi) -> complex:
    """Same value computed the long way: horizontally lift both tangents at
    w = sqrt(rho) with the connection induced by k, then evaluate the
    modified product on the lifts."""
    rho = require_hermitian(rho)
    w = as_purification(sqrtm_psd(rho))
    _, F = rF_from_k(k)
    y_hor = horizontal_lift(F, w, eta, at=rho)
    x_hor = horizontal_lift(F, w, xi, at=rho)
    return purification_inner(k, w, y_hor, x_hor)

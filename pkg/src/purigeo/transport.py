"""Horizontal transport along curves of density operators.

Generic transport integrates the phase equation of the polar split
w_t = sqrt(rho_t) v_t with fixed-step RK4 and per-step reprojection of the
phase onto the partial isometries.  Curves generated by a one-parameter
unitary group admit a closed-form lift through a modified generator, which
doubles as the oracle for the integrator.  The noise family alpha p + beta
interpolates between faithful states and the pure boundary, where the
transport reduces to the classic pure-state phase when the connection
admits the limit.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .connect import connection_eval
from .errors import (
    BasePointMismatch,
    DomainError,
    NotCyclic,
    PureLimitUndefined,
    RankChanged,
    RankDeficient,
    StepTooLarge,
    ValidationError,
)
from .funzoo import ConnectionFunction, MetricFunction
from .matcore import (
    as_complex_matrix,
    dagger,
    eig_hermitian,
    rank_eps,
    require_density,
    require_hermitian,
    sqrtm_psd,
)
from .purify import as_purification, project

DEFAULT_STEPS_PER_UNIT = 2000
ODE_TOL = 1e-6
FD_STEP_FACTOR = 1e-4


def _fd4(f, t: float, h: float) -> np.ndarray:
    """Fourth-order central difference derivative."""
    return (-f(t + 2 * h) + 8 * f(t + h) - 8 * f(t - h) + f(t - 2 * h)) / (12 * h)


@dataclass
class DensityCurve:
    """Parametrized curve of density operators on [t_in, t_out].

    ``sampler`` must be defined on a small neighbourhood of the interval
    (finite differences overshoot the ends).  When no derivative sampler
    is given, a fourth-order central difference with step
    ``1e-4 * (t_out - t_in)`` is used.
    """

    sampler: Callable[[float], np.ndarray]
    t_in: float
    t_out: float
    derivative: Optional[Callable[[float], np.ndarray]] = None

    def rho(self, t: float) -> np.ndarray:
        m = np.asarray(self.sampler(t), dtype=complex)
        return (m + dagger(m)) / 2

    def drho(self, t: float) -> np.ndarray:
        if self.derivative is not None:
            m = np.asarray(self.derivative(t), dtype=complex)
            return (m + dagger(m)) / 2
        h = FD_STEP_FACTOR * (self.t_out - self.t_in)
        return _fd4(self.rho, t, h)


@dataclass
class TransportResult:
    """Sampled lift of a transport run.

    ``v_samples`` are phase factors with ``w = sqrt(rho) v``; at full rank
    they are unitary, at fixed lower rank partial isometries.
    """

    ts: np.ndarray
    w_samples: np.ndarray
    v_samples: np.ndarray
    projection_residual: float
    horizontality_residual: Optional[float]

    @property
    def w_in(self) -> np.ndarray:
        return self.w_samples[0]

    @property
    def w_out(self) -> np.ndarray:
        return self.w_samples[-1]


def _phase_coefficients(conn: ConnectionFunction, lam: np.ndarray, eps: float) -> np.ndarray:
    """Antisymmetric coefficient matrix of the phase generator in the
    eigenframe of rho.

    For the Bures choice the combined expression is regular on the rank
    boundary; the general expression needs all eigenvalues positive.
    """
    if conn.name == "bures":
        roots = np.sqrt(np.clip(lam, 0.0, None))
        sums = lam[:, None] + lam[None, :]
        good = sums > eps
        return np.where(
            good,
            (roots[:, None] - roots[None, :])
            / np.where(good, sums * (roots[:, None] + roots[None, :]), 1.0),
            0.0,
        )
    if lam[-1] <= eps:
        raise RankDeficient(
            f"transport with connection {conn.name or '?'} needs a faithful curve"
        )
    ratio = lam[:, None] / lam[None, :]
    roots = np.sqrt(lam)
    correction = (roots[None, :] - roots[:, None]) / (roots[None, :] + roots[:, None])
    return (conn(ratio) + correction) / (2.0 * np.sqrt(lam[:, None] * lam[None, :]))


def _phase_generator(conn: ConnectionFunction, rho: np.ndarray, drho: np.ndarray) -> np.ndarray:
    lam, u = np.linalg.eigh((rho + dagger(rho)) / 2)
    lam, u = lam[::-1], u[:, ::-1]
    eps = rank_eps(lam, len(lam))
    coeff = _phase_coefficients(conn, lam, eps)
    comps = dagger(u) @ ((drho + dagger(drho)) / 2) @ u
    g = u @ (coeff * comps) @ dagger(u)
    return (g - dagger(g)) / 2


def _reproject_isometry(v: np.ndarray, rank: int) -> np.ndarray:
    u, _, vh = np.linalg.svd(v)
    return u[:, :rank] @ vh[:rank, :]


def _grid(t_in: float, t_out: float, steps: Optional[int]) -> np.ndarray:
    if steps is None:
        steps = max(1, math.ceil(DEFAULT_STEPS_PER_UNIT * abs(t_out - t_in)))
    if steps < 1:
        raise ValidationError("transport needs at least one step")
    return np.linspace(t_in, t_out, steps + 1)


def _rank_of(rho: np.ndarray) -> int:
    lam = np.linalg.eigvalsh(rho)[::-1]
    return int(np.sum(lam > rank_eps(lam, len(lam))))


def _horizontality_residual(conn, ts, w_samples, rank, dim) -> Optional[float]:
    if rank < dim and conn.name != "bures":
        return None
    worst = 0.0
    for i in range(1, len(ts) - 1):
        dt = ts[i + 1] - ts[i - 1]
        wdot = (w_samples[i + 1] - w_samples[i - 1]) / dt
        a = connection_eval(conn, w_samples[i], wdot)
        worst = max(worst, float(np.linalg.norm(a)))
    return worst


def transport_ode(
    conn: ConnectionFunction,
    curve: DensityCurve,
    w0,
    steps: Optional[int] = None,
    ode_tol: float = ODE_TOL,
) -> TransportResult:
    """Horizontally transport the lift w0 along the curve.

    Integrates the phase equation

        v' = -(1/2) (1/sqrt(LR)) [F(L/R) + (sqrt(R)-sqrt(L))/(sqrt(R)+sqrt(L))](rho') v

    with fixed-step RK4, reprojecting v onto the fixed-rank partial
    isometries each step, and assembles w_t = sqrt(rho_t) v_t.  The rank
    of the curve must not change; the discrete horizontality residual must
    stay below ten times ``ode_tol``.
    """
    pv = as_purification(w0)
    dim = pv.dim
    rho0 = curve.rho(curve.t_in)
    gap = float(np.linalg.norm(project(pv) - rho0))
    if gap > 1e-8 * max(1.0, float(np.linalg.norm(rho0))):
        raise BasePointMismatch(f"w0 projects {gap:.3e} away from the curve start")
    rank = pv.rank
    ts = _grid(curve.t_in, curve.t_out, steps)

    def gen(t):
        return -_phase_generator(conn, curve.rho(t), curve.drho(t))

    v = pv.schmidt.phase.copy()
    v_samples = np.empty((len(ts), dim, dim), dtype=complex)
    w_samples = np.empty_like(v_samples)
    proj_worst = 0.0
    rho_t = rho0
    g_t = gen(ts[0])
    for i, t in enumerate(ts):
        if i > 0:
            h = ts[i] - ts[i - 1]
            mid = gen(ts[i - 1] + h / 2)
            g_next = gen(ts[i])
            k1 = g_t @ v
            k2 = mid @ (v + (h / 2) * k1)
            k3 = mid @ (v + (h / 2) * k2)
            k4 = g_next @ (v + h * k3)
            v = v + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
            v = _reproject_isometry(v, rank)
            g_t = g_next
            rho_t = curve.rho(t)
        if _rank_of(rho_t) != rank:
            raise RankChanged(f"curve rank changed at t = {t:g}")
        w = sqrtm_psd(rho_t) @ v
        v_samples[i] = v
        w_samples[i] = w
        proj_worst = max(
            proj_worst,
            float(np.linalg.norm(w @ dagger(w) - rho_t))
            / max(1.0, float(np.linalg.norm(rho_t))),
        )
    horiz = _horizontality_residual(conn, ts, w_samples, rank, dim)
    if horiz is not None and horiz > 10 * ode_tol:
        raise StepTooLarge(
            f"horizontality residual {horiz:.3e} exceeds 10 * ode_tol = {10 * ode_tol:.1e}"
        )
    return TransportResult(ts, w_samples, v_samples, proj_worst, horiz)


# ---------------------------------------------------------------------------
# closed-form lifts of unitary-conjugation curves


@dataclass(frozen=True)
class VonNeumannProblem:
    """Curve rho_t = u_t^dagger rho_in u_t with u_t = exp(i (t - t_in) h)."""

    h: np.ndarray
    rho_in: np.ndarray
    t_in: float = 0.0
    t_out: float = 1.0

    def curve(self) -> DensityCurve:
        h = require_hermitian(self.h)
        rho_in = require_density(self.rho_in)
        vals, vecs = eig_hermitian(h)

        def rho(t):
            u = (vecs * np.exp(1j * (t - self.t_in) * vals)) @ dagger(vecs)
            return dagger(u) @ rho_in @ u

        def drho(t):
            r = rho(t)
            return -1j * (h @ r - r @ h)

        return DensityCurve(sampler=rho, t_in=self.t_in, t_out=self.t_out, derivative=drho)


def vn_tilde_h(conn: ConnectionFunction, rho_in, h, tol: float = 1e-10) -> np.ndarray:
    """Modified generator whose one-parameter group drives the horizontal lift:

    h_mod = [ sqrt(R/L) r(L/R) + sqrt(L/R) r(R/L) ] h   at the initial state.

    Supported at rank-deficient states only when h preserves the support
    (h_mod then lives on the support block); commuting h is returned
    unchanged there.
    """
    rho_in = require_density(rho_in)
    h = require_hermitian(h)
    lam, u = eig_hermitian(rho_in)
    eps = rank_eps(lam, len(lam))
    alive = lam > eps
    comps = dagger(u) @ h @ u
    dead = ~np.outer(alive, alive)
    leak = float(np.linalg.norm(comps[dead & ~np.outer(~alive, ~alive)]))
    if leak > tol * max(1.0, float(np.linalg.norm(h))):
        raise RankDeficient(
            f"generator mixes support and null space (weight {leak:.3e}); "
            "the modified generator is undefined there"
        )
    lp = np.where(alive, lam, 1.0)
    ratio = lp[:, None] / lp[None, :]
    r = conn.r
    coeff = np.sqrt(1.0 / ratio) * r(ratio) + np.sqrt(ratio) * r(1.0 / ratio)
    coeff = np.where(dead, 0.0, coeff)
    out = u @ (coeff * comps) @ dagger(u)
    return (out + dagger(out)) / 2


def vn_transport(
    problem: VonNeumannProblem, conn: ConnectionFunction, steps: int = DEFAULT_STEPS_PER_UNIT
) -> TransportResult:
    """Closed-form horizontal lift of a unitary-conjugation curve:

    w_t = u_t^dagger sqrt(rho_in) exp(i (t - t_in) h_mod),
    equivalently i w' = h w - w h_mod.
    """
    h = require_hermitian(problem.h)
    rho_in = require_density(problem.rho_in)
    htil = vn_tilde_h(conn, rho_in, h)
    hv, hu = eig_hermitian(h)
    mv, mu = eig_hermitian(htil)
    sq = sqrtm_psd(rho_in)
    ts = np.linspace(problem.t_in, problem.t_out, steps + 1)
    dim = sq.shape[0]
    rank = _rank_of(rho_in)
    v_samples = np.empty((len(ts), dim, dim), dtype=complex)
    w_samples = np.empty_like(v_samples)
    proj_worst = 0.0
    for i, t in enumerate(ts):
        theta = t - problem.t_in
        u = (hu * np.exp(1j * theta * hv)) @ dagger(hu)
        g = (mu * np.exp(1j * theta * mv)) @ dagger(mu)
        w = dagger(u) @ sq @ g
        v_samples[i] = dagger(u) @ g
        w_samples[i] = w
        rho_t = dagger(u) @ rho_in @ u
        proj_worst = max(
            proj_worst,
            float(np.linalg.norm(w @ dagger(w) - rho_t))
            / max(1.0, float(np.linalg.norm(rho_t))),
        )
    horiz = _horizontality_residual(conn, ts, w_samples, rank, dim)
    return TransportResult(ts, w_samples, v_samples, proj_worst, horiz)


def relative_phase(w_in, w_out) -> complex:
    """Hilbert-Schmidt overlap (w_in, w_out) = Tr w_in^dagger w_out."""
    a = as_complex_matrix(w_in)
    b = as_complex_matrix(w_out)
    return complex(np.trace(dagger(a) @ b))


def holonomy_invariants(w_in, w_out, m_max: int, tol: float = 1e-8) -> list:
    """Power traces Tr (w_out w_in^dagger)^m, m = 1..m_max, of a cyclic lift.

    Invariant under moving the starting point along the cycle and under
    constant right gauge shifts of the lift.
    """
    a = as_complex_matrix(w_in)
    b = as_complex_matrix(w_out)
    gap = float(np.linalg.norm(a @ dagger(a) - b @ dagger(b)))
    if gap > tol * max(1.0, float(np.linalg.norm(a @ dagger(a)))):
        raise NotCyclic(f"endpoints project to states {gap:.3e} apart")
    m = b @ dagger(a)
    out = []
    acc = np.eye(m.shape[0], dtype=complex)
    for _ in range(m_max):
        acc = acc @ m
        out.append(complex(np.trace(acc)))
    return out


# ---------------------------------------------------------------------------
# noise on a curve of pure states


@dataclass
class NoiseModel:
    """Curve rho_t = alpha p_t + beta (identity), p_t the projector of a
    unit-vector curve psi_t."""

    psi: Callable[[float], np.ndarray]
    alpha: float
    beta: float
    t_in: float = 0.0
    t_out: float = 1.0
    psi_dot: Optional[Callable[[float], np.ndarray]] = None

    def projector(self, t: float) -> np.ndarray:
        vec = np.asarray(self.psi(t), dtype=complex).reshape(-1)
        return np.outer(vec, np.conj(vec))


def noise_mu(conn: ConnectionFunction, alpha: float, beta: float) -> float:
    """Phase-drag factor of the noise curve:

    mu = (1/2) (alpha / sqrt((alpha+beta) beta)) [ F(beta/(alpha+beta)) + (alpha+2 beta)/alpha ].
    """
    if alpha <= 0 or beta <= 0:
        raise DomainError("noise factor needs alpha > 0 and beta > 0")
    tau = beta / (alpha + beta)
    return float(
        0.5
        * (alpha / math.sqrt((alpha + beta) * beta))
        * (conn(tau) + (alpha + 2 * beta) / alpha)
    )


def _aitken(seq: np.ndarray) -> np.ndarray:
    d1 = seq[1:] - seq[:-1]
    d2 = seq[2:] - 2 * seq[1:-1] + seq[:-2]
    safe = np.abs(d2) > 1e-300
    return np.where(safe, seq[2:] - d1[1:] ** 2 / np.where(safe, d2, 1.0), seq[2:])


def noise_kappa(conn: ConnectionFunction, tol: float = 1e-5) -> Optional[float]:
    """Pure-limit value of the phase-drag factor, when it exists:

    kappa = lim_{s -> 0} (1 + F(s)) / (2 sqrt(s)).

    Requires the declared limit F(0) = -1.  The limit is probed on
    s = 1e-4 .. 1e-10 and extrapolated with the approach rate estimated
    from the samples themselves (two sweeps of geometric extrapolation);
    reported absent (None) when the samples fail to contract or the final
    extrapolants disagree beyond ``tol``.
    """
    if conn.at_zero is None or abs(conn.at_zero + 1.0) > 1e-12:
        return None
    s = 10.0 ** -(4.0 + np.arange(7))
    with np.errstate(over="ignore", invalid="ignore"):
        est = np.asarray((1.0 + conn(s)) / (2.0 * np.sqrt(s)), dtype=float)
    if not np.all(np.isfinite(est)):
        return None
    diffs = np.abs(np.diff(est))
    if diffs[-1] >= diffs[0] and diffs[0] > 0:
        return None
    extr = _aitken(_aitken(est))
    if not np.all(np.isfinite(extr)):
        return None
    if abs(extr[-1] - extr[-2]) > tol * max(1.0, abs(extr[-1])):
        return None
    return float(extr[-1])


def noise_transport(
    model: NoiseModel,
    conn: ConnectionFunction,
    steps: Optional[int] = None,
    ode_tol: float = ODE_TOL,
) -> TransportResult:
    """Transport along the noise curve by integrating the reduced phase
    equation v' = -(1 - mu) (p p' - p' p) v.

    For beta > 0 the factor is ``noise_mu``; at beta = 0 the pure-limit
    value ``noise_kappa`` replaces it (error if that limit is absent).
    """
    if model.beta < 0 or model.alpha <= 0:
        raise ValidationError("noise model needs alpha > 0 and beta >= 0")
    if model.beta > 0:
        factor = noise_mu(conn, model.alpha, model.beta)
    else:
        kappa = noise_kappa(conn)
        if kappa is None:
            raise PureLimitUndefined(
                f"connection {conn.name or '?'} has no pure-state limit"
            )
        factor = kappa
    span = model.t_out - model.t_in
    h_fd = FD_STEP_FACTOR * span

    def pdot(t):
        if model.psi_dot is not None:
            vec = np.asarray(model.psi(t), dtype=complex).reshape(-1)
            dvec = np.asarray(model.psi_dot(t), dtype=complex).reshape(-1)
            return np.outer(dvec, np.conj(vec)) + np.outer(vec, np.conj(dvec))
        return _fd4(model.projector, t, h_fd)

    def gen(t):
        p = model.projector(t)
        dp = pdot(t)
        return -(1.0 - factor) * (p @ dp - dp @ p)

    ts = _grid(model.t_in, model.t_out, steps)
    probe = np.asarray(model.psi(model.t_in), dtype=complex).reshape(-1)
    dim = probe.shape[0]
    sb = math.sqrt(model.beta)
    sab = math.sqrt(model.alpha + model.beta)
    eye = np.eye(dim, dtype=complex)
    v = eye.copy()
    v_samples = np.empty((len(ts), dim, dim), dtype=complex)
    w_samples = np.empty_like(v_samples)
    proj_worst = 0.0
    g_t = gen(ts[0])
    for i, t in enumerate(ts):
        vec = np.asarray(model.psi(t), dtype=complex).reshape(-1)
        if abs(np.vdot(vec, vec) - 1.0) > 1e-12:
            raise ValidationError(f"pure-state curve is not unit-normalized at t = {t:g}")
        if i > 0:
            h = ts[i] - ts[i - 1]
            mid = gen(ts[i - 1] + h / 2)
            g_next = gen(ts[i])
            k1 = g_t @ v
            k2 = mid @ (v + (h / 2) * k1)
            k3 = mid @ (v + (h / 2) * k2)
            k4 = g_next @ (v + h * k3)
            v = v + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
            v = _reproject_isometry(v, dim)
            g_t = g_next
        p = np.outer(vec, np.conj(vec))
        sqrho = (sab - sb) * p + sb * eye
        w = sqrho @ v
        v_samples[i] = v
        w_samples[i] = w
        rho_t = model.alpha * p + model.beta * eye
        proj_worst = max(
            proj_worst,
            float(np.linalg.norm(w @ dagger(w) - rho_t))
            / max(1.0, float(np.linalg.norm(rho_t))),
        )
    rank = dim if model.beta > 0 else 1
    horiz = _horizontality_residual(conn, ts, w_samples, rank, dim)
    return TransportResult(ts, w_samples, v_samples, proj_worst, horiz)


def noise_line_element(k: MetricFunction, alpha: float, beta: float, bures_ds2: float) -> float:
    """Squared line element of the noise curve in the k-induced metric,
    as a multiple of the pure-curve value:

        ds^2 = [ 2 alpha (1 - tau) / (tau k(1/tau) + k(tau)) ] * bures_ds2,
        tau = beta / (alpha + beta).

    ``bures_ds2`` is the squared speed of the underlying pure-state curve
    in the convention where a unit-speed Fubini-Study curve contributes
    one half (see the induced-metric cross-check in the tests).
    """
    if alpha <= 0 or beta < 0:
        raise ValidationError("line element needs alpha > 0 and beta >= 0")
    if beta == 0:
        denom = k.limit("zero")
        if not np.isfinite(k.limit("inf")):
            raise DomainError("k must stay finite at infinity for the pure limit")
    else:
        tau = beta / (alpha + beta)
        denom = tau * float(k(1.0 / tau)) + float(k(tau))
    tau = beta / (alpha + beta)
    return float(2.0 * alpha * (1.0 - tau) / denom * bures_ds2)

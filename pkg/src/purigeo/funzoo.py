"""Scalar function layer.

Connection functions F (antisymmetric under t -> 1/t), their arithmetic
partners r = (1+F)/2, positive metric functions k acting on the modular
ratio, monotone-metric functions f, and all conversions among them,
including the constrained correspondence that pins exactly one k (and one
F) to a given selftransposed f_s.

Functions are evaluation handles over (0, inf) plus declared endpoint
limits; algebraic identities are checked on a fixed log-symmetric grid.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainError,
    ExceedsBuresBound,
    MissingBoundaryValue,
    NotSelftransposed,
    ValidationError,
)

GRID_LO = 1e-3
GRID_HI = 1e3
GRID_POINTS = 200

# Taylor guard half-width for the root quotient at t = 1
TAU_GUARD = 1e-4


def default_grid(n: int = GRID_POINTS, lo: float = GRID_LO, hi: float = GRID_HI) -> np.ndarray:
    """Log-uniform grid on [lo, hi], symmetric under t -> 1/t when hi = 1/lo."""
    return np.logspace(math.log10(lo), math.log10(hi), n)


class ScalarFunction:
    """Scalar function on (0, inf) with declared limits at 0 and infinity.

    The endpoint limits are data, not something inferred by sampling: the
    operator calculus needs them exactly when a zero eigenvalue produces a
    vanishing or infinite argument ratio.  ``None`` means "not declared".
    """

    def __init__(self, fn, at_zero=None, at_inf=None, name: str = ""):
        self.fn = fn
        self.at_zero = at_zero
        self.at_inf = at_inf
        self.name = name

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t <= 0):
            raise DomainError(f"{self.name or 'function'} evaluated at t <= 0")
        out = np.asarray(self.fn(t), dtype=float)
        return out if out.shape else float(out)

    def limit(self, which: str):
        """Declared endpoint value; raises if absent."""
        val = self.at_zero if which == "zero" else self.at_inf
        if val is None:
            raise MissingBoundaryValue(
                f"{self.name or 'function'} has no declared limit at {which}"
            )
        return val

    def __repr__(self):
        return f"<{type(self).__name__} {self.name or '?'}>"


class RFunction(ScalarFunction):
    """Weight function with r(t) + r(1/t) = 1 and r(1) = 1/2."""


class ConnectionFunction(ScalarFunction):
    """Gauge-potential label F with F(t) + F(1/t) = 0; real-valued here.

    ``name`` identifies catalog entries; the value "bures" additionally
    enables evaluation at rank-deficient base points.
    """

    @property
    def r(self) -> RFunction:
        if not hasattr(self, "_r"):
            self._r = r_from_F(self)
        return self._r


class MetricFunction(ScalarFunction):
    """Strictly positive weight for the modified Hermitian product."""


class MonotoneFunction(ScalarFunction):
    """Candidate monotone-metric function; may carry a selftransposed flag."""

    def __init__(self, fn, at_zero=None, at_inf=None, name="", selftransposed=False):
        super().__init__(fn, at_zero, at_inf, name)
        self.selftransposed = selftransposed


@dataclass(frozen=True)
class RadonMeasureSpec:
    """Atomic probability measure on [0, 1], given as (location, weight) pairs."""

    atoms: tuple

    def __post_init__(self):
        total = 0.0
        for x, wgt in self.atoms:
            if not (0.0 <= x <= 1.0):
                raise ValidationError(f"atom location {x} outside [0, 1]")
            if wgt <= 0:
                raise ValidationError(f"atom weight {wgt} must be positive")
            total += wgt
        if abs(total - 1.0) > 1e-12:
            raise ValidationError(f"atom weights sum to {total}, expected 1")


@dataclass(frozen=True)
class HSsolution:
    """Unique (tau, k, F) triple produced by the constrained solver."""

    tau: ScalarFunction
    k: MetricFunction
    F: ConnectionFunction


# ---------------------------------------------------------------------------
# extended-real helpers for propagating declared limits; None = indeterminate

def _ext_add(a, b):
    if a is None or b is None:
        return None
    if math.isinf(a) and math.isinf(b) and (a > 0) != (b > 0):
        return None
    return a + b


def _ext_sub(a, b):
    return _ext_add(a, None if b is None else -b)


def _ext_mul(a, b):
    if a is None or b is None:
        return None
    if (a == 0 and math.isinf(b)) or (b == 0 and math.isinf(a)):
        return None
    return a * b


def _ext_div(a, b):
    if a is None or b is None:
        return None
    if b == 0:
        return None
    if math.isinf(a) and math.isinf(b):
        return None
    if math.isinf(b):
        return 0.0
    return a / b


def _ext_sqrt(a):
    if a is None or a < 0:
        return None
    return math.sqrt(a)


# ---------------------------------------------------------------------------
# validators

def validate_connection(F: ScalarFunction, grid=None, metric_compatible=False, tol=1e-12):
    """Check F(t) + F(1/t) = 0, F(1) = 0, and optionally -1 < F < 1."""
    grid = default_grid() if grid is None else np.asarray(grid)
    vals = F(grid)
    anti = vals + F(1.0 / grid)
    worst = float(np.max(np.abs(anti)))
    if worst > tol:
        raise ValidationError(f"F(t) + F(1/t) deviates from 0 by {worst:.3e}")
    if abs(F(1.0)) > tol:
        raise ValidationError(f"F(1) = {F(1.0):.3e}, expected 0")
    if metric_compatible and not np.all((vals > -1.0) & (vals < 1.0)):
        raise ValidationError("F must satisfy -1 < F(t) < 1 on the grid")


def validate_r(r: ScalarFunction, grid=None, tol=1e-12):
    grid = default_grid() if grid is None else np.asarray(grid)
    worst = float(np.max(np.abs(r(grid) + r(1.0 / grid) - 1.0)))
    if worst > tol:
        raise ValidationError(f"r(t) + r(1/t) deviates from 1 by {worst:.3e}")
    if abs(r(1.0) - 0.5) > tol:
        raise ValidationError(f"r(1) = {r(1.0):.6e}, expected 1/2")


def validate_metric(k: ScalarFunction, grid=None):
    grid = default_grid() if grid is None else np.asarray(grid)
    vals = k(grid)
    if not np.all(vals > 0):
        raise ValidationError("k must be strictly positive on the grid")


def validate_monotone(f: ScalarFunction, grid=None, tol=1e-12, require_normalized=True):
    """Check f(1) = 1 and, when flagged selftransposed, the transpose identity
    f(t) = t f(1/t) and the bound f <= (1+t)/2."""
    grid = default_grid() if grid is None else np.asarray(grid)
    if require_normalized and abs(f(1.0) - 1.0) > tol:
        raise ValidationError(f"f(1) = {f(1.0):.6e}, expected 1")
    if getattr(f, "selftransposed", False):
        vals = f(grid)
        worst = float(np.max(np.abs(vals - grid * f(1.0 / grid))))
        if worst > max(tol, tol * float(np.max(np.abs(vals)))):
            raise NotSelftransposed(f"f(t) - t f(1/t) deviates by {worst:.3e}")
        excess = float(np.max(vals - (1.0 + grid) / 2))
        if excess > 1e-10 * float(np.max(1.0 + grid)):
            raise ExceedsBuresBound(f"f exceeds (1+t)/2 by {excess:.3e}")


# ---------------------------------------------------------------------------
# conversions between F, r, k, f, f_s

def r_from_F(F: ScalarFunction) -> RFunction:
    """r = (1 + F)/2, the weight whose asymmetry is F."""
    return RFunction(
        lambda t: (1.0 + F(t)) / 2,
        at_zero=_ext_div(_ext_add(1.0, F.at_zero), 2.0),
        at_inf=_ext_div(_ext_add(1.0, F.at_inf), 2.0),
        name=f"r[{F.name}]" if F.name else "r",
    )


def F_from_r(r: ScalarFunction) -> ConnectionFunction:
    """F = 2r - 1; inverse of ``r_from_F``."""
    return ConnectionFunction(
        lambda t: 2.0 * r(t) - 1.0,
        at_zero=_ext_sub(_ext_mul(2.0, r.at_zero), 1.0),
        at_inf=_ext_sub(_ext_mul(2.0, r.at_inf), 1.0),
        name=f"F[{r.name}]" if r.name else "F",
    )


def rF_from_k(k: ScalarFunction):
    """Connection weight induced by a metric function k:

    r(t) = t k(1/t) / (k(t) + t k(1/t)),  F(t) = (t k(1/t) - k(t)) / (t k(1/t) + k(t)).
    """
    def r_fn(t):
        a = t * k.fn(1.0 / t)
        return a / (k.fn(t) + a)

    def F_fn(t):
        a = t * k.fn(1.0 / t)
        b = k.fn(t)
        return (a - b) / (a + b)

    # limits of a(t) = t*k(1/t) at the two ends; None where indeterminate
    a0 = 0.0 if (k.at_inf is not None and math.isfinite(k.at_inf)) else None
    ainf = math.inf if (k.at_zero is not None and k.at_zero > 0) else None
    kinf_finite = k.at_inf is not None and math.isfinite(k.at_inf)
    r = RFunction(
        r_fn,
        at_zero=_ext_div(a0, _ext_add(k.at_zero, a0)),
        at_inf=1.0 if (ainf == math.inf and kinf_finite) else None,
        name=f"r[{k.name}]" if k.name else "r",
    )
    F = ConnectionFunction(
        F_fn,
        at_zero=_ext_div(_ext_sub(a0, k.at_zero), _ext_add(a0, k.at_zero)),
        at_inf=1.0 if (ainf == math.inf and kinf_finite) else None,
        name=f"F[{k.name}]" if k.name else "F",
    )
    return r, F


def k_family_from_F(F: ScalarFunction, q: ScalarFunction) -> MetricFunction:
    """One member of the metric family inducing F: k = sqrt(t) (1 - F) q,
    with q any positive symmetric weight q(t) = q(1/t)."""
    def fn(t):
        return np.sqrt(t) * (1.0 - F.fn(t)) * q.fn(t)

    return MetricFunction(
        fn,
        at_zero=_ext_mul(0.0, _ext_mul(_ext_sub(1.0, F.at_zero), q.at_zero)),
        at_inf=None,
        name=f"k[{F.name};{q.name}]",
    )


def f_from_k(k: ScalarFunction) -> MonotoneFunction:
    """Hermitian-metric function paired with k:

    f(t) = (k(t) + t k(1/t))^2 / (4 k(t)).

    Returns f with f(1) = k(1); rescale k first when f(1) = 1 is wanted.
    """
    def fn(t):
        a = k.fn(t) + t * k.fn(1.0 / t)
        return a * a / (4.0 * k.fn(t))

    return MonotoneFunction(fn, name=f"f[{k.name}]" if k.name else "f")


def k_from_f(f: ScalarFunction) -> MetricFunction:
    """Unique metric function whose paired Hermitian metric has function f:

    k(t) = f(t) * 4 t^2 f(1/t)^2 / (f(t) + t f(1/t))^2.
    """
    def fn(t):
        ft = f.fn(t)
        tf = t * f.fn(1.0 / t)
        return ft * 4.0 * tf * tf / (ft + tf) ** 2

    return MetricFunction(fn, name=f"k[{f.name}]" if f.name else "k")


def rF_from_f(f: ScalarFunction):
    """Connection weight induced by a Hermitian-metric function f:

    r(t) = f(t) / (f(t) + t f(1/t)).
    """
    def r_fn(t):
        ft = f.fn(t)
        return ft / (ft + t * f.fn(1.0 / t))

    def F_fn(t):
        ft = f.fn(t)
        tf = t * f.fn(1.0 / t)
        return (ft - tf) / (ft + tf)

    name = f"[{f.name}]" if f.name else ""
    return RFunction(r_fn, name=f"r{name}"), ConnectionFunction(F_fn, name=f"F{name}")


def fs_from_k(k: ScalarFunction) -> MonotoneFunction:
    """Riemannian (selftransposed) function of the induced real metric:

    f_s(t) = (k(t) + t k(1/t)) / 2, the harmonic mean of f(t) and t f(1/t).
    """
    def fn(t):
        return (k.fn(t) + t * k.fn(1.0 / t)) / 2

    a0 = 0.0 if (k.at_inf is not None and math.isfinite(k.at_inf)) else None
    return MonotoneFunction(
        fn,
        at_zero=_ext_div(_ext_add(k.at_zero, a0), 2.0),
        at_inf=None,
        name=f"fs[{k.name}]" if k.name else "fs",
        selftransposed=True,
    )


def check_HS(k: ScalarFunction, grid=None, tol=1e-10) -> bool:
    """Whether k satisfies the horizontal-isometry constraint
    k(t) + t k(1/t) = k(t)^2 + t k(1/t)^2 on the grid."""
    grid = default_grid() if grid is None else np.asarray(grid)
    kt = k(grid)
    kit = k(1.0 / grid)
    lhs = kt + grid * kit
    rhs = kt * kt + grid * kit * kit
    scale = np.maximum(1.0, np.abs(lhs))
    return bool(np.max(np.abs(lhs - rhs) / scale) <= tol)


def k_from_F_HS(F: ScalarFunction) -> MetricFunction:
    """The unique constraint-satisfying metric function for a given F:

    k(t) = 2 t (1 - F) / ((1 + F)^2 + t (1 - F)^2), valid for -1 < F < 1.
    """
    def fn(t):
        Ft = F.fn(t)
        return 2.0 * t * (1.0 - Ft) / ((1.0 + Ft) ** 2 + t * (1.0 - Ft) ** 2)

    return MetricFunction(fn, name=f"kHS[{F.name}]" if F.name else "kHS")


def fs_from_F_HS(F: ScalarFunction) -> MonotoneFunction:
    """Riemannian function reached from F under the isometry constraint:

    f_s(t) = 2 t / ((1 + F)^2 + t (1 - F)^2).
    """
    def fn(t):
        Ft = F.fn(t)
        return 2.0 * t / ((1.0 + Ft) ** 2 + t * (1.0 - Ft) ** 2)

    return MonotoneFunction(
        fn, name=f"fsHS[{F.name}]" if F.name else "fsHS", selftransposed=True
    )


# ---------------------------------------------------------------------------
# the constrained solver f_s -> (tau, k, F)

def _tau_limit_at_one(fs_fn) -> float:
    """Limit of sqrt((1+t)/2 - f_s(t)) / |t-1| at t = 1.

    The radicand vanishes to second order there; direct division is
    cancellative, so evaluate the symmetrized quotient at two offsets and
    Richardson-extrapolate the O(h^2) error away.
    """
    def sym(h):
        out = 0.0
        for t in (1.0 + h, 1.0 - h):
            rad = max((1.0 + t) / 2 - float(fs_fn(t)), 0.0)
            out += math.sqrt(rad) / abs(t - 1.0)
        return out / 2

    a1, a2 = sym(1e-2), sym(5e-3)
    return max((4.0 * a2 - a1) / 3.0, 0.0)


def hs_solve(fs: MonotoneFunction, grid=None) -> HSsolution:
    """Solve for the unique (k, F) pair reproducing a selftransposed f_s
    under the horizontal-isometry constraint.

    Construction: tau(t) = sqrt((1+t)/2 - f_s(t)) / |t - 1| (with a Taylor
    guard at t = 1), then

        k(t) = (2 f_s(t)/(1+t)) (1 + (t-1) tau(t) / sqrt(f_s(1/t)))
        F(t) = ((t-1)/(t+1)) (1 - 2 tau(t) / sqrt(f_s(1/t)))

    The root with the opposite sign cannot keep F < 1 unless tau vanishes.
    """
    grid = default_grid() if grid is None else np.asarray(grid)
    if abs(fs(1.0) - 1.0) > 1e-12:
        raise ValidationError(f"f_s(1) = {fs(1.0):.6e}, expected 1")
    vals = fs(grid)
    st = np.max(np.abs(vals - grid * fs(1.0 / grid)))
    if st > 1e-12 * max(1.0, float(np.max(np.abs(vals)))):
        raise NotSelftransposed(f"f_s(t) - t f_s(1/t) deviates by {st:.3e}")
    rad = (1.0 + grid) / 2 - vals
    floor = -1e-12 * (1.0 + grid) / 2
    if np.any(rad < floor):
        worst = float(np.min(rad))
        raise ExceedsBuresBound(f"f_s exceeds (1+t)/2 by {-worst:.3e}")

    tau1 = _tau_limit_at_one(fs.fn)

    def tau_fn(t):
        t = np.asarray(t, dtype=float)
        near = np.abs(t - 1.0) < TAU_GUARD
        safe = np.where(near, 2.0, t)
        r = np.maximum((1.0 + safe) / 2 - fs.fn(safe), 0.0)
        out = np.sqrt(r) / np.abs(safe - 1.0)
        return np.where(near, tau1, out)

    def k_fn(t):
        t = np.asarray(t, dtype=float)
        return (2.0 * fs.fn(t) / (1.0 + t)) * (
            1.0 + (t - 1.0) * tau_fn(t) / np.sqrt(fs.fn(1.0 / t))
        )

    def F_fn(t):
        t = np.asarray(t, dtype=float)
        return ((t - 1.0) / (t + 1.0)) * (1.0 - 2.0 * tau_fn(t) / np.sqrt(fs.fn(1.0 / t)))

    # endpoint limits from the declared data of f_s
    tau0 = _ext_sqrt(_ext_sub(0.5, fs.at_zero))
    two_tau_over_root = _ext_mul(2.0, _ext_div(tau0, _ext_sqrt(fs.at_inf)))
    F0 = _ext_mul(-1.0, _ext_sub(1.0, two_tau_over_root))
    k0 = _ext_mul(_ext_mul(2.0, fs.at_zero), _ext_sub(1.0, _ext_div(tau0, _ext_sqrt(fs.at_inf))))

    name = fs.name or "fs"
    tau = ScalarFunction(tau_fn, at_zero=tau0, name=f"tau[{name}]")
    k = MetricFunction(k_fn, at_zero=k0, name=f"k[{name}]")
    F = ConnectionFunction(F_fn, at_zero=F0, at_inf=_ext_mul(-1.0, F0), name=f"F[{name}]")
    return HSsolution(tau=tau, k=k, F=F)


def fs_from_measure(measure: RadonMeasureSpec) -> MonotoneFunction:
    """Selftransposed operator monotone function of an atomic measure:

    f_s(t) = m({0}) (1+t)/2 + sum_i m_i (1+x_i)/2 (t/(t+x_i) + t/(t x_i + 1)).
    """
    m0 = sum(wgt for x, wgt in measure.atoms if x == 0.0)
    atoms = [(x, wgt) for x, wgt in measure.atoms if x > 0.0]

    def fn(t):
        t = np.asarray(t, dtype=float)
        out = m0 * (1.0 + t) / 2
        for x, wgt in atoms:
            out = out + wgt * (1.0 + x) / 2 * (t / (t + x) + t / (t * x + 1.0))
        return out

    at_inf = math.inf if m0 > 0 else sum(w * (1.0 + x) ** 2 / (2.0 * x) for x, w in atoms)
    label = ",".join(f"{x:g}:{w:g}" for x, w in measure.atoms)
    return MonotoneFunction(
        fn,
        at_zero=m0 / 2,
        at_inf=at_inf,
        name=f"measure({label})",
        selftransposed=True,
    )


# ---------------------------------------------------------------------------
# catalogs

def catalog(name: str) -> MonotoneFunction:
    """Named selftransposed monotone functions.

    Keys: ``bures`` ((1+t)/2), ``canonical`` (2t/(1+t)), or
    ``measure(x1:w1,x2:w2,...)`` for an atomic measure on [0, 1].
    """
    key = name.strip().lower()
    if key == "bures":
        return MonotoneFunction(
            lambda t: (1.0 + t) / 2,
            at_zero=0.5,
            at_inf=math.inf,
            name="bures",
            selftransposed=True,
        )
    if key == "canonical":
        return MonotoneFunction(
            lambda t: 2.0 * t / (1.0 + t),
            at_zero=0.0,
            at_inf=2.0,
            name="canonical",
            selftransposed=True,
        )
    if key.startswith("measure(") and key.endswith(")"):
        atoms = []
        for part in key[len("measure(") : -1].split(","):
            x, _, wgt = part.partition(":")
            atoms.append((float(x), float(wgt)))
        return fs_from_measure(RadonMeasureSpec(atoms=tuple(atoms)))
    raise ValueError(f"unknown monotone-function catalog key {name!r}")


def connection_catalog(name: str, s: float | None = None) -> ConnectionFunction:
    """Named connection functions.

    Keys: ``bures`` ((t-1)/(t+1)), ``canonical`` (0),
    ``global_section`` ((sqrt(t)-1)/(sqrt(t)+1)), ``power`` with exponent s
    ((t^s - 1)/(t^s + 1), s > 0).
    """
    key = name.strip().lower()
    if key == "bures":
        return ConnectionFunction(
            lambda t: (t - 1.0) / (t + 1.0), at_zero=-1.0, at_inf=1.0, name="bures"
        )
    if key == "canonical":
        return ConnectionFunction(
            lambda t: np.zeros_like(np.asarray(t, dtype=float)),
            at_zero=0.0,
            at_inf=0.0,
            name="canonical",
        )
    if key == "global_section":
        return ConnectionFunction(
            lambda t: (np.sqrt(t) - 1.0) / (np.sqrt(t) + 1.0),
            at_zero=-1.0,
            at_inf=1.0,
            name="global_section",
        )
    if key == "power":
        if s is None or s <= 0:
            raise ValueError("power connection needs a positive exponent s")
        return ConnectionFunction(
            lambda t, s=float(s): (t**s - 1.0) / (t**s + 1.0),
            at_zero=-1.0,
            at_inf=1.0,
            name=f"power({s:g})",
        )
    raise ValueError(f"unknown connection catalog key {name!r}")


def metric_catalog(name: str) -> MetricFunction:
    """Named metric functions: ``hs`` (k = 1), ``canonical`` (2t/(1+t)),
    ``sqrt`` (sqrt(t))."""
    key = name.strip().lower()
    if key in ("hs", "one"):
        return MetricFunction(
            lambda t: np.ones_like(np.asarray(t, dtype=float)),
            at_zero=1.0,
            at_inf=1.0,
            name="hs",
        )
    if key == "canonical":
        return MetricFunction(
            lambda t: 2.0 * t / (1.0 + t), at_zero=0.0, at_inf=2.0, name="canonical"
        )
    if key == "sqrt":
        return MetricFunction(np.sqrt, at_zero=0.0, at_inf=math.inf, name="sqrt")
    raise ValueError(f"unknown metric catalog key {name!r}")


def reciprocal(k: ScalarFunction) -> ScalarFunction:
    """1/k with limits inverted (1/0 -> inf, 1/inf -> 0)."""
    def inv_limit(v):
        if v is None:
            return None
        if v == 0:
            return math.inf
        return 0.0 if math.isinf(v) else 1.0 / v

    return ScalarFunction(
        lambda t: 1.0 / k.fn(t),
        at_zero=inv_limit(k.at_zero),
        at_inf=inv_limit(k.at_inf),
        name=f"1/{k.name}" if k.name else "1/k",
    )

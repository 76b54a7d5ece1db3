"""Job execution.

Every command runs through ``run(job)``, which validates the parameter
document against its request model, dispatches, and assembles a report
with echoed inputs and residual diagnostics.  The CLI calls this directly;
the HTTP app wraps it per endpoint.
"""

import math
import time

import numpy as np
import pydantic
from scipy.interpolate import PchipInterpolator

from .. import acceptance
from ..connect import sylvester_solve
from ..errors import (
    MissingBoundaryValue,
    NonHermitianInput,
    NotCyclic,
    ValidationError,
)
from ..funzoo import (
    ConnectionFunction,
    MetricFunction,
    MonotoneFunction,
    RadonMeasureSpec,
    catalog,
    check_HS,
    connection_catalog,
    f_from_k,
    fs_from_F_HS,
    fs_from_k,
    fs_from_measure,
    hs_solve,
    k_from_F_HS,
    metric_catalog,
    rF_from_k,
    r_from_F,
    validate_connection,
    validate_monotone,
)
from ..matcore import dagger, require_density, require_hermitian, sqrtm_psd
from ..metrics import (
    MetricReport,
    bures_inner,
    canonical_inner,
    induced_inner,
    induced_inner_lifted,
    monotone_inner,
    purification_inner,
)
from ..transport import (
    DensityCurve,
    NoiseModel,
    VonNeumannProblem,
    holonomy_invariants,
    noise_kappa,
    noise_mu,
    noise_transport,
    relative_phase,
    transport_ode,
    vn_tilde_h,
    vn_transport,
)
from .schemas import (
    ConvertRequest,
    FunctionSpec,
    HolonomyRequest,
    JobSpec,
    MatrixData,
    MetricRequest,
    NoiseRequest,
    PsiSpec,
    Report,
    SelftestRequest,
    TableData,
    TransportRequest,
    VnRequest,
)

VALIDATION_FAILURES = (
    ValidationError,
    MissingBoundaryValue,
    NonHermitianInput,
    ValueError,
    pydantic.ValidationError,
)


# ---------------------------------------------------------------------------
# converters between wire data and arrays / function handles

def to_array(m: MatrixData) -> np.ndarray:
    re = np.asarray(m.re, dtype=float)
    if re.ndim != 2 or re.shape[0] != re.shape[1]:
        raise ValidationError(f"matrix must be square, got shape {re.shape}")
    if m.im is None:
        return re.astype(complex)
    im = np.asarray(m.im, dtype=float)
    if im.shape != re.shape:
        raise ValidationError("re/im parts must have equal shapes")
    return re + 1j * im


def matrix_data(a: np.ndarray) -> dict:
    a = np.asarray(a, dtype=complex)
    return {"re": a.real.tolist(), "im": a.imag.tolist()}


def complex_data(z: complex) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _tabulated(table, kind, name="tabulated"):
    ts = np.asarray(table.t, dtype=float)
    if np.any(ts <= 0) or np.any(np.diff(ts) <= 0):
        raise ValidationError("table abscissae must be positive and increasing")
    interp = PchipInterpolator(np.log(ts), np.asarray(table.value, dtype=float), extrapolate=False)
    lo, hi = float(table.value[0]), float(table.value[-1])

    def fn(t):
        x = np.log(np.asarray(t, dtype=float))
        out = interp(x)
        return np.where(x < math.log(ts[0]), lo, np.where(x > math.log(ts[-1]), hi, out))

    return kind(fn, at_zero=table.at_zero, at_inf=table.at_inf, name=name)


def resolve_connection(spec: FunctionSpec) -> ConnectionFunction:
    if spec.name is not None:
        return connection_catalog(spec.name, spec.s)
    if spec.table is not None:
        F = _tabulated(spec.table, ConnectionFunction, "tabulated-F")
        validate_connection(F, metric_compatible=False, tol=1e-6)
        return F
    raise ValidationError("a connection function cannot be built from measure atoms")


def resolve_metric_k(spec: FunctionSpec) -> MetricFunction:
    if spec.name is not None:
        return metric_catalog(spec.name)
    if spec.table is not None:
        k = _tabulated(spec.table, MetricFunction, "tabulated-k")
        if not np.all(k(np.geomspace(spec.table.t[0], spec.table.t[-1], 64)) > 0):
            raise ValidationError("tabulated k must be strictly positive")
        return k
    raise ValidationError("a metric function cannot be built from measure atoms")


def resolve_fs(spec: FunctionSpec) -> MonotoneFunction:
    if spec.name is not None:
        return catalog(spec.name)
    if spec.atoms is not None:
        return fs_from_measure(RadonMeasureSpec(atoms=tuple((a.x, a.weight) for a in spec.atoms)))
    fs = _tabulated(spec.table, MonotoneFunction, "tabulated-fs")
    fs.selftransposed = True
    return fs


# ---------------------------------------------------------------------------
# command handlers; each returns (outputs, diagnostics, table or None)

def _function_table(grid, named):
    cols = ["t"] + [name for name, _ in named]
    rows = []
    for t in grid:
        rows.append([float(t)] + [float(fn(float(t))) for _, fn in named])
    return TableData(columns=cols, rows=rows)


def handle_convert(req: ConvertRequest):
    grid = np.geomspace(req.grid.lo, req.grid.hi, req.grid.n)
    diagnostics = {}
    if req.fs is not None:
        fs = resolve_fs(req.fs)
        validate_monotone(fs, grid=grid, tol=1e-8)
        sol = hs_solve(fs, grid=grid)
        k, F = sol.k, sol.F
        named = [("F", F), ("r", r_from_F(F)), ("k", k), ("fs", fs), ("tau", sol.tau)]
        diagnostics["fs_round_trip"] = float(np.max(np.abs(fs_from_k(k)(grid) - fs(grid))))
        source = fs.name
    elif req.k is not None:
        k = resolve_metric_k(req.k)
        _, F = rF_from_k(k)
        fs = fs_from_k(k)
        named = [("F", F), ("r", r_from_F(F)), ("k", k), ("fs", fs), ("f", f_from_k(k))]
        source = k.name
    else:
        F = resolve_connection(req.F)
        validate_connection(F, grid=grid, metric_compatible=True, tol=1e-8)
        k = k_from_F_HS(F)
        fs = fs_from_F_HS(F)
        named = [("F", F), ("r", r_from_F(F)), ("k", k), ("fs", fs), ("f", f_from_k(k))]
        source = F.name
    diagnostics["constraint_satisfied"] = bool(check_HS(k, grid=grid))
    diagnostics["F_round_trip"] = float(np.max(np.abs(rF_from_k(k)[1](grid) - F(grid))))
    probes = [t for t in (0.5, 1.0, 2.0) if req.grid.lo <= t <= req.grid.hi]
    outputs = {
        "source": source,
        "samples_at": probes,
        "values": {name: [float(fn(t)) for t in probes] for name, fn in named},
        "boundaries": {
            "F_at_zero": F.at_zero,
            "F_at_inf": F.at_inf,
            "k_at_zero": k.at_zero,
            "k_at_inf": k.at_inf,
        },
    }
    return outputs, diagnostics, _function_table(grid, named)


def handle_metric(req: MetricRequest):
    xi = require_hermitian(to_array(req.xi))
    eta = xi if req.eta is None else require_hermitian(to_array(req.eta))
    diagnostics = {}
    if req.metric == "purification":
        if req.w is None or req.k is None:
            raise ValidationError("purification metric needs w and k")
        w = to_array(req.w)
        k = resolve_metric_k(req.k)
        value = purification_inner(k, w, eta, xi)
        metric_id = f"purification({k.name})"
    else:
        if req.rho is None:
            raise ValidationError(f"{req.metric} metric needs rho")
        rho = require_density(to_array(req.rho))
        if req.metric == "bures":
            value = complex(bures_inner(rho, xi, eta))
            g = sylvester_solve(rho, xi)
            diagnostics["sylvester_residual"] = float(
                np.linalg.norm(rho @ g + g @ rho - xi)
            )
            metric_id = "bures"
        elif req.metric == "canonical":
            value = complex(canonical_inner(rho, eta, xi))
            metric_id = "canonical"
        elif req.metric == "monotone":
            if req.fs is None:
                raise ValidationError("monotone metric needs fs")
            fs = resolve_fs(req.fs)
            value = monotone_inner(fs, rho, eta, xi)
            metric_id = f"monotone({fs.name})"
        else:
            if req.k is None:
                raise ValidationError("induced metric needs k")
            k = resolve_metric_k(req.k)
            value = induced_inner(k, rho, eta, xi)
            lifted = induced_inner_lifted(k, rho, eta, xi)
            diagnostics["dual_path_residual"] = abs(value - lifted)
            metric_id = f"induced({k.name})"
    report = MetricReport(
        metric_id=metric_id, hermitian_value=complex(value), real_value=float(np.real(value))
    )
    outputs = {
        "metric_id": report.metric_id,
        "hermitian_value": complex_data(report.hermitian_value),
        "real_value": report.real_value,
    }
    return outputs, diagnostics, None


def _transport_table(res):
    n = res.w_samples.shape[1]
    cols = ["t"]
    for i in range(n):
        for j in range(n):
            cols += [f"w{i}{j}_re", f"w{i}{j}_im"]
    rows = []
    for t, w in zip(res.ts, res.w_samples):
        row = [float(t)]
        for i in range(n):
            for j in range(n):
                row += [float(w[i, j].real), float(w[i, j].imag)]
        rows.append(row)
    return TableData(columns=cols, rows=rows)


def _transport_outputs(res):
    return {
        "w_in": matrix_data(res.w_in),
        "w_out": matrix_data(res.w_out),
        "relative_phase": complex_data(relative_phase(res.w_in, res.w_out)),
    }


def _transport_diags(res):
    return {
        "projection_residual": res.projection_residual,
        "horizontality_residual": res.horizontality_residual,
    }


def handle_transport(req: TransportRequest):
    conn = resolve_connection(req.connection)
    if req.curve.kind == "von_neumann":
        prob = VonNeumannProblem(
            h=require_hermitian(to_array(req.curve.h)),
            rho_in=require_density(to_array(req.curve.rho_in)),
            t_in=req.t_in,
            t_out=req.t_out,
        )
        curve = prob.curve()
    else:
        a = require_density(to_array(req.curve.rho_start))
        b = require_density(to_array(req.curve.rho_end))
        span = req.t_out - req.t_in
        if span <= 0:
            raise ValidationError("transport needs t_out > t_in")

        def sampler(t):
            s = (t - req.t_in) / span
            return (1 - s) * a + s * b

        curve = DensityCurve(
            sampler=sampler, t_in=req.t_in, t_out=req.t_out,
            derivative=lambda t: (b - a) / span,
        )
    w0 = sqrtm_psd(curve.rho(req.t_in)) if req.w0 is None else to_array(req.w0)
    res = transport_ode(conn, curve, w0, steps=req.steps)
    return _transport_outputs(res), _transport_diags(res), _transport_table(res)


def handle_vn(req: VnRequest):
    conn = resolve_connection(req.connection)
    h = require_hermitian(to_array(req.h))
    rho_in = require_density(to_array(req.rho_in))
    prob = VonNeumannProblem(h=h, rho_in=rho_in, t_in=req.t_in, t_out=req.t_out)
    res = vn_transport(prob, conn, steps=req.steps)
    htil = vn_tilde_h(conn, rho_in, h)
    # discrete check of i w' = h w - w h_mod at an interior sample
    i = len(res.ts) // 2
    dt = res.ts[i + 1] - res.ts[i - 1]
    wdot = (res.w_samples[i + 1] - res.w_samples[i - 1]) / dt
    schro = np.linalg.norm(1j * wdot - (h @ res.w_samples[i] - res.w_samples[i] @ htil))
    outputs = _transport_outputs(res)
    outputs["h_modified"] = matrix_data(htil)
    diagnostics = _transport_diags(res)
    diagnostics["generator_equation_residual"] = float(schro)
    return outputs, diagnostics, _transport_table(res)


def handle_holonomy(req: HolonomyRequest):
    conn = resolve_connection(req.connection)
    h = require_hermitian(to_array(req.h))
    rho_in = require_density(to_array(req.rho_in))
    prob = VonNeumannProblem(h=h, rho_in=rho_in, t_in=0.0, t_out=req.t_cycle)
    res = vn_transport(prob, conn, steps=req.steps)
    invariants = holonomy_invariants(res.w_in, res.w_out, req.m_max)
    cyclic_gap = float(
        np.linalg.norm(res.w_in @ dagger(res.w_in) - res.w_out @ dagger(res.w_out))
    )
    outputs = {
        "invariants": [complex_data(z) for z in invariants],
        "relative_phase": complex_data(relative_phase(res.w_in, res.w_out)),
    }
    diagnostics = _transport_diags(res)
    diagnostics["cyclic_gap"] = cyclic_gap
    return outputs, diagnostics, None


def _psi_sampler(spec: PsiSpec):
    if spec.kind == "spin_half_loop":
        theta = float(spec.theta)
        m = int(spec.winding)

        def psi(t):
            return np.array(
                [math.cos(theta / 2), math.sin(theta / 2) * np.exp(1j * m * t)]
            )

        return psi
    ts = np.asarray(spec.t, dtype=float)
    if np.any(np.diff(ts) <= 0):
        raise ValidationError("tabulated psi needs increasing t samples")
    vecs = []
    for v in spec.vectors:
        re = np.asarray(v.re, dtype=float)
        im = np.zeros_like(re) if v.im is None else np.asarray(v.im, dtype=float)
        vecs.append(re + 1j * im)
    comp = np.asarray(vecs)
    interps = [
        (PchipInterpolator(ts, comp[:, j].real), PchipInterpolator(ts, comp[:, j].imag))
        for j in range(comp.shape[1])
    ]

    def psi(t):
        vec = np.array([ir(t) + 1j * ii(t) for ir, ii in interps])
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise ValidationError(f"tabulated psi vanishes near t = {t:g}")
        return vec / norm

    return psi


def handle_noise(req: NoiseRequest):
    conn = resolve_connection(req.connection)
    model = NoiseModel(
        psi=_psi_sampler(req.psi),
        alpha=req.alpha,
        beta=req.beta,
        t_in=req.t_in,
        t_out=req.t_out,
    )
    res = noise_transport(model, conn, steps=req.steps)
    outputs = _transport_outputs(res)
    outputs["mu"] = noise_mu(conn, req.alpha, req.beta) if req.beta > 0 else None
    outputs["kappa"] = noise_kappa(conn)
    try:
        invariants = holonomy_invariants(res.w_in, res.w_out, req.m_max)
        outputs["invariants"] = [complex_data(z) for z in invariants]
        outputs["holonomy_phase"] = float(np.angle(relative_phase(res.w_in, res.w_out)))
    except NotCyclic:
        outputs["invariants"] = None
        outputs["holonomy_phase"] = None
    return outputs, _transport_diags(res), _transport_table(res)


def handle_selftest(req: SelftestRequest):
    results = acceptance.run(req.criteria)
    outputs = {
        "passed": all(r.passed for r in results),
        "results": [
            {"index": r.index, "name": r.name, "passed": r.passed, "detail": r.detail}
            for r in results
        ],
        "lines": [r.line() for r in results],
    }
    return outputs, {}, None


_HANDLERS = {
    "convert": (ConvertRequest, handle_convert),
    "metric": (MetricRequest, handle_metric),
    "transport": (TransportRequest, handle_transport),
    "vn": (VnRequest, handle_vn),
    "holonomy": (HolonomyRequest, handle_holonomy),
    "noise": (NoiseRequest, handle_noise),
    "selftest": (SelftestRequest, handle_selftest),
}


def request_model(command: str):
    return _HANDLERS[command][0]


def run(job: JobSpec) -> Report:
    """Validate and execute one job; deterministic apart from the timing."""
    model, handler = _HANDLERS[job.command]
    req = model.model_validate(job.parameters)
    started = time.perf_counter()
    outputs, diagnostics, table = handler(req)
    diagnostics = dict(diagnostics)
    diagnostics["timing_ms"] = (time.perf_counter() - started) * 1e3
    return Report(
        command=job.command,
        seed=job.seed,
        status="ok",
        inputs=req.model_dump(exclude_none=True),
        outputs=outputs,
        diagnostics=diagnostics,
        table=table,
    )

"""Request/response models for the job service.

Complex matrices travel as separate real and imaginary parts; scalar
functions are referenced by catalog name, constructed from measure atoms,
or tabulated with explicit endpoint limits.
"""

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class MatrixData(BaseModel):
    re: list[list[float]]
    im: Optional[list[list[float]]] = None


class VectorData(BaseModel):
    re: list[float]
    im: Optional[list[float]] = None


class ComplexData(BaseModel):
    re: float
    im: float


class TableFunction(BaseModel):
    """Tabulated scalar function; endpoint limits must be declared."""

    t: list[float]
    value: list[float]
    at_zero: Optional[float] = None
    at_inf: Optional[float] = None

    @model_validator(mode="after")
    def _check(self):
        if len(self.t) != len(self.value):
            raise ValueError("table needs matching t/value lengths")
        if len(self.t) < 4:
            raise ValueError("table needs at least 4 samples")
        return self


class Atom(BaseModel):
    x: float = Field(ge=0.0, le=1.0)
    weight: float = Field(gt=0.0)


class FunctionSpec(BaseModel):
    """Reference to a scalar function: catalog ``name`` (with optional
    power exponent ``s``), measure ``atoms``, or a ``table``."""

    name: Optional[str] = None
    s: Optional[float] = None
    atoms: Optional[list[Atom]] = None
    table: Optional[TableFunction] = None

    @model_validator(mode="after")
    def _check(self):
        if sum(x is not None for x in (self.name, self.atoms, self.table)) != 1:
            raise ValueError("function spec needs exactly one of name/atoms/table")
        return self


class GridSpec(BaseModel):
    lo: float = Field(default=1e-3, gt=0)
    hi: float = Field(default=1e3, gt=0)
    n: int = Field(default=200, ge=2, le=100000)


class ConvertRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    fs: Optional[FunctionSpec] = None
    k: Optional[FunctionSpec] = None
    F: Optional[FunctionSpec] = None
    grid: GridSpec = GridSpec()

    @model_validator(mode="after")
    def _check(self):
        if sum(x is not None for x in (self.fs, self.k, self.F)) != 1:
            raise ValueError("convert needs exactly one of fs/k/F")
        return self


class MetricRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    metric: Literal["bures", "canonical", "monotone", "purification", "induced"]
    rho: Optional[MatrixData] = None
    w: Optional[MatrixData] = None
    xi: MatrixData
    eta: Optional[MatrixData] = None
    fs: Optional[FunctionSpec] = None
    k: Optional[FunctionSpec] = None


class CurveSpec(BaseModel):
    kind: Literal["von_neumann", "linear"]
    h: Optional[MatrixData] = None
    rho_in: Optional[MatrixData] = None
    rho_start: Optional[MatrixData] = None
    rho_end: Optional[MatrixData] = None

    @model_validator(mode="after")
    def _check(self):
        if self.kind == "von_neumann" and (self.h is None or self.rho_in is None):
            raise ValueError("von_neumann curve needs h and rho_in")
        if self.kind == "linear" and (self.rho_start is None or self.rho_end is None):
            raise ValueError("linear curve needs rho_start and rho_end")
        return self


class TransportRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    connection: FunctionSpec
    curve: CurveSpec
    t_in: float = 0.0
    t_out: float = 1.0
    steps: Optional[int] = Field(default=None, ge=1, le=2_000_000)
    w0: Optional[MatrixData] = None


class VnRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    connection: FunctionSpec
    h: MatrixData
    rho_in: MatrixData
    t_in: float = 0.0
    t_out: float = 1.0
    steps: int = Field(default=2000, ge=1, le=2_000_000)


class HolonomyRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    connection: FunctionSpec
    h: MatrixData
    rho_in: MatrixData
    t_cycle: float = Field(gt=0)
    m_max: int = Field(default=3, ge=1, le=32)
    steps: int = Field(default=2000, ge=1, le=2_000_000)


class PsiSpec(BaseModel):
    """Curve of unit vectors: a spin-1/2 loop at fixed polar angle, or a
    tabulated curve (interpolated, then renormalized)."""

    kind: Literal["spin_half_loop", "table"]
    theta: Optional[float] = None
    winding: int = 1
    t: Optional[list[float]] = None
    vectors: Optional[list[VectorData]] = None

    @model_validator(mode="after")
    def _check(self):
        if self.kind == "spin_half_loop" and self.theta is None:
            raise ValueError("spin_half_loop needs theta")
        if self.kind == "table":
            if self.t is None or self.vectors is None or len(self.t) != len(self.vectors):
                raise ValueError("tabulated psi needs matching t/vectors")
            if len(self.t) < 4:
                raise ValueError("tabulated psi needs at least 4 samples")
        return self


class NoiseRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    connection: FunctionSpec
    alpha: float = Field(gt=0)
    beta: float = Field(ge=0)
    psi: PsiSpec
    t_in: float = 0.0
    t_out: float = 6.283185307179586
    steps: Optional[int] = Field(default=None, ge=1, le=2_000_000)
    m_max: int = Field(default=3, ge=1, le=32)


class SelftestRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    criteria: Optional[list[int]] = None


class JobSpec(BaseModel):
    """One unit of work: a command plus its parameter document."""

    command: Literal["convert", "metric", "transport", "vn", "holonomy", "noise", "selftest"]
    parameters: dict = Field(default_factory=dict)
    seed: int = Field(default=0, ge=0)


class TableData(BaseModel):
    columns: list[str]
    rows: list[list[float]]


class Report(BaseModel):
    """Job result: echoed inputs, outputs, and residual diagnostics.

    Everything except ``diagnostics.timing_ms`` is deterministic for a
    fixed (job, seed) on the same build.
    """

    command: str
    seed: int
    status: str = "ok"
    inputs: dict
    outputs: dict
    diagnostics: dict
    table: Optional[TableData] = None

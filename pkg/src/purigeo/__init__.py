"""Numerical geometry of purified density operators.

Core layers: ``matcore`` (dense Hermitian linear algebra), ``funzoo``
(the scalar-function algebra of connections and metrics), ``purify``
(purification space and superoperator calculus), ``connect``
(vertical/horizontal splits and horizontal lifts), ``metrics`` (state and
lift metrics), ``transport`` (horizontal transport, holonomy, the noise
model).  ``service`` exposes the same operations over HTTP; ``cli`` is a
thin client for both.
"""

from . import errors
from .connect import (
    BuresSplit,
    bures_decompose,
    connection_eval,
    horizontal_lift,
    horizontal_part,
    sylvester_solve,
    tangent_split,
    vertical_part,
)
from .funzoo import (
    ConnectionFunction,
    HSsolution,
    MetricFunction,
    MonotoneFunction,
    RadonMeasureSpec,
    RFunction,
    ScalarFunction,
    catalog,
    check_HS,
    connection_catalog,
    default_grid,
    F_from_r,
    f_from_k,
    fs_from_F_HS,
    fs_from_k,
    fs_from_measure,
    hs_solve,
    k_family_from_F,
    k_from_f,
    k_from_F_HS,
    metric_catalog,
    r_from_F,
    rF_from_f,
    rF_from_k,
)
from .matcore import (
    SchmidtData,
    eig_hermitian,
    matfun,
    schmidt_decompose,
    sqrtm_psd,
)
from .metrics import (
    MetricReport,
    bures_inner,
    canonical_inner,
    induced_inner,
    induced_inner_lifted,
    monotone_inner,
    purification_inner,
)
from .purify import (
    PurificationVector,
    SuperopKind,
    coproject,
    modular_conjugate,
    project,
    pushforward,
    superop_apply,
    tomita_conjugation,
    tomita_delta,
    tomita_modified,
)
from .transport import (
    DensityCurve,
    NoiseModel,
    TransportResult,
    VonNeumannProblem,
    holonomy_invariants,
    noise_kappa,
    noise_line_element,
    noise_mu,
    noise_transport,
    relative_phase,
    transport_ode,
    vn_tilde_h,
    vn_transport,
)

__version__ = "0.1.0"

"""Deformed-logarithm divergences with split gradients for multiplicative solvers."""

from ._fields import canonical_summation, total
from .deformed_log import FamilyParams, LogParams, dlog_d, log_d, make_params
from .divergences import (
    BaseSplit,
    DivergenceParams,
    alpha_divergence,
    alpha_split,
    alphabeta_case,
    alphabeta_divergence,
    alphabeta_split,
    beta_divergence,
    beta_split,
    dual_kl,
    f_divergence,
    g_divergence,
    kl,
    mean_fields,
    mean_split,
    taneja_rs,
)
from .errors import (
    BracketError,
    DivgradError,
    DomainError,
    InadmissibleParams,
    InfeasibleCase,
    LineSearchFailure,
    NonDescent,
    ParamError,
    ShapeError,
)
from .invariance import (
    InvarianceFactor,
    ProductSplit,
    factor_ode_residual,
    invariant_split,
    invariant_value,
    nominal_factor,
    star_factor,
)
from .logdiv import (
    GradientDecomposition,
    dual_kl_natural_decomposition,
    ld_divergence,
    ld_gradient,
    ld_value,
    natural_ld2_gradient,
    plain_log,
)
from .verify import FDSpec, fd_gradient, limit_gap, relative_error, scan_minimize

__version__ = "0.1.0"

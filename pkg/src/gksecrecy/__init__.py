"""Secrecy outage probability of wiretap links under composite fading.

The package models legitimate and eavesdropper links whose instantaneous
SNR follows a generalized-K (Gamma-shadowed Nakagami) law, approximates
each law with a Gauss-Laguerre Gamma mixture, and computes the secrecy
outage probability of on-off transmission four independent ways: a
mixed-Gamma closed form, a high-SNR asymptote, adaptive numerical
integration, and Monte Carlo simulation.
"""

from ._accel import active_backend
from .channel import (
    ChannelParams,
    MixedGammaModel,
    check_normalization,
    eval_cdf,
    eval_ccdf,
    eval_pdf,
    fit_mixed_gamma,
    sample_exact,
    sample_surrogate,
)
from .exceptions import (
    ConvergenceError,
    EvaluationError,
    GkSecrecyError,
    InternalConsistencyError,
    InvalidParameterError,
    NonIntegerOrderError,
    NumericalError,
    UnsupportedCaseError,
)
from .montecarlo import (
    McConfig,
    McEstimate,
    McGapPoint,
    mc_gap_curve,
    mc_sop,
    mc_sop_conventional,
)
from .secrecy import (
    AsymptoteReport,
    SecrecyConfig,
    SopEstimate,
    asop_closed_form,
    asop_quadrature,
    asymptote_report,
    sop_closed_form,
    sop_conventional,
    sop_quadrature,
)
from .specfun import (
    GaussLaguerreRule,
    QuadratureSpec,
    gauss_laguerre,
    integrate_semi_infinite,
    ln_upper_gamma_int,
    upper_inc_gamma,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "active_backend",
    "ChannelParams",
    "MixedGammaModel",
    "fit_mixed_gamma",
    "eval_pdf",
    "eval_cdf",
    "eval_ccdf",
    "sample_exact",
    "sample_surrogate",
    "check_normalization",
    "SecrecyConfig",
    "SopEstimate",
    "AsymptoteReport",
    "sop_closed_form",
    "sop_quadrature",
    "sop_conventional",
    "asop_closed_form",
    "asop_quadrature",
    "asymptote_report",
    "McConfig",
    "McEstimate",
    "McGapPoint",
    "mc_sop",
    "mc_sop_conventional",
    "mc_gap_curve",
    "GaussLaguerreRule",
    "QuadratureSpec",
    "gauss_laguerre",
    "upper_inc_gamma",
    "ln_upper_gamma_int",
    "integrate_semi_infinite",
    "GkSecrecyError",
    "InvalidParameterError",
    "InternalConsistencyError",
    "EvaluationError",
    "NumericalError",
    "UnsupportedCaseError",
    "NonIntegerOrderError",
    "ConvergenceError",
]

"""Topp-Leone distribution: estimators of its PDF and CDF, their exact
moments and MSEs, and a Monte Carlo comparison study."""

__version__ = "0.1.0"

from .distribution import ToppLeone, cdf, g, log_g, pdf, quantile, sample
from .errors import ConvergenceError, DomainError
from .estimators import (
    ESTIMATORS,
    ShapeFit,
    UmvueFit,
    curve_cdf,
    curve_pdf,
    fit,
    fit_batch,
    lse,
    mle,
    pce,
    sufficient_statistic,
    umvue,
    wlse,
)
from .moments import (
    mle_cdf_moment,
    mle_cdf_mse,
    mle_pdf_moment,
    mle_pdf_mse,
    umvue_cdf_mse,
    umvue_pdf_mse,
)
from .rng import replicate_stream
from .simulation import MseRecord, StudyConfig, mc_mse, run_study

__all__ = [
    "__version__",
    "ToppLeone", "pdf", "cdf", "quantile", "sample", "g", "log_g",
    "DomainError", "ConvergenceError",
    "ESTIMATORS", "ShapeFit", "UmvueFit", "fit", "fit_batch", "mle", "umvue",
    "pce", "lse", "wlse", "sufficient_statistic", "curve_pdf", "curve_cdf",
    "mle_pdf_moment", "mle_cdf_moment", "mle_pdf_mse", "mle_cdf_mse",
    "umvue_pdf_mse", "umvue_cdf_mse",
    "replicate_stream", "StudyConfig", "MseRecord", "mc_mse", "run_study",
]

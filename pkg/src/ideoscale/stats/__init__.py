from .correlation import (
    CorrelationRow,
    OLSFit,
    ols_fit,
    pearson,
    pearson_by_party,
    spearman,
)
from .gp import GPConfig, RateCurve, gp_rate_fit, laplace_mode, laplace_predict
from .kde import KernelDensity, gaussian_kde, silverman_bandwidth

__all__ = [
    "CorrelationRow", "GPConfig", "KernelDensity", "OLSFit", "RateCurve", "gaussian_kde",
    "gp_rate_fit", "laplace_mode", "laplace_predict", "ols_fit", "pearson",
    "pearson_by_party", "silverman_bandwidth", "spearman",
]

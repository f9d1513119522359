from .base import build_gateway
from .ideal_points import IdealPointResult, run_ideal_points
from .manifest import RunManifest, RunWriter
from .platforms import (
    PartySide,
    PlatformResult,
    PlatformSample,
    build_anchor,
    run_platform_genscore,
    sample_targets,
)
from .probes import CellResult, WhistleCell, dogwhistle_cells, run_dogwhistle, run_vignettes
from .tweets import RateResult, TweetScalingResult, run_rate_over_time, run_tweet_scaling

__all__ = [
    "CellResult", "IdealPointResult", "PartySide", "PlatformResult", "PlatformSample",
    "RateResult", "RunManifest", "RunWriter", "TweetScalingResult", "WhistleCell",
    "build_anchor", "build_gateway", "dogwhistle_cells", "run_dogwhistle", "run_ideal_points",
    "run_platform_genscore", "run_rate_over_time", "run_tweet_scaling", "run_vignettes",
    "sample_targets",
]

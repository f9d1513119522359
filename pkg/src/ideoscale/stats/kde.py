from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import DegenerateInput, EmptySamples

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def silverman_bandwidth(samples: Sequence[float]) -> float:
    """Rule of thumb 1.06 * sigma * n^(-1/5), sigma the sample std (ddof=1)."""
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        raise DegenerateInput("Silverman's rule needs at least two samples; pass a bandwidth")
    sigma = float(x.std(ddof=1))
    if sigma == 0:
        raise DegenerateInput("samples are constant; pass a bandwidth")
    return 1.06 * sigma * x.size ** (-0.2)


@dataclass(frozen=True)
class KernelDensity:
    samples: np.ndarray
    bandwidth: float

    def __call__(self, grid: Sequence[float] | float) -> np.ndarray:
        g = np.atleast_1d(np.asarray(grid, dtype=float))
        u = (g[:, None] - self.samples[None, :]) / self.bandwidth
        return np.exp(-0.5 * u * u).sum(axis=1) * (_INV_SQRT_2PI / (self.samples.size * self.bandwidth))

    def default_grid(self, num: int = 512, pad: float = 4.0) -> np.ndarray:
        lo = self.samples.min() - pad * self.bandwidth
        hi = self.samples.max() + pad * self.bandwidth
        return np.linspace(lo, hi, num)


def gaussian_kde(samples: Sequence[float], bandwidth: float | None = None) -> KernelDensity:
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise EmptySamples("no samples")
    if bandwidth is None:
        bandwidth = silverman_bandwidth(x)
    elif not bandwidth > 0:
        raise ValueError("bandwidth must be positive")
    return KernelDensity(x, float(bandwidth))

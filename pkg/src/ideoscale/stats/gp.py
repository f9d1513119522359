"""Smoothed event rates: GP classification with a logistic link, fitted by the
Laplace approximation (mode by Newton's method, Gaussian around it).

Observations are (time, successes, trials) triples, so raw 0/1 labels
(trials = 1) and aggregated counts share one code path. Time is measured in
fractional days from the earliest event.
"""

from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Sequence

import numpy as np
from scipy.linalg import LinAlgError, cho_solve, cholesky, solve_triangular
from scipy.special import expit

from ..errors import DegenerateInput, NewtonDiverged, SingularKernel

SECONDS_PER_DAY = 86400.0


@dataclass(frozen=True)
class GPConfig:
    lengthscale: float = 90.0  # days
    signal_variance: float = 1.0
    jitter: float = 1e-6
    newton_tol: float = 1e-8
    newton_max_iters: int = 100

    def __post_init__(self):
        for name in ("lengthscale", "signal_variance", "jitter", "newton_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.newton_tol >= 1:
            raise ValueError("newton_tol must be < 1")
        if self.newton_max_iters < 1:
            raise ValueError("newton_max_iters must be >= 1")


@dataclass
class RateCurve:
    grid_times: list
    posterior_mean_rate: list[float]
    latent_mean: list[float]
    latent_variance: list[float]
    iterations: int = 0
    objective_trace: list[float] = field(default_factory=list)


@dataclass
class LaplaceMode:
    times: np.ndarray
    successes: np.ndarray
    trials: np.ndarray
    f: np.ndarray
    grad: np.ndarray
    sqrt_w: np.ndarray
    chol: np.ndarray  # lower factor of I + W^1/2 K W^1/2
    iterations: int
    objective_trace: list[float]


def se_kernel(a: np.ndarray, b: np.ndarray, config: GPConfig) -> np.ndarray:
    d = a[:, None] - b[None, :]
    return config.signal_variance * np.exp(-0.5 * (d / config.lengthscale) ** 2)


def _log_lik(f: np.ndarray, y: np.ndarray, n: np.ndarray) -> float:
    # log sigma(f) * y + log(1 - sigma(f)) * (n - y), stable form
    return float(np.sum(y * f - n * np.logaddexp(0.0, f)))


def laplace_mode(times: Sequence[float], successes: Sequence[float], trials: Sequence[float],
                 config: GPConfig) -> LaplaceMode:
    t = np.asarray(times, dtype=float)
    y = np.asarray(successes, dtype=float)
    n = np.asarray(trials, dtype=float)
    if t.size < 2:
        raise DegenerateInput("need at least two observations")
    if not np.all(np.isfinite(t)):
        raise DegenerateInput("timestamps must be finite")

    K = se_kernel(t, t, config) + config.jitter * np.eye(t.size)
    a = np.zeros(t.size)
    f = np.zeros(t.size)
    objective = _log_lik(f, y, n)
    trace = [objective]

    for iteration in range(1, config.newton_max_iters + 1):
        pi = expit(f)
        w = n * pi * (1.0 - pi)
        sw = np.sqrt(w)
        try:
            L = cholesky(np.eye(t.size) + sw[:, None] * K * sw[None, :], lower=True)
        except LinAlgError as exc:
            raise SingularKernel(str(exc)) from exc
        b = w * f + (y - n * pi)
        a_full = b - sw * cho_solve((L, True), sw * (K @ b))

        # Newton step in a-space, halved until the objective does not decrease.
        step = a_full - a
        for _ in range(30):
            a_new = a + step
            f_new = K @ a_new
            obj_new = -0.5 * float(a_new @ f_new) + _log_lik(f_new, y, n)
            if obj_new >= objective - 1e-12 * max(1.0, abs(objective)):
                break
            step = 0.5 * step
        else:
            a_new, f_new, obj_new = a, f, objective

        delta = float(np.max(np.abs(f_new - f)))
        a, f, objective = a_new, f_new, obj_new
        trace.append(objective)
        if delta < config.newton_tol:
            pi = expit(f)
            w = n * pi * (1.0 - pi)
            sw = np.sqrt(w)
            try:
                L = cholesky(np.eye(t.size) + sw[:, None] * K * sw[None, :], lower=True)
            except LinAlgError as exc:
                raise SingularKernel(str(exc)) from exc
            return LaplaceMode(t, y, n, f, y - n * pi, sw, L, iteration, trace)

    raise NewtonDiverged(f"no convergence within {config.newton_max_iters} Newton iterations")


def laplace_predict(mode: LaplaceMode, grid: Sequence[float], config: GPConfig
                    ) -> tuple[np.ndarray, np.ndarray]:
    g = np.asarray(grid, dtype=float)
    k_star = se_kernel(mode.times, g, config)  # (n_obs, n_grid)
    mean = k_star.T @ mode.grad
    v = solve_triangular(mode.chol, mode.sqrt_w[:, None] * k_star, lower=True)
    var = config.signal_variance - np.sum(v * v, axis=0)
    return mean, np.maximum(var, 0.0)


def link_averaged_rate(mean: np.ndarray, var: np.ndarray, nodes: int = 64) -> np.ndarray:
    """E[logistic(f)] for f ~ N(mean, var), by Gauss-Hermite quadrature."""
    x, w = np.polynomial.hermite.hermgauss(nodes)
    f = mean[:, None] + np.sqrt(2.0 * var)[:, None] * x[None, :]
    return (expit(f) @ w) / math.sqrt(math.pi)


def _to_days(values: Sequence, origin) -> np.ndarray:
    if len(values) and isinstance(values[0], datetime):
        return np.array([(_utc(v) - origin).total_seconds() / SECONDS_PER_DAY for v in values])
    return np.asarray(values, dtype=float) - float(origin)


def _utc(value: datetime) -> datetime:
    return value if value.tzinfo else value.replace(tzinfo=timezone.utc)


def _monthly(events: Sequence[tuple]) -> list[tuple]:
    """Collapse events into per-calendar-month (mean time, successes, trials)."""
    bins: OrderedDict = OrderedDict()
    for stamp, label in sorted(events, key=lambda e: e[0]):
        if isinstance(stamp, datetime):
            key = (stamp.year, stamp.month)
        else:
            key = math.floor(float(stamp) / 30.436875)
        bins.setdefault(key, []).append((stamp, label))
    out = []
    for members in bins.values():
        stamps = [m[0] for m in members]
        if isinstance(stamps[0], datetime):
            origin = _utc(stamps[0])
            offset = np.mean([(_utc(s) - origin).total_seconds() for s in stamps])
            center = origin.timestamp() + offset
            center = datetime.fromtimestamp(center, tz=timezone.utc)
        else:
            center = float(np.mean(stamps))
        out.append((center, sum(int(m[1]) for m in members), len(members)))
    return out


def gp_rate_fit(events: Sequence[tuple], config: GPConfig = GPConfig(),
                grid: Sequence | None = None, *, link_average: bool = False,
                aggregate: str | None = None) -> RateCurve:
    """Fit a smooth rate curve to timestamped binary labels.

    ``events`` are (timestamp, label) pairs; timestamps are datetimes or
    plain numbers of days. ``grid`` uses the same type and defaults to 200
    evenly spaced points over the event span. With ``aggregate="monthly"``
    labels are pooled into per-month binomial counts before fitting.
    ``link_average`` reports E[logistic(f)] instead of logistic(E[f]).
    """
    if len(events) < 2:
        raise DegenerateInput("need at least two events")
    if aggregate not in (None, "none", "monthly"):
        raise ValueError(f"unknown aggregation {aggregate!r}")

    stamps = [e[0] for e in events]
    is_dt = isinstance(stamps[0], datetime)
    origin = min(_utc(s) for s in stamps) if is_dt else min(float(s) for s in stamps)

    if aggregate == "monthly":
        rows = _monthly(events)
        times = _to_days([r[0] for r in rows], origin)
        successes = [r[1] for r in rows]
        trials = [r[2] for r in rows]
    else:
        times = _to_days(stamps, origin)
        successes = [int(e[1]) for e in events]
        trials = [1] * len(events)
        if any(s not in (0, 1) for s in successes):
            raise ValueError("labels must be 0 or 1")

    if grid is None:
        lo, hi = float(np.min(times)), float(np.max(times))
        grid_days = np.linspace(lo, hi, 200)
        if is_dt:
            grid = [datetime.fromtimestamp(origin.timestamp() + d * SECONDS_PER_DAY, tz=timezone.utc)
                    for d in grid_days]
        else:
            grid = list(grid_days + origin)
    else:
        grid = list(grid)
        grid_days = _to_days(grid, origin)

    mode = laplace_mode(times, successes, trials, config)
    mean, var = laplace_predict(mode, grid_days, config)
    rate = link_averaged_rate(mean, var) if link_average else expit(mean)
    return RateCurve(
        grid_times=grid,
        posterior_mean_rate=rate.tolist(),
        latent_mean=mean.tolist(),
        latent_variance=var.tolist(),
        iterations=mode.iterations,
        objective_trace=mode.objective_trace,
    )

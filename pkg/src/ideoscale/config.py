"""Run configuration: TOML file, then CLI overrides.

The merged result is what gets echoed into every run manifest.
"""

from __future__ import annotations

import dataclasses
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .gateway.providers import DEFAULT_BASE_URL
from .gateway.synthetic import AnnotatorConfig
from .model import ExperimentConfig, Roster
from .seeding import fork_seed
from .stats.gp import GPConfig

PROVIDERS = ("live", "replay", "synthetic")


class ConfigError(ValueError):
    pass


@dataclass
class DataSettings:
    roster: str | None = None
    include_obama: bool = True
    corpus: str | None = None
    reference: str | None = None
    anchor: str | None = None
    issues: str | None = None
    subsample: int | None = None
    subsample_by: str | None = None


@dataclass
class PromptSettings:
    spectrum: str = "left/right"
    elaboration: str = ""
    lenient_ranges: bool = False


@dataclass
class GPSettings:
    lengthscale: float = 90.0
    signal_variance: float = 1.0
    jitter: float = 1e-6
    newton_tol: float = 1e-8
    newton_max_iters: int = 100
    link_average: bool = False
    aggregate: str = "none"

    def to_config(self) -> GPConfig:
        return GPConfig(self.lengthscale, self.signal_variance, self.jitter,
                        self.newton_tol, self.newton_max_iters)


@dataclass
class SyntheticSettings:
    sigma: float = 0.3
    # Explicit display_name -> latent table; otherwise drawn per roster.
    traits: dict[str, float] = field(default_factory=dict)
    trait_low: float = -10.0
    trait_high: float = 10.0
    default_tweet_score: float = 0.0
    dogwhistle_base: list[float] = field(default_factory=lambda: [0.5, 0.3, -0.4])
    spike_set: list[int] = field(default_factory=lambda: [1488])
    spike_amplitude: float = 2.5
    vignette_base: float = 0.0
    vignette_effects: dict[str, float] = field(default_factory=lambda: {
        "work_ethic": 1.5, "displaced_people": -2.0,
    })
    platform_left_quantum: float | None = None


@dataclass
class Settings:
    provider: str = "live"
    model_id: str = "gpt-3.5-turbo"
    temperature: float = 0.2
    permutations: int = 1000
    seed: int = 0
    rate_limit: int = 60
    workers: int = 4
    cache_dir: str = ".ideoscale-cache"
    base_url: str = DEFAULT_BASE_URL
    refusal_retries: int = 3
    tweet_retries: int = 0
    repeats: int = 10
    samples_per_issue: int = 40
    method: str = "ideological_cot"
    data: DataSettings = field(default_factory=DataSettings)
    prompt: PromptSettings = field(default_factory=PromptSettings)
    gp: GPSettings = field(default_factory=GPSettings)
    synthetic: SyntheticSettings = field(default_factory=SyntheticSettings)

    def validate(self) -> "Settings":
        if self.provider not in PROVIDERS:
            raise ConfigError(f"provider must be one of {PROVIDERS}, got {self.provider!r}")
        if self.temperature < 0:
            raise ConfigError("temperature must be >= 0")
        for name in ("permutations", "repeats", "workers", "rate_limit", "samples_per_issue"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        for name in ("refusal_retries", "tweet_retries"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")
        if self.gp.aggregate not in ("none", "monthly"):
            raise ConfigError("gp.aggregate must be 'none' or 'monthly'")
        try:
            self.gp.to_config()
        except ValueError as exc:
            raise ConfigError(f"gp: {exc}") from exc
        return self

    def experiment_config(self) -> ExperimentConfig:
        return ExperimentConfig(self.model_id, self.temperature, self.permutations,
                                self.seed, self.rate_limit, Path(self.cache_dir))

    def snapshot(self) -> dict[str, Any]:
        """Everything that determines results (provider plumbing excluded)."""
        data = dataclasses.asdict(self)
        for volatile in ("provider", "cache_dir", "workers", "rate_limit", "base_url"):
            data.pop(volatile)
        # Input files enter the manifest as content digests, not locations.
        for path_field in ("roster", "corpus", "reference", "anchor", "issues"):
            data["data"].pop(path_field)
        return data

    def annotator(self, roster: Roster | None = None) -> AnnotatorConfig:
        syn = self.synthetic
        return AnnotatorConfig(
            traits=synthetic_traits(roster, syn, self.seed) if roster is not None else dict(syn.traits),
            sigma=syn.sigma,
            seed=fork_seed(self.seed, "synthetic-noise"),
            default_tweet_score=syn.default_tweet_score,
            dogwhistle_base=tuple(syn.dogwhistle_base),
            spike_set=frozenset(syn.spike_set),
            spike_amplitude=syn.spike_amplitude,
            vignette_base=syn.vignette_base,
            vignette_effects=dict(syn.vignette_effects),
            platform_left_quantum=syn.platform_left_quantum,
        )


def synthetic_traits(roster: Roster, syn: SyntheticSettings, seed: int) -> dict[str, float]:
    """Explicit traits where given, otherwise seeded Uniform(low, high) draws."""
    import numpy as np

    rng = np.random.default_rng(fork_seed(seed, "synthetic-traits"))
    draws = rng.uniform(syn.trait_low, syn.trait_high, size=roster.n)
    return {
        name: float(syn.traits.get(name, draw))
        for name, draw in zip(roster.names, draws)
    }


def _merge(target: Any, values: dict[str, Any], where: str) -> None:
    known = {f.name: f for f in dataclasses.fields(target)}
    for key, value in values.items():
        if key not in known:
            raise ConfigError(f"unknown setting {where}{key}")
        current = getattr(target, key)
        if dataclasses.is_dataclass(current):
            if not isinstance(value, dict):
                raise ConfigError(f"{where}{key} must be a table")
            _merge(current, value, f"{where}{key}.")
        else:
            setattr(target, key, value)


def load_settings(path: str | Path | None = None, overrides: dict[str, Any] | None = None
                  ) -> Settings:
    settings = Settings()
    if path is not None:
        try:
            with open(path, "rb") as handle:
                raw = tomllib.load(handle)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"invalid TOML in {path}: {exc}") from exc
        _merge(settings, raw, "")
    for dotted, value in (overrides or {}).items():
        if value is None:
            continue
        target = settings
        *parents, leaf = dotted.split(".")
        for part in parents:
            target = getattr(target, part)
        _merge(target, {leaf: value}, dotted[: -len(leaf)])
    return settings.validate()

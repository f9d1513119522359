"""Deterministic synthetic annotator.

Stands in for a chat model when the ground truth must be known: every
response is a function of the request's sidecar, a latent trait table, a
noise scale and a seed. Output text follows the formats the parsers accept,
so elicitation pipelines can be exercised end to end without a network.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping

from ..errors import MissingSidecar, UnknownKind
from ..parsing import NUMBER, format_number
from ..seeding import counter_rng
from .types import ChatRequest, cache_key

KINDS = (
    "ideal_point_list",
    "tweet_score",
    "binary",
    "dogwhistle",
    "vignette",
    "platform_gen",
    "platform_score",
)

MARKER_RE = re.compile(rf"⟦intensity=({NUMBER})⟧")


def intensity_marker(value: float) -> str:
    return f"⟦intensity={format_number(value)}⟧"


@dataclass(frozen=True)
class AnnotatorConfig:
    traits: Mapping[str, float] = field(default_factory=dict)
    sigma: float = 0.0
    seed: int = 0
    # Score for gate-free tweet scoring when an item carries no latent hint.
    default_tweet_score: float = 0.0
    dogwhistle_base: tuple[float, ...] = (0.0, 0.0, 0.0)
    spike_set: frozenset[int] = frozenset({1488})
    spike_amplitude: float = 2.5
    vignette_base: float = 0.0
    # Additive effects keyed by factor level, e.g. "displaced_people" or "father".
    vignette_effects: Mapping[str, float] = field(default_factory=dict)
    # When set, every negative decoded platform intensity is scored as this value.
    platform_left_quantum: float | None = None
    # name -> number of leading request seeds for which the name is left out.
    omit_names_until_seed: Mapping[str, int] = field(default_factory=dict)


class SyntheticAnnotator:
    name = "synthetic"

    def __init__(self, config: AnnotatorConfig):
        self.config = config

    def __call__(self, request: ChatRequest) -> str:
        return synthetic_complete(request, self.config)


def _noise(request: ChatRequest, config: AnnotatorConfig, size: int = 1):
    if config.sigma == 0:
        return [0.0] * size
    rng = counter_rng(config.seed, cache_key(request))
    return list(rng.normal(0.0, config.sigma, size))


def _cot(reasoning: str, value: float) -> str:
    return f"{reasoning}\n\nScore: {format_number(value)}"


def synthetic_complete(request: ChatRequest, config: AnnotatorConfig) -> str:
    sidecar = request.sidecar
    if sidecar is None:
        raise MissingSidecar("synthetic provider needs a sidecar on every request")
    kind, payload = sidecar.kind, sidecar.payload

    if kind == "ideal_point_list":
        names = [
            name for name in payload["names"]
            if request.request_seed >= config.omit_names_until_seed.get(name, 0)
        ]
        noise = _noise(request, config, len(names))
        return "\n".join(
            f"{name}: {format_number(config.traits[name] + eps)}"
            for name, eps in zip(names, noise)
        )

    if kind in ("tweet_score", "binary"):
        latent = payload.get("latent")
        cot = bool(payload.get("cot", False))
        if latent is None:
            if kind == "binary":
                return "Not ideological."
            latent = config.default_tweet_score
        value = latent + _noise(request, config)[0]
        if cot:
            return _cot("The tweet takes a recognizable political stance.", value)
        return format_number(value)

    if kind == "dogwhistle":
        value = config.dogwhistle_base[int(payload["template"])]
        if int(payload["n"]) in config.spike_set:
            value = value + config.spike_amplitude
        value += _noise(request, config)[0]
        if payload.get("variant", "plain") == "cot":
            return _cot("The tweet mobilizes supporters around a political event.", value)
        return format_number(value)

    if kind == "vignette":
        value = config.vignette_base
        for level in ("parent", "mutter", "explanation"):
            value += config.vignette_effects.get(str(payload[level]), 0.0)
        value += _noise(request, config)[0]
        return _cot("The parent's remark hints at their political outlook.", value)

    if kind == "platform_gen":
        target = float(payload["target"])
        issue = payload.get("issue", "the issue")
        return (
            f"Step by step, a lawmaker at this point of the scale would weigh {issue} "
            f"against the rest of their agenda.\n\n"
            f"Position: Pursue a calibrated approach to {issue} {intensity_marker(target)} "
            f"that balances competing priorities."
        )

    if kind == "platform_score":
        found = MARKER_RE.findall(request.last_user_text)
        if not found:
            return "I am unable to score this position."
        value = float(found[-1].replace("−", "-"))
        if config.platform_left_quantum is not None and value < 0:
            value = config.platform_left_quantum
        value += _noise(request, config)[0]
        return _cot("Weighing the position against the anchored scores.", value)

    raise UnknownKind(f"unknown sidecar kind {kind!r}")

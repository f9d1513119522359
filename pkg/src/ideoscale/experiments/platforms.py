"""Anchored generate-then-score round trips of policy platforms."""

from __future__ import annotations

import enum
import logging
import random
import re
from dataclasses import dataclass, field
from typing import Sequence

from ..config import Settings
from ..errors import AllRunsDropped, GenerationRefused, ParseError, StatsError
from ..gateway.client import Gateway
from ..model import Roster
from ..parsing import parse_tail_score
from ..prompts.builders import (
    SPECTRA,
    AnchoredExchange,
    PlatformMode,
    build_ideal_point_prompt,
    build_platform_prompts,
    extract_platform,
    permute,
)
from ..seeding import fork_seed
from ..stats.correlation import OLSFit, ols_fit, spearman
from .base import ask, ordered_map, policy_of
from .ideal_points import elicit_list

log = logging.getLogger(__name__)

_REFUSAL_RE = re.compile(
    r"^\s*(?:i'?m sorry|i am sorry|i can(?:no|')t|i cannot|i am unable|i'm unable|as an ai)",
    re.IGNORECASE,
)


class PartySide(str, enum.Enum):
    LEFT = "left"
    CENTER = "center"
    RIGHT = "right"

    @classmethod
    def of(cls, score: float) -> "PartySide":
        return cls.LEFT if score < 0 else cls.RIGHT if score > 0 else cls.CENTER


@dataclass(frozen=True)
class PlatformSample:
    issue: str
    target_score: float
    generated_text: str
    rescored: float | None = None
    refused: str | None = None

    @property
    def party_side(self) -> PartySide:
        return PartySide.of(self.target_score)


@dataclass(frozen=True)
class IssueFit:
    issue: str
    scope: str  # overall / left / right
    n: int
    fit: OLSFit | None
    spearman: float | None
    error: str | None = None


@dataclass
class PlatformResult:
    anchor: AnchoredExchange
    samples: list[PlatformSample]
    fits: list[IssueFit] = field(default_factory=list)


def build_anchor(roster: Roster, settings: Settings, gateway: Gateway) -> AnchoredExchange:
    """Elicit one list of ideal points whose exchange fixes the scale for
    every later generation and scoring prompt."""
    order = permute(roster, fork_seed(settings.seed, "anchor"))
    parsed, attempts, _, response = elicit_list(roster, order, settings, gateway)
    if len(set(parsed.scores.values())) < 2:
        raise AllRunsDropped(f"anchor elicitation gave no usable scale after {attempts} attempts")
    if not parsed.complete:
        log.warning("anchor lacks %d names; proceeding with %d scores",
                    len(parsed.missing_names), len(parsed.scores))
    prompt = build_ideal_point_prompt(order, SPECTRA[settings.prompt.spectrum],
                                      settings.prompt.elaboration)
    return AnchoredExchange(prompt, response, dict(parsed.scores))


def sample_targets(anchor: AnchoredExchange, issue: str, k: int, seed: int) -> list[float]:
    """Uniform draw without replacement from the distinct anchor values."""
    values = sorted(set(anchor.scores.values()))
    rng = random.Random(fork_seed(seed, "platform-targets", issue))
    return rng.sample(values, min(k, len(values)))


def _is_refusal(text: str) -> bool:
    return not text.strip() or (
        "position:" not in text.lower() and bool(_REFUSAL_RE.match(text))
    )


def _fit(issue: str, scope: str, samples: Sequence[PlatformSample]) -> IssueFit:
    x = [s.target_score for s in samples]
    y = [s.rescored for s in samples]
    try:
        fit = ols_fit(x, y)
    except StatsError as exc:
        return IssueFit(issue, scope, len(x), None, None, str(exc))
    try:
        rho = spearman(x, y)
    except StatsError:
        rho = None
    return IssueFit(issue, scope, len(x), fit, rho)


def run_platform_genscore(issues: Sequence[str], anchor: AnchoredExchange, settings: Settings,
                          gateway: Gateway, *, targets: dict[str, list[float]] | None = None
                          ) -> PlatformResult:
    """Generate a platform at each sampled target, re-score it under the same
    anchor, and regress rescored on target per issue.

    ``targets`` overrides the sampled target scores per issue.
    """
    policy = policy_of(settings)
    jobs = [
        (issue, target)
        for issue in issues
        for target in (targets[issue] if targets and issue in targets else
                       sample_targets(anchor, issue, settings.samples_per_issue, settings.seed))
    ]

    def one(job: tuple[str, float]) -> PlatformSample:
        issue, target = job
        gen = build_platform_prompts(issue, target, anchor, PlatformMode.GENERATE)
        text = ask(gateway, settings, gen, "platform_gen",
                   {"target": target, "issue": issue}).text
        if _is_refusal(text):
            exc = GenerationRefused(f"generation refused for {issue!r} at {target}")
            log.info("%s", exc)
            return PlatformSample(issue, target, text, None, str(exc))
        platform = extract_platform(text)
        if not platform:
            return PlatformSample(issue, target, text, None, "empty platform text")
        score_msgs = build_platform_prompts(issue, None, anchor, PlatformMode.SCORE, platform)
        reply = ask(gateway, settings, score_msgs, "platform_score", {"issue": issue}).text
        try:
            rescored = parse_tail_score(reply, policy)
        except ParseError:
            rescored = None
        return PlatformSample(issue, target, platform, rescored)

    samples = ordered_map(one, jobs, settings.workers)

    fits = []
    for issue in issues:
        done = [s for s in samples if s.issue == issue and s.rescored is not None]
        fits.append(_fit(issue, "overall", done))
        fits.append(_fit(issue, "left", [s for s in done if s.party_side is PartySide.LEFT]))
        fits.append(_fit(issue, "right", [s for s in done if s.party_side is PartySide.RIGHT]))
    return PlatformResult(anchor, samples, fits)

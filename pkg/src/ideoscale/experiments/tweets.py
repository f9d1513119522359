"""Sequential text scoring with a rolling self-anchoring window, and the
ideological-share rate curve built on the binary gate."""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass, field
from datetime import datetime
from typing import Callable, Sequence

from ..aggregate import AuthorSummary, summarize_text_scores
from ..config import Settings
from ..gateway.client import Gateway
from ..model import Method, Outcome, OutcomeKind, Roster, TextItem, TextJudgment
from ..parsing import (
    ParsePolicy,
    format_number,
    parse_bare_score,
    parse_binary_or_score,
    parse_cot_outcome,
)
from ..prompts.builders import AnchorWindow, build_tweet_prompt
from ..stats.gp import RateCurve, gp_rate_fit
from .base import ask, ordered_map, policy_of

NOT_IDEOLOGICAL_OUTPUT = "Not ideological."

_PARSERS: dict[Method, Callable[[str, ParsePolicy], Outcome]] = {
    Method.ALL_TWEETS: parse_bare_score,
    Method.IDEOLOGICAL_ONLY: parse_binary_or_score,
    Method.IDEOLOGICAL_ZERO_COT: parse_cot_outcome,
}


def _sidecar(method: Method, item: TextItem) -> tuple[str, dict]:
    if method is Method.ALL_TWEETS:
        return "tweet_score", {"latent": item.latent_hint}
    return "binary", {"latent": item.latent_hint, "cot": method is Method.IDEOLOGICAL_ZERO_COT}


def window_output(outcome: Outcome) -> str | None:
    """What an outcome contributes to the rolling window (None: nothing)."""
    if outcome.kind is OutcomeKind.SCORED:
        return format_number(outcome.score)
    if outcome.kind is OutcomeKind.NOT_IDEOLOGICAL:
        return NOT_IDEOLOGICAL_OUTPUT
    return None


@dataclass(frozen=True)
class WindowAudit:
    item_id: str
    author_id: str
    rolling: tuple[tuple[str, str], ...]


@dataclass
class TweetScalingResult:
    method: Method
    judgments: list[TextJudgment]
    summaries: dict[str, AuthorSummary]
    audit: list[WindowAudit] = field(default_factory=list)
    authors: dict[str, str] = field(default_factory=dict)  # item id -> author id

    def kde_inputs(self, roster: Roster | None = None) -> dict[str, list[float]]:
        """Author means grouped by party (or "unknown" for unlisted authors)."""
        by_id = roster.by_id() if roster is not None else {}
        groups: dict[str, list[float]] = {}
        for author, summary in sorted(self.summaries.items()):
            if summary.mean is None:
                continue
            leg = by_id.get(author)
            party = leg.party.value if leg is not None else "unknown"
            groups.setdefault(party, []).append(summary.mean)
        return groups


def author_streams(items: Sequence[TextItem]) -> "OrderedDict[str, list[TextItem]]":
    """Group by author in first-appearance order; each stream is time ordered
    (stable, so undated items keep file order)."""
    streams: OrderedDict[str, list[TextItem]] = OrderedDict()
    for item in items:
        streams.setdefault(item.author_id or "", []).append(item)
    for author, stream in streams.items():
        if all(i.timestamp is not None for i in stream):
            stream.sort(key=lambda i: i.timestamp)
    return streams


def _judge(item: TextItem, method: Method, window: AnchorWindow, settings: Settings,
           gateway: Gateway, policy: ParsePolicy, retries: int) -> TextJudgment:
    prompt = build_tweet_prompt(method, window, item)
    kind, payload = _sidecar(method, item)
    outcome, ref = None, ""
    for attempt in range(retries + 1):
        response = ask(gateway, settings, prompt, kind, payload, request_seed=attempt)
        outcome, ref = _PARSERS[method](response.text, policy), response.key
        if outcome.kind is not OutcomeKind.PARSE_FAILURE:
            break
    return TextJudgment(item.id, outcome, ref, method)


def run_tweet_scaling(corpus: Sequence[TextItem], roster: Roster | None, method: Method | str,
                      settings: Settings, gateway: Gateway) -> TweetScalingResult:
    method = Method.parse(method)
    policy = policy_of(settings)
    streams = author_streams(corpus)

    def one_author(author: str) -> tuple[list[TextJudgment], list[WindowAudit]]:
        window = AnchorWindow()
        judgments, audit = [], []
        for item in streams[author]:
            audit.append(WindowAudit(item.id, author, window.rolling))
            judgment = _judge(item, method, window, settings, gateway, policy,
                              settings.tweet_retries)
            judgments.append(judgment)
            output = window_output(judgment.outcome)
            if output is not None:
                window = window.push(item.body, output)
        return judgments, audit

    per_author = ordered_map(one_author, list(streams), settings.workers)
    judgments = [j for js, _ in per_author for j in js]
    audit = [a for _, au in per_author for a in au]
    authors = {item.id: item.author_id or "" for stream in streams.values() for item in stream}
    summaries = summarize_text_scores(judgments, authors)
    return TweetScalingResult(method, judgments, summaries, audit, authors)


@dataclass
class RateResult:
    judgments: list[TextJudgment]
    events: list[tuple[datetime, int]]
    curve: RateCurve


def run_rate_over_time(corpus: Sequence[TextItem], settings: Settings, gateway: Gateway
                       ) -> RateResult:
    """Binary gate with the fixed examples only; 1 = ideological, 0 = not."""
    if any(item.timestamp is None for item in corpus):
        raise ValueError("rate curves need timestamped items")
    items = sorted(corpus, key=lambda i: i.timestamp)
    policy = policy_of(settings)
    window = AnchorWindow()

    def one(item: TextItem) -> TextJudgment:
        return _judge(item, Method.IDEOLOGICAL_ONLY, window, settings, gateway, policy,
                      settings.tweet_retries)

    judgments = ordered_map(one, items, settings.workers)
    events = [
        (item.timestamp, int(j.outcome.kind is OutcomeKind.SCORED))
        for item, j in zip(items, judgments)
        if j.outcome.kind is not OutcomeKind.PARSE_FAILURE
    ]
    gp = settings.gp
    curve = gp_rate_fit(events, gp.to_config(), None, link_average=gp.link_average,
                        aggregate=gp.aggregate)
    return RateResult(judgments, events, curve)

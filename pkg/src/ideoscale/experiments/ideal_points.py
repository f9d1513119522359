"""Permutation-marginalized list scoring of a roster."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from ..aggregate import NormalizationReport, marginalize, normalize_matrix
from ..config import Settings
from ..errors import AllRunsDropped
from ..gateway.client import Gateway
from ..model import IdealPointEstimate, Roster, ScoreMatrix
from ..parsing import ParsedList, parse_name_scores
from ..prompts.builders import SPECTRA, build_ideal_point_prompt, permute
from ..seeding import fork_seed
from .base import ask, ordered_map, policy_of

log = logging.getLogger(__name__)


@dataclass
class RunOutcome:
    run: int
    order: list[str]
    attempts: int
    parsed: ParsedList
    transcript_ref: str


@dataclass
class IdealPointResult:
    matrix: ScoreMatrix
    kept_runs: list[int]
    estimates: list[IdealPointEstimate]
    report: NormalizationReport
    runs: list[RunOutcome] = field(default_factory=list)

    def mean_by_id(self) -> dict[str, float]:
        return {e.entity_id: e.mean for e in self.estimates}


def elicit_list(roster: Roster, order: list[str], settings: Settings, gateway: Gateway
                ) -> tuple[ParsedList, int, str, str]:
    """One list-scoring prompt, re-asked (new request seed) while names are
    missing, up to ``refusal_retries`` extra attempts.

    Returns the parse, attempts used, cache key and text of the last reply.
    """
    prompt = build_ideal_point_prompt(order, SPECTRA[settings.prompt.spectrum],
                                      settings.prompt.elaboration)
    policy = policy_of(settings)
    parsed, ref, text = None, "", ""
    for attempt in range(settings.refusal_retries + 1):
        response = ask(gateway, settings, prompt, "ideal_point_list", {"names": order},
                       request_seed=attempt)
        text, ref = response.text, response.key
        parsed = parse_name_scores(text, order, policy)
        if parsed.complete:
            return parsed, attempt + 1, ref, text
    return parsed, settings.refusal_retries + 1, ref, text


def run_ideal_points(roster: Roster, settings: Settings, gateway: Gateway) -> IdealPointResult:
    if roster.n < 2:
        raise ValueError("need at least two entities to scale")

    def one_run(s: int) -> RunOutcome:
        order = permute(roster, fork_seed(settings.seed, "permutation", s))
        parsed, attempts, ref, _ = elicit_list(roster, order, settings, gateway)
        return RunOutcome(s, order, attempts, parsed, ref)

    runs = ordered_map(one_run, range(settings.permutations), settings.workers)

    report = NormalizationReport()
    raw: dict[int, list[float]] = {}
    for outcome in runs:
        if not outcome.parsed.complete:
            missing = ", ".join(outcome.parsed.missing_names[:5])
            report.run_means[outcome.run] = float("nan")
            report.run_stds[outcome.run] = float("nan")
            report.drop(outcome.run, f"missing names after {outcome.attempts} attempts: {missing}")
            continue
        raw[outcome.run] = [outcome.parsed.scores[name] for name in roster.names]

    matrix, kept, report = normalize_matrix(raw, roster.ids, report)
    if not kept:
        raise AllRunsDropped(f"all {settings.permutations} runs were dropped")
    if report.runs_dropped:
        log.warning("%d of %d runs dropped", len(report.runs_dropped), settings.permutations)
    return IdealPointResult(matrix, kept, marginalize(matrix), report, runs)

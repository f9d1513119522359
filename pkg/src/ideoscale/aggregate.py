"""Per-run standardization and averaging over permutation runs."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DegenerateRun, EmptyMatrix, TooFewScores
from .model import IdealPointEstimate, OutcomeKind, ScoreMatrix, TextJudgment

QUANTILE_LEVELS = (0.05, 0.25, 0.50, 0.75, 0.95)


def z_normalize_run(scores: Sequence[float]) -> list[float]:
    """Standardize one run to mean 0 and population standard deviation 1."""
    x = np.asarray(scores, dtype=float)
    if x.size < 2:
        raise TooFewScores(f"need at least 2 scores to standardize, got {x.size}")
    std = x.std()
    if std == 0 or not math.isfinite(std):
        raise DegenerateRun("all scores in the run are equal")
    z = (x - x.mean()) / std
    # One corrective pass removes the rounding residue of the first.
    z = (z - z.mean()) / z.std()
    return z.tolist()


@dataclass
class NormalizationReport:
    run_means: dict[int, float] = field(default_factory=dict)
    run_stds: dict[int, float] = field(default_factory=dict)
    runs_dropped: dict[int, str] = field(default_factory=dict)

    @property
    def retained(self) -> list[int]:
        return sorted(self.run_means.keys() - self.runs_dropped.keys())

    def drop(self, run: int, reason: str) -> None:
        self.runs_dropped[run] = reason


def normalize_matrix(raw_runs: Mapping[int, Sequence[float]], entity_ids: Sequence[str],
                     report: NormalizationReport | None = None
                     ) -> tuple[ScoreMatrix, list[int], NormalizationReport]:
    """Z-normalize each complete run; degenerate runs are dropped and logged.

    Returns the normalized matrix, the run indices backing its rows, and the
    report (the one passed in, if any, so upstream drops are kept).
    """
    report = report if report is not None else NormalizationReport()
    rows, kept = [], []
    for run in sorted(raw_runs):
        scores = np.asarray(raw_runs[run], dtype=float)
        report.run_means[run] = float(scores.mean())
        report.run_stds[run] = float(scores.std())
        try:
            rows.append(tuple(z_normalize_run(scores)))
        except (DegenerateRun, TooFewScores) as exc:
            report.drop(run, str(exc))
            continue
        kept.append(run)
    return ScoreMatrix(tuple(entity_ids), tuple(rows), normalized=True), kept, report


def marginalize(matrix: ScoreMatrix) -> list[IdealPointEstimate]:
    if not matrix.runs:
        raise EmptyMatrix("no runs to average")
    if not matrix.normalized:
        raise ValueError("marginalize expects a normalized matrix")
    data = np.asarray(matrix.runs, dtype=float)
    estimates = []
    for j, entity in enumerate(matrix.entity_ids):
        column = data[:, j]
        q = np.quantile(column, QUANTILE_LEVELS)
        estimates.append(IdealPointEstimate(
            entity_id=entity,
            mean=math.fsum(column.tolist()) / len(column),
            per_run_scores=tuple(column.tolist()),
            quantiles=tuple(float(v) for v in q),
        ))
    return estimates


@dataclass(frozen=True)
class AuthorSummary:
    author_id: str
    mean: float | None
    n_scored: int
    n_not_ideological: int
    n_failed: int
    n_total: int

    @property
    def ideological_share(self) -> float | None:
        judged = self.n_scored + self.n_not_ideological
        return self.n_scored / judged if judged else None


def summarize_text_scores(judgments: Iterable[TextJudgment],
                          author_of: Mapping[str, str | None] | None = None
                          ) -> dict[str, AuthorSummary]:
    """Per-author mean of scored items plus outcome counts.

    ``author_of`` maps item ids to authors; without it everything is pooled
    under the empty author id.
    """
    buckets: dict[str, list[TextJudgment]] = defaultdict(list)
    for judgment in judgments:
        author = (author_of or {}).get(judgment.item_id) or ""
        buckets[author].append(judgment)

    out = {}
    for author, items in buckets.items():
        scores = [j.outcome.score for j in items if j.outcome.kind is OutcomeKind.SCORED]
        out[author] = AuthorSummary(
            author_id=author,
            mean=math.fsum(scores) / len(scores) if scores else None,
            n_scored=len(scores),
            n_not_ideological=sum(j.outcome.kind is OutcomeKind.NOT_IDEOLOGICAL for j in items),
            n_failed=sum(j.outcome.kind is OutcomeKind.PARSE_FAILURE for j in items),
            n_total=len(items),
        )
    return out

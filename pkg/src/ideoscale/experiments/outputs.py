"""Result and plot-data tables for each experiment."""

from __future__ import annotations

import numpy as np

from ..aggregate import QUANTILE_LEVELS
from ..errors import StatsError
from ..model import Roster
from ..stats.correlation import CorrelationRow, pearson_by_party
from ..stats.kde import gaussian_kde
from .ideal_points import IdealPointResult
from .manifest import RunWriter
from .platforms import PlatformResult
from .probes import CellResult, WhistleCell
from .tweets import RateResult, TweetScalingResult

QUANTILE_COLUMNS = tuple(f"p{round(q * 100)}" for q in QUANTILE_LEVELS)
CORRELATION_HEADER = ("scope", "method_a", "method_b", "r", "n", "excluded", "error")
KDE_POINTS = 256


def correlation_rows(rows: list[CorrelationRow]):
    return ([r.scope, r.method_a, r.method_b, r.r, r.n, r.excluded, r.error] for r in rows)


def reference_correlations(estimates: dict[str, float], roster: Roster, label: str
                           ) -> list[CorrelationRow]:
    rows = []
    for method in roster.reference_methods():
        reference = {leg.id: leg.reference_scores.get(method) for leg in roster}
        try:
            rows.extend(pearson_by_party(estimates, reference, roster, label, method))
        except StatsError:
            continue
    return rows


def write_ideal_points(writer: RunWriter, result: IdealPointResult, roster: Roster) -> None:
    by_id = roster.by_id()
    writer.table("estimates.csv", ("entity_id", "display_name", "party", "mean",
                                   *QUANTILE_COLUMNS, "n_runs"),
                 ([e.entity_id, by_id[e.entity_id].display_name, by_id[e.entity_id].party,
                   e.mean, *e.quantiles, len(e.per_run_scores)] for e in result.estimates))
    writer.table("runs.csv", ("run", "entity_id", "z_score"),
                 ([run, entity, score]
                  for run, row in zip(result.kept_runs, result.matrix.runs)
                  for entity, score in zip(result.matrix.entity_ids, row)))
    report = result.report
    writer.table("normalization.csv", ("run", "raw_mean", "raw_std", "retained", "drop_reason"),
                 ([run, report.run_means[run], report.run_stds[run],
                   run not in report.runs_dropped, report.runs_dropped.get(run)]
                  for run in sorted(report.run_means)))
    writer.table("correlations.csv", CORRELATION_HEADER, correlation_rows(
        reference_correlations(result.mean_by_id(), roster, "ideal_points")))


def write_tweet_scaling(writer: RunWriter, result: TweetScalingResult,
                        roster: Roster | None) -> None:
    writer.table("judgments.csv", ("item_id", "author_id", "method", "outcome", "score",
                                   "reason", "transcript_ref"),
                 ([j.item_id, result.authors.get(j.item_id), j.method, j.outcome.kind,
                   j.outcome.score, j.outcome.reason, j.transcript_ref]
                  for j in result.judgments))
    writer.table("authors.csv", ("author_id", "mean", "n_scored", "n_not_ideological",
                                 "n_failed", "n_total", "ideological_share"),
                 ([s.author_id, s.mean, s.n_scored, s.n_not_ideological, s.n_failed,
                   s.n_total, s.ideological_share]
                  for _, s in sorted(result.summaries.items())))
    writer.table("window_audit.csv", ("item_id", "author_id", "position", "tweet", "output"),
                 ([a.item_id, a.author_id, i, tweet, output]
                  for a in result.audit for i, (tweet, output) in enumerate(a.rolling)))
    writer.table("kde.csv", ("group", "x", "density", "bandwidth", "n"),
                 _kde_rows(result.kde_inputs(roster)))
    if roster is not None:
        means = {a: s.mean for a, s in result.summaries.items() if s.mean is not None}
        writer.table("correlations.csv", CORRELATION_HEADER, correlation_rows(
            reference_correlations(means, roster, f"tweets_{result.method.value}")))


def _kde_rows(groups: dict[str, list[float]]):
    """Densities on one shared grid so groups overlay directly."""
    fitted = {}
    for group, values in sorted(groups.items()):
        try:
            fitted[group] = gaussian_kde(values)
        except StatsError:
            continue
    if not fitted:
        return []
    lo = min(k.default_grid()[0] for k in fitted.values())
    hi = max(k.default_grid()[-1] for k in fitted.values())
    grid = np.linspace(lo, hi, KDE_POINTS)
    return [[group, float(x), float(d), kde.bandwidth, kde.samples.size]
            for group, kde in fitted.items() for x, d in zip(grid, kde(grid))]


def write_rate(writer: RunWriter, result: RateResult) -> None:
    writer.table("judgments.csv", ("item_id", "outcome", "score", "reason", "transcript_ref"),
                 ([j.item_id, j.outcome.kind, j.outcome.score, j.outcome.reason,
                   j.transcript_ref] for j in result.judgments))
    curve = result.curve
    writer.table("rate_curve.csv", ("time", "rate", "latent_mean", "latent_variance"),
                 zip(curve.grid_times, curve.posterior_mean_rate, curve.latent_mean,
                     curve.latent_variance))


def _cell_columns(cell: CellResult) -> list:
    return [cell.mean, cell.k, len(cell.failures)]


def write_dogwhistle(writer: RunWriter, table: list[tuple[WhistleCell, CellResult]]) -> None:
    writer.table("dogwhistle.csv", ("template", "n", "variant", "mean", "k", "failures"),
                 ([c.template_name, c.n, c.variant, *_cell_columns(r)] for c, r in table))


def write_vignettes(writer: RunWriter, grid) -> None:
    writer.table("vignettes.csv", ("parent", "mutter", "explanation", "mean", "k", "failures",
                                   "out_of_range"),
                 ([s.parent, s.mutter, s.explanation, *_cell_columns(r), r.out_of_range]
                  for s, r in grid))


def write_platforms(writer: RunWriter, result: PlatformResult) -> None:
    writer.json("anchor.json", {"prompt": result.anchor.prompt,
                                "response": result.anchor.response,
                                "scores": result.anchor.scores})
    writer.table("platforms.csv", ("issue", "target_score", "party_side", "rescored",
                                   "refused", "generated_text"),
                 ([s.issue, s.target_score, s.party_side, s.rescored, s.refused,
                   s.generated_text] for s in result.samples))
    writer.table("platform_fits.csv", ("issue", "scope", "n", "slope", "intercept", "r",
                                       "spearman", "error"),
                 ([f.issue, f.scope, f.n,
                   *(f.fit if f.fit is not None else (None, None, None)),
                   f.spearman, f.error] for f in result.fits))

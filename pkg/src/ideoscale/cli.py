"""Command-line entry point.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 provider error. Diagnostics go to standard error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Sequence

from .config import ConfigError, Settings, load_settings
from .errors import AggregateError, DataError, ProviderError, StatsError
from .experiments import (
    build_anchor,
    build_gateway,
    run_dogwhistle,
    run_ideal_points,
    run_platform_genscore,
    run_rate_over_time,
    run_tweet_scaling,
    run_vignettes,
)
from .experiments import outputs
from .experiments.manifest import RunManifest, RunWriter
from .gateway.cache import ResponseCache
from .io import (
    digest_file,
    digest_text,
    load_corpus,
    load_issues,
    load_roster,
    read_csv,
    read_float,
    roster_to_csv,
)
from .model import Method
from .prompts.builders import SPECTRA, AnchoredExchange
from .stats.correlation import pearson_by_party

log = logging.getLogger("ideoscale")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_PROVIDER = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _global_flags() -> argparse.ArgumentParser:
    # SUPPRESS keeps a flag given before the subcommand from being reset by
    # the subparser's copy of the same flag.
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--config", default=argparse.SUPPRESS, help="TOML settings file")
    parent.add_argument("--provider", choices=("live", "replay", "synthetic"),
                        default=argparse.SUPPRESS)
    parent.add_argument("--out", default=argparse.SUPPRESS, help="output directory")
    parent.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="root seed")
    parent.add_argument("--cache-dir", default=argparse.SUPPRESS)
    parent.add_argument("--workers", type=int, default=argparse.SUPPRESS)
    parent.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    return parent


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = _Parser(prog="ideoscale", parents=[common],
                     description="Elicit and validate ideological scalings from chat models.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def command(name: str, help_text: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, parents=[common], help=help_text, description=help_text)

    p = command("ideal-points", "scale a roster from permuted list prompts")
    p.add_argument("--roster", help="roster CSV (default: bundled 114th Senate)")
    p.add_argument("--permutations", type=int)
    p.add_argument("--spectrum", choices=sorted(SPECTRA))
    p.add_argument("--no-obama", action="store_true", help="leave Barack Obama out")

    p = command("scale-tweets", "score a text corpus with a rolling anchor window")
    p.add_argument("--corpus", help="JSONL corpus")
    p.add_argument("--method", help="1/all, 2/ideological, 3/ideological_cot")
    p.add_argument("--roster", help="roster CSV mapping author ids to parties")
    p.add_argument("--subsample", type=int)
    p.add_argument("--subsample-by", choices=("author", "month"))

    p = command("rate-curve", "ideological share over time via GP classification")
    p.add_argument("--corpus", help="JSONL corpus with timestamps")
    p.add_argument("--subsample", type=int)
    p.add_argument("--lengthscale", type=float, help="days")
    p.add_argument("--link-average", action="store_true", default=None)
    p.add_argument("--aggregate", choices=("none", "monthly"))

    p = command("dogwhistle", "coded-number sweep over three tweet templates")
    p.add_argument("--repeats", type=int)

    p = command("vignettes", "dinner-table vignette grid")
    p.add_argument("--repeats", type=int)

    p = command("platforms", "anchored platform generation and re-scoring")
    p.add_argument("--roster")
    p.add_argument("--issues", help="one issue per line (default: bundled 18)")
    p.add_argument("--anchor", help="stored anchor exchange (JSON); elicited if absent")
    p.add_argument("--samples-per-issue", type=int)

    p = command("correlate", "correlate a score table with reference scalings")
    p.add_argument("--estimates", required=True,
                   help="estimates.csv or authors.csv from an earlier run")
    p.add_argument("--reference", help="reference table CSV (default: bundled roster)")
    p.add_argument("--column", default=None, help="score column (default: mean)")

    p = command("cache", "inspect or clean the response cache")
    p.add_argument("action", choices=("inspect", "gc"))
    p.add_argument("--purge-provider", help="with gc: also drop records from this provider")
    return parser


_OVERRIDES = {
    "provider": "provider", "seed": "seed", "cache_dir": "cache_dir", "workers": "workers",
    "permutations": "permutations", "method": "method", "repeats": "repeats",
    "samples_per_issue": "samples_per_issue", "spectrum": "prompt.spectrum",
    "roster": "data.roster", "corpus": "data.corpus", "issues": "data.issues",
    "anchor": "data.anchor", "subsample": "data.subsample", "subsample_by": "data.subsample_by",
    "reference": "data.reference", "lengthscale": "gp.lengthscale",
    "link_average": "gp.link_average", "aggregate": "gp.aggregate",
}


def settings_from_args(args: argparse.Namespace) -> Settings:
    given = vars(args)
    overrides: dict[str, Any] = {
        dotted: given[name] for name, dotted in _OVERRIDES.items() if given.get(name) is not None
    }
    if given.get("no_obama"):
        overrides["data.include_obama"] = False
    if "method" in overrides:
        try:
            overrides["method"] = Method.parse(overrides["method"]).value
        except ValueError:
            raise ConfigError(f"unknown method {overrides['method']!r}") from None
    return load_settings(given.get("config"), overrides)


def _roster(settings: Settings):
    return load_roster(settings.data.roster, include_obama=settings.data.include_obama)


def _require(value: str | None, flag: str) -> str:
    if not value:
        raise ConfigError(f"{flag} is required (flag or [data] setting)")
    return value


def _writer(out: Path, experiment: str, settings: Settings, digests: dict[str, str]) -> RunWriter:
    return RunWriter(out, RunManifest(experiment, settings.snapshot(), digests))


def _corpus(settings: Settings):
    path = _require(settings.data.corpus, "--corpus")
    loaded = load_corpus(path, subsample=settings.data.subsample, seed=settings.seed,
                         group_by=settings.data.subsample_by,
                         allow_hints=settings.provider == "synthetic")
    for line_no, reason in loaded.rejections:
        print(f"{path}:{line_no}: rejected: {reason}", file=sys.stderr)
    return loaded.items, digest_file(path)


def cmd_ideal_points(settings: Settings, out: Path) -> None:
    roster = _roster(settings)
    gateway = build_gateway(settings, roster)
    writer = _writer(out, "ideal-points", settings, {"roster": digest_text(roster_to_csv(roster))})
    result = run_ideal_points(roster, settings, gateway)
    outputs.write_ideal_points(writer, result, roster)
    writer.close(gateway)


def cmd_scale_tweets(settings: Settings, out: Path) -> None:
    items, corpus_digest = _corpus(settings)
    roster = _roster(settings) if settings.data.roster else load_roster(include_obama=True)
    gateway = build_gateway(settings)
    writer = _writer(out, "scale-tweets", settings,
                     {"corpus": corpus_digest, "roster": digest_text(roster_to_csv(roster))})
    result = run_tweet_scaling(items, roster, settings.method, settings, gateway)
    outputs.write_tweet_scaling(writer, result, roster)
    writer.close(gateway)


def cmd_rate_curve(settings: Settings, out: Path) -> None:
    items, corpus_digest = _corpus(settings)
    gateway = build_gateway(settings)
    writer = _writer(out, "rate-curve", settings, {"corpus": corpus_digest})
    outputs.write_rate(writer, run_rate_over_time(items, settings, gateway))
    writer.close(gateway)


def cmd_dogwhistle(settings: Settings, out: Path) -> None:
    gateway = build_gateway(settings)
    writer = _writer(out, "dogwhistle", settings, {})
    outputs.write_dogwhistle(writer, run_dogwhistle(settings, gateway))
    writer.close(gateway)


def cmd_vignettes(settings: Settings, out: Path) -> None:
    gateway = build_gateway(settings)
    writer = _writer(out, "vignettes", settings, {})
    outputs.write_vignettes(writer, run_vignettes(settings, gateway))
    writer.close(gateway)


def cmd_platforms(settings: Settings, out: Path) -> None:
    roster = _roster(settings)
    issues = load_issues(settings.data.issues)
    gateway = build_gateway(settings, roster)
    digests = {"roster": digest_text(roster_to_csv(roster)),
               "issues": digest_text("\n".join(issues))}
    if settings.data.anchor:
        try:
            anchor = AnchoredExchange.load(settings.data.anchor)
        except (OSError, ValueError, KeyError) as exc:
            raise DataError(f"cannot load anchor {settings.data.anchor}: {exc}") from exc
        digests["anchor"] = digest_file(settings.data.anchor)
    else:
        anchor = None
    writer = _writer(out, "platforms", settings, digests)
    if anchor is None:
        anchor = build_anchor(roster, settings, gateway)
    outputs.write_platforms(writer, run_platform_genscore(issues, anchor, settings, gateway))
    writer.close(gateway)


def cmd_correlate(settings: Settings, out: Path, estimates_path: str, column: str | None) -> None:
    roster = load_roster(settings.data.reference, include_obama=settings.data.include_obama)
    try:
        rows = read_csv(estimates_path)
    except OSError as exc:
        raise DataError(f"cannot read {estimates_path}: {exc}") from exc
    if not rows:
        raise DataError(f"{estimates_path}: no rows")
    id_col = "entity_id" if "entity_id" in rows[0] else "author_id"
    column = column or "mean"
    if id_col not in rows[0] or column not in rows[0]:
        raise DataError(f"{estimates_path}: needs columns {id_col!r} and {column!r}")
    try:
        estimates = {r[id_col]: read_float(r[column]) for r in rows}
    except ValueError as exc:
        raise DataError(f"{estimates_path}: {exc}") from exc
    estimates = {k: v for k, v in estimates.items() if v is not None}

    writer = _writer(out, "correlate", settings, {
        "estimates": digest_file(estimates_path), "reference": digest_text(roster_to_csv(roster)),
    })
    found = []
    for method in roster.reference_methods():
        reference = {leg.id: leg.reference_scores.get(method) for leg in roster}
        found.extend(pearson_by_party(estimates, reference, roster, column, method))
    if not roster.reference_methods():
        print("reference table has no reference columns with values", file=sys.stderr)
    writer.table("correlations.csv", outputs.CORRELATION_HEADER, outputs.correlation_rows(found))
    writer.close(None)


def cmd_cache(settings: Settings, action: str, purge: str | None) -> None:
    cache = ResponseCache(settings.cache_dir)
    if action == "inspect":
        print(json.dumps(cache.inspect(), indent=2, sort_keys=True))
    else:
        removed = cache.gc(provider=purge)
        print(json.dumps({"removed": removed, "remaining": len(cache)}))


def dispatch(args: argparse.Namespace) -> None:
    settings = settings_from_args(args)
    out = Path(getattr(args, "out", None) or f"runs/{args.command}")
    command = args.command
    if command == "cache":
        cmd_cache(settings, args.action, args.purge_provider)
    elif command == "correlate":
        cmd_correlate(settings, out, args.estimates, args.column)
    else:
        handler = {
            "ideal-points": cmd_ideal_points, "scale-tweets": cmd_scale_tweets,
            "rate-curve": cmd_rate_curve, "dogwhistle": cmd_dogwhistle,
            "vignettes": cmd_vignettes, "platforms": cmd_platforms,
        }[command]
        handler(settings, out)
        print(f"wrote {out}", file=sys.stderr)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)

    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        dispatch(args)
    except ConfigError as exc:
        print(f"ideoscale: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ProviderError as exc:
        print(f"ideoscale: provider error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PROVIDER
    except (DataError, AggregateError, StatsError, ValueError) as exc:
        print(f"ideoscale: data error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

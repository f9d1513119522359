"""Acceptance criteria, one test each. Every test records a PASS/FAIL line
(shown in the terminal summary) before asserting."""

from __future__ import annotations

import json
import math
import time
from pathlib import Path

import httpx
import numpy as np
import pytest

from ideoscale.cli import main
from ideoscale.experiments import (
    build_anchor,
    build_gateway,
    run_dogwhistle,
    run_ideal_points,
    run_platform_genscore,
    run_vignettes,
)
from ideoscale.experiments.manifest import RunManifest, RunWriter
from ideoscale.experiments.outputs import write_dogwhistle
from ideoscale.gateway.synthetic import AnnotatorConfig
from ideoscale.io import load_issues, load_roster, read_csv
from ideoscale.stats import GPConfig, gaussian_kde, gp_rate_fit, ols_fit, pearson
from ideoscale.stats.gp import laplace_mode

import conftest
import gp_oracle
from conftest import make_roster, make_settings, synthetic_gateway
from parser_corpus import load_cases, mismatches

pytestmark = pytest.mark.acceptance


def record(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


# 1 and 3 share one run.
@pytest.fixture(scope="module")
def recovery_run(tmp_path_factory):
    roster = make_roster(100)
    settings = make_settings(tmp_path_factory.mktemp("c1"), permutations=50)
    settings.synthetic.sigma = 0.3
    started = time.perf_counter()
    gateway = build_gateway(settings, roster)
    result = run_ideal_points(roster, settings, gateway)
    elapsed = time.perf_counter() - started
    traits = settings.annotator(roster).traits
    return roster, result, traits, elapsed


def test_c01_synthetic_recovery(recovery_run):
    roster, result, traits, elapsed = recovery_run
    assert all(-10 <= v <= 10 for v in traits.values())
    means = result.mean_by_id()
    r = pearson([means[leg.id] for leg in roster], [traits[leg.display_name] for leg in roster])
    record(1, r >= 0.99 and elapsed < 30 and len(result.kept_runs) == 50,
           f"Pearson={r:.5f} (>=0.99), runtime={elapsed:.2f}s (<30s), runs kept={len(result.kept_runs)}/50")


def test_c02_order_robustness(tmp_path):
    roster = make_roster(40)
    rng = np.random.default_rng(2)
    config = AnnotatorConfig(dict(zip(roster.names, rng.uniform(-10, 10, roster.n))), sigma=0.0)
    estimates = []
    for seed in (0, 1, 987654321):
        settings = make_settings(tmp_path, permutations=5, seed=seed)
        estimates.append(np.array(list(run_ideal_points(
            roster, settings, synthetic_gateway(config)).mean_by_id().values())))
    worst = max(np.max(np.abs(a - b)) for i, a in enumerate(estimates) for b in estimates[i + 1:])
    record(2, worst < 1e-9, f"max per-entity difference across seeds={worst:.2e} (<1e-9)")


def test_c03_normalization_invariants(recovery_run):
    roster, result, _, _ = recovery_run
    worst_mean = worst_std = 0.0
    ranks_ok = True
    for row, run in zip(result.matrix.runs, result.kept_runs):
        z = np.array(row)
        worst_mean = max(worst_mean, abs(z.mean()))
        worst_std = max(worst_std, abs(z.std() - 1))
        raw = np.array([result.runs[run].parsed.scores[name] for name in roster.names])
        ranks_ok &= bool(np.array_equal(np.argsort(raw, kind="stable"),
                                        np.argsort(z, kind="stable")))
        ranks_ok &= bool(np.array_equal(raw[:, None] < raw[None, :], z[:, None] < z[None, :]))
    record(3, worst_mean < 1e-9 and worst_std < 1e-9 and ranks_ok,
           f"max|mean|={worst_mean:.1e}, max|std-1|={worst_std:.1e} (<1e-9), ranking preserved={ranks_ok}")


def test_c04_parser_corpus():
    cases = load_cases()
    texts = [c["text"] for c in cases]
    formats = {
        "gate phrase": any(t.strip() == "Not ideological." for t in texts),
        "bare -2.0": any(t.strip() == "-2.0" for t in texts),
        "CoT tail": any(t.rstrip().endswith("Score: −2.5") for t in texts),
        "numbered list": any(t.lstrip().startswith("1.") for t in texts),
        "refusal": any(t.lower().startswith(("i'm sorry", "i am sorry", "i cannot", "as an ai"))
                       for t in texts),
    }
    bad = mismatches()
    record(4, len(cases) >= 40 and not bad and all(formats.values()),
           f"{len(cases) - len(bad)}/{len(cases)} transcripts match; formats present="
           f"{sorted(k for k, v in formats.items() if v)}")


def test_c05_gp_oracle_equivalence():
    worst, worst_mode_link, max_iters = 0.0, 0.0, 0
    for fx in gp_oracle.FIXTURES:
        t, y = np.array(fx["t"]), np.array(fx["y"])
        assert len(t) <= 8
        grid = np.linspace(t.min() - 0.2, t.max() + 0.2, 21)
        config = GPConfig(lengthscale=fx["lengthscale"], signal_variance=fx["variance"])
        events = list(zip(t.tolist(), y.tolist()))
        curve = gp_rate_fit(events, config, list(grid), link_average=True)
        mode_link = gp_rate_fit(events, config, list(grid))
        exact = gp_oracle.exact_rate(t - t.min(), y, grid - t.min(), fx["lengthscale"],
                                     fx["variance"], config.jitter)
        worst = max(worst, np.max(np.abs(np.array(curve.posterior_mean_rate) - exact)))
        worst_mode_link = max(worst_mode_link,
                              np.max(np.abs(np.array(mode_link.posterior_mean_rate) - exact)))
        max_iters = max(max_iters, laplace_mode(t, y, np.ones_like(y), config).iterations)
    record(5, worst <= 1e-3 and max_iters <= 100,
           f"max |Laplace-exact|={worst:.2e} (<=1e-3; mode-link variant {worst_mode_link:.2e}), "
           f"Newton iterations<={max_iters} (<=100)")


def test_c06_gp_step_recovery():
    # Draw fixed a priori: seed 0, no selection over seeds.
    rng = np.random.default_rng(0)
    t = rng.uniform(0, 1, 500)
    y = (rng.uniform(size=500) < np.where(t < 0.5, 0.1, 0.7)).astype(int)
    grid = np.linspace(0, 1, 1001)
    started = time.perf_counter()
    curve = gp_rate_fit(list(zip(t.tolist(), y.tolist())), GPConfig(lengthscale=0.05),
                        list(grid))
    elapsed = time.perf_counter() - started
    rate = np.array(curve.posterior_mean_rate)
    away = np.abs(grid - 0.5) > 0.1
    err = float(np.max(np.abs(rate - np.where(grid < 0.5, 0.1, 0.7))[away]))
    up = np.nonzero((rate[:-1] < 0.4) & (rate[1:] >= 0.4))[0]
    crossings = [float(grid[i] + (0.4 - rate[i]) / (rate[i + 1] - rate[i]) * (grid[i + 1] - grid[i]))
                 for i in up]
    cross_ok = len(crossings) == 1 and abs(crossings[0] - 0.5) <= 0.05
    record(6, err <= 0.1 and cross_ok and elapsed < 10,
           f"max error away from step={err:.3f} (<=0.1), 0.4-crossings={[round(c, 3) for c in crossings]}"
           f" (0.5+-0.05), runtime={elapsed:.2f}s (<10s)")


def test_c07_kde():
    rng = np.random.default_rng(7)
    worst_int, worst_point = 0.0, 0.0
    for _ in range(10):
        samples = rng.standard_t(5, size=50) * rng.uniform(0.2, 4) + rng.uniform(-5, 5)
        kde = gaussian_kde(samples)
        h = kde.bandwidth
        grid = np.linspace(samples.min() - 12 * h, samples.max() + 12 * h, 40001)
        worst_int = max(worst_int, abs(np.trapezoid(kde(grid), grid) - 1))
        for g in grid[::1999]:
            brute = math.fsum(math.exp(-0.5 * ((g - s) / h) ** 2) for s in samples) / (
                50 * h * math.sqrt(2 * math.pi))
            worst_point = max(worst_point, abs(float(kde(g)[0]) - brute))
    record(7, worst_int <= 1e-6 and worst_point <= 1e-12,
           f"max |integral-1|={worst_int:.1e} (<=1e-6), max pointwise diff={worst_point:.1e} (<=1e-12)")


def _direct(x, y):
    n = len(x)
    mx, my = math.fsum(x) / n, math.fsum(y) / n
    sxy = math.fsum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = math.fsum((a - mx) ** 2 for a in x)
    syy = math.fsum((b - my) ** 2 for b in y)
    slope = sxy / sxx
    return sxy / math.sqrt(sxx * syy), slope, my - slope * mx


def test_c08_statistics_oracles():
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(3, 200))
        x = rng.uniform(-10, 10, n)
        y = rng.uniform(-2, 2) * x + rng.normal(0, rng.uniform(0.1, 5), n)
        r, slope, intercept = _direct(x.tolist(), y.tolist())
        fit = ols_fit(x, y)
        worst = max(worst, abs(pearson(x, y) - r), abs(fit.slope - slope),
                    abs(fit.intercept - intercept), abs(fit.r - r))
    record(8, worst <= 1e-12, f"max difference over 200 fixtures={worst:.1e} (<=1e-12)")


def test_c09_dogwhistle_spike(tmp_path):
    settings = make_settings(tmp_path, repeats=10)
    gateway = build_gateway(settings)
    writer = RunWriter(tmp_path / "out", RunManifest("dogwhistle", settings.snapshot()))
    write_dogwhistle(writer, run_dogwhistle(settings, gateway))
    rows = read_csv(tmp_path / "out" / "dogwhistle.csv")
    groups: dict[tuple, dict[int, float]] = {}
    for row in rows:
        groups.setdefault((row["template"], row["variant"]), {})[int(row["n"])] = float(row["mean"])
    ok = len(rows) == 66 and len(groups) == 6
    for cells in groups.values():
        top = max(cells.values())
        ok &= len(cells) == 11 and [n for n, v in cells.items() if v == top] == [1488]
    record(9, ok, f"{len(rows)} cells (3x11x2); per-template maximum only at n=1488: {ok}")


def test_c10_vignette_grid(tmp_path):
    settings = make_settings(tmp_path, repeats=10)
    settings.synthetic.sigma = 0.0
    syn = settings.synthetic
    grid = run_vignettes(settings, build_gateway(settings))
    ok = len(grid) == 24 and len({spec.key for spec, _ in grid}) == 24
    for spec, cell in grid:
        expected = syn.vignette_base + sum(syn.vignette_effects.get(level, 0.0) for level in (
            spec.parent.value, spec.mutter.name.lower(), spec.explanation.value))
        ok &= cell.k == 10 and cell.scores == [expected] * 10 and cell.mean == expected
    record(10, ok, f"{len(grid)} cells; synthetic rule reproduced exactly at sigma=0, K=10: {ok}")


def test_c11_platform_round_trip(tmp_path):
    roster = load_roster(include_obama=True)
    issues = load_issues()

    exact = make_settings(tmp_path / "a", samples_per_issue=40)
    exact.synthetic.sigma = 0.0
    gateway = build_gateway(exact, roster)
    result = run_platform_genscore(issues, build_anchor(roster, exact, gateway), exact, gateway)
    overall = [f for f in result.fits if f.scope == "overall"]
    worst = max(max(abs(f.fit.slope - 1), abs(f.fit.intercept)) for f in overall)
    equal = all(s.rescored == s.target_score for s in result.samples)

    noisy = make_settings(tmp_path / "b", samples_per_issue=40)
    noisy.synthetic.sigma = 0.5
    gateway = build_gateway(noisy, roster)
    result = run_platform_genscore(issues, build_anchor(roster, noisy, gateway), noisy, gateway)
    rhos = [f.spearman for f in result.fits if f.scope == "overall"]
    sizes = {f.n for f in result.fits if f.scope == "overall"}
    ok = (len(overall) == 18 and equal and worst <= 1e-9 and len(rhos) == 18
          and sizes == {40} and min(rhos) >= 0.95)
    record(11, ok, f"sigma=0: rescored==target on 18 issues, max|slope-1|,|intercept|={worst:.1e}; "
                   f"sigma=0.5: min Spearman={min(rhos):.4f} (>=0.95) at n={sorted(sizes)}")


def _corpus(path: Path) -> Path:
    lines = []
    for i in range(40):
        record = {"id": f"t{i}", "author_id": ("S001", "S002", "S003")[i % 3],
                  "timestamp": f"2016-{i % 12 + 1:02d}-{i % 27 + 1:02d}T10:00:00Z",
                  "body": f"message number {i}"}
        if i % 4:
            record["latent_hint"] = (i % 9) - 4.0
        lines.append(json.dumps(record))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def test_c12_replay_reproducibility(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    corpus = _corpus(tmp_path / "corpus.jsonl")
    (tmp_path / "issues.txt").write_text("trade\nenergy\nhousing\n")
    runs = {
        "ideal-points": ["--permutations", "5"],
        "scale-tweets": ["--corpus", str(corpus), "--method", "3"],
        "rate-curve": ["--corpus", str(corpus), "--lengthscale", "60"],
        "dogwhistle": ["--repeats", "2"],
        "vignettes": ["--repeats", "2"],
        "platforms": ["--issues", "issues.txt", "--samples-per-issue", "4"],
    }
    for command, args in runs.items():
        assert main(["--provider", "synthetic", "--workers", "2", command, *args,
                     "--out", f"first/{command}"]) == 0

    def no_network(*_args, **_kwargs):
        raise AssertionError("network request attempted during replay")

    monkeypatch.setattr(httpx.Client, "send", no_network)
    identical, backend_calls, checked = True, 0, 0
    for command, args in runs.items():
        assert main(["--provider", "replay", command, *args, "--out", f"second/{command}"]) == 0
        first, second = tmp_path / "first" / command, tmp_path / "second" / command
        names = sorted(p.name for p in first.iterdir() if p.name != "runtime.json")
        identical &= names == sorted(p.name for p in second.iterdir() if p.name != "runtime.json")
        for name in names:
            checked += 1
            identical &= (first / name).read_bytes() == (second / name).read_bytes()
        runtime = json.loads((second / "runtime.json").read_text())
        backend_calls += runtime["backend_calls"] + runtime["cache_misses"]
    record(12, identical and backend_calls == 0,
           f"{len(runs)} experiments, {checked} output files byte-identical: {identical}; "
           f"network/backend calls under replay={backend_calls}")

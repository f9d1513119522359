"""Loader and checker for the parser fixture corpus."""

from __future__ import annotations

import json
from pathlib import Path

from ideoscale.errors import ParseError
from ideoscale.parsing import (
    ParsePolicy,
    parse_bare_score,
    parse_binary_or_score,
    parse_cot_outcome,
    parse_name_scores,
    parse_tail_score,
)

CASES_PATH = Path(__file__).parent / "fixtures" / "parser" / "cases.json"

_OUTCOME_PARSERS = {
    "binary": parse_binary_or_score,
    "bare": parse_bare_score,
    "cot": parse_cot_outcome,
}


def load_cases() -> list[dict]:
    return json.loads(CASES_PATH.read_text(encoding="utf-8"))


def observe(case: dict) -> dict:
    """Run the case's parser and describe the result in the fixture's terms."""
    policy = ParsePolicy(lenient_ranges=case.get("lenient", False))
    kind = case["parser"]
    if kind == "list":
        parsed = parse_name_scores(case["text"], case["names"], policy)
        return {"scores": parsed.scores, "missing": parsed.missing_names}
    if kind == "tail":
        try:
            return {"score": parse_tail_score(case["text"], policy)}
        except ParseError as exc:
            return {"error": type(exc).__name__}
    outcome = _OUTCOME_PARSERS[kind](case["text"], policy)
    observed = {"kind": outcome.kind.value}
    if outcome.score is not None:
        observed["score"] = outcome.score
    return observed


def mismatches() -> list[tuple[str, dict, dict]]:
    bad = []
    for case in load_cases():
        got = observe(case)
        if got != case["expected"]:
            bad.append((case["id"], case["expected"], got))
    return bad

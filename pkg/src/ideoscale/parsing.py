"""Extract scores and judgments from free-form model text.

Numeric grammar (strict): optional sign, digits, optional ``.digits``. The
Unicode minus sign U+2212 counts as a sign because models and typeset
transcripts both emit it. Exponents, thousands separators and bare ``.5`` are
outside the grammar.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import MalformedNumber, NoScoreMarker
from .model import Outcome

NUMBER = r"[+\-−]?\d+(?:\.\d+)?"
_NUMBER_RE = re.compile(NUMBER)
_FULL_NUMBER_RE = re.compile(rf"^{NUMBER}$")
_RANGE_TAIL_RE = re.compile(rf"^\s*(?:to|and|-|–|—)\s*({NUMBER})")
_RANGE_LEAD_RE = re.compile(r"^(?:between|from)\s+", re.IGNORECASE)
_SCORE_MARKER_RE = re.compile(r"score\s*:", re.IGNORECASE)
_LIST_PREFIX_RE = re.compile(r"^\s*(?:\d+[.)]|[-*•])\s+")
_DECORATION = " \t*_`\"'“”"


@dataclass(frozen=True)
class ParsePolicy:
    """Parsing knobs. Strict by default: ranges such as "-6 to -8" are
    rejected; ``lenient_ranges`` takes their midpoint instead."""

    lenient_ranges: bool = False


STRICT = ParsePolicy()


@dataclass
class ParsedList:
    scores: dict[str, float] = field(default_factory=dict)
    unmatched_lines: list[str] = field(default_factory=list)
    missing_names: list[str] = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return not self.missing_names


def format_number(value: float) -> str:
    """Shortest round-tripping positional form, always with a decimal point."""
    return np.format_float_positional(float(value), trim="0")


def parse_number(token: str) -> float:
    """Parse a token that must be exactly one grammar number."""
    token = token.strip()
    if not _FULL_NUMBER_RE.match(token):
        raise MalformedNumber(f"not a number: {token!r}")
    return float(token.replace("−", "-"))


def parse_value(text: str, policy: ParsePolicy = STRICT) -> float:
    """Read the number at the start of ``text``.

    Trailing commentary is tolerated ("-2.5 (moderately left)") as long as the
    number token itself ends cleanly.
    """
    text = text.strip().lstrip(_DECORATION)
    lead = _RANGE_LEAD_RE.match(text)
    if lead:
        text = text[lead.end():]
    match = _NUMBER_RE.match(text)
    if not match:
        raise MalformedNumber(f"no number at {text[:40]!r}")
    rest = text[match.end():]
    if rest and (rest[0].isalnum() or rest[0] == "_" or re.match(r"\.\d", rest)):
        raise MalformedNumber(f"number runs into text: {text[:40]!r}")
    first = parse_number(match.group(0))

    range_match = _RANGE_TAIL_RE.match(rest)
    if range_match or lead:
        if not range_match:
            raise MalformedNumber(f"incomplete range: {text[:40]!r}")
        if not policy.lenient_ranges:
            raise MalformedNumber(f"range instead of a single score: {text[:40]!r}")
        second = parse_number(range_match.group(1))
        return (first + second) / 2.0
    return first


def _match_name(candidate: str, expected: Sequence[str], lowered: Sequence[str]) -> str | None:
    if candidate in expected:
        return candidate
    cand = candidate.lower()
    if len(cand) < 3:
        return None
    hits = [name for name, low in zip(expected, lowered) if low in cand or cand in low]
    return hits[0] if len(hits) == 1 else None


def parse_name_scores(text: str, expected: Sequence[str],
                      policy: ParsePolicy = STRICT) -> ParsedList:
    """Map "Name: score" lines onto the expected names.

    Lines that cannot be attributed to exactly one expected name, or whose
    value is out of grammar, end up in ``unmatched_lines``. A name reported
    twice with different values is treated as missing.
    """
    expected = list(expected)
    lowered = [name.lower() for name in expected]
    result = ParsedList()
    seen: dict[str, tuple[float, list[str]]] = {}
    conflicted: set[str] = set()

    for raw_line in text.splitlines():
        line = raw_line.strip()
        if not line:
            continue
        body = _LIST_PREFIX_RE.sub("", line, count=1)
        name_part, value_part = _split_entry(body)
        if name_part is None:
            result.unmatched_lines.append(raw_line)
            continue
        name = _match_name(name_part.strip(_DECORATION), expected, lowered)
        if name is None:
            result.unmatched_lines.append(raw_line)
            continue
        try:
            value = parse_value(value_part, policy)
        except MalformedNumber:
            result.unmatched_lines.append(raw_line)
            continue
        if name in seen:
            previous, lines = seen[name]
            lines.append(raw_line)
            if previous != value:
                conflicted.add(name)
            continue
        seen[name] = (value, [raw_line])

    for name in conflicted:
        result.unmatched_lines.extend(seen.pop(name)[1])
    for name in expected:
        if name in seen:
            result.scores[name] = seen[name][0]
        else:
            result.missing_names.append(name)
    return result


def _split_entry(body: str) -> tuple[str | None, str]:
    for separator in (":", "—", "–"):
        head, sep, tail = body.partition(separator)
        if sep and head.strip(_DECORATION) and tail.strip():
            return head, tail
    return None, ""


def parse_tail_score(text: str, policy: ParsePolicy = STRICT) -> float:
    """Return the value after the last "Score:" marker."""
    markers = list(_SCORE_MARKER_RE.finditer(text))
    if not markers:
        raise NoScoreMarker("response has no 'Score:' marker")
    tail = text[markers[-1].end():].split("\n", 1)[0]
    return parse_value(tail, policy)


def _says_not_ideological(text: str) -> bool:
    normalized = " " + re.sub(r"[^a-z0-9]+", " ", text.lower()) + " "
    return " not ideological " in normalized


def _bare_value(text: str, policy: ParsePolicy) -> float:
    stripped = text.strip().lstrip(_DECORATION)
    if stripped.lower().startswith("output:"):
        stripped = stripped[len("output:"):]
    return parse_value(stripped.split("\n", 1)[0], policy)


def parse_binary_or_score(text: str, policy: ParsePolicy = STRICT) -> Outcome:
    if _says_not_ideological(text):
        return Outcome.not_ideological()
    if _SCORE_MARKER_RE.search(text):
        try:
            return Outcome.scored(parse_tail_score(text, policy))
        except MalformedNumber as exc:
            return Outcome.failure(f"malformed score: {exc}")
    try:
        return Outcome.scored(_bare_value(text, policy))
    except MalformedNumber:
        return Outcome.failure(f"no score or classification in {text.strip()[:60]!r}")


def parse_bare_score(text: str, policy: ParsePolicy = STRICT) -> Outcome:
    """Score-only responses (no binary gate): a leading number, or a tail marker."""
    try:
        return Outcome.scored(_bare_value(text, policy))
    except MalformedNumber:
        pass
    try:
        return Outcome.scored(parse_tail_score(text, policy))
    except (NoScoreMarker, MalformedNumber) as exc:
        return Outcome.failure(f"no numeric score: {exc}")


def parse_cot_outcome(text: str, policy: ParsePolicy = STRICT) -> Outcome:
    """Reasoning-then-score responses. The tail marker wins over any
    "not ideological" phrase inside the reasoning."""
    if _SCORE_MARKER_RE.search(text):
        try:
            return Outcome.scored(parse_tail_score(text, policy))
        except MalformedNumber as exc:
            return Outcome.failure(f"malformed score: {exc}")
    if _says_not_ideological(text):
        return Outcome.not_ideological()
    return Outcome.failure(f"no score marker in {text.strip()[:60]!r}")

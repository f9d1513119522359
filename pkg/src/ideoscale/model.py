"""Core domain types shared across the package.

All types are frozen; experiment runners pass them between worker threads
without copying.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .errors import DuplicateName, EmptyName, RosterError, UnknownParty


class Party(str, enum.Enum):
    DEMOCRAT = "Democrat"
    REPUBLICAN = "Republican"
    INDEPENDENT = "Independent"

    @classmethod
    def parse(cls, value: str | "Party") -> "Party":
        if isinstance(value, Party):
            return value
        key = str(value).strip().lower()
        aliases = {
            "d": cls.DEMOCRAT, "dem": cls.DEMOCRAT, "democrat": cls.DEMOCRAT,
            "democratic": cls.DEMOCRAT,
            "r": cls.REPUBLICAN, "rep": cls.REPUBLICAN, "republican": cls.REPUBLICAN,
            "gop": cls.REPUBLICAN,
            "i": cls.INDEPENDENT, "ind": cls.INDEPENDENT, "independent": cls.INDEPENDENT,
        }
        try:
            return aliases[key]
        except KeyError:
            raise UnknownParty(f"unknown party {value!r}") from None


@dataclass(frozen=True)
class Legislator:
    id: str
    display_name: str
    party: Party
    reference_scores: Mapping[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class Roster:
    legislators: tuple[Legislator, ...] = ()

    @property
    def n(self) -> int:
        return len(self.legislators)

    def __len__(self) -> int:
        return len(self.legislators)

    def __iter__(self):
        return iter(self.legislators)

    @property
    def ids(self) -> list[str]:
        return [leg.id for leg in self.legislators]

    @property
    def names(self) -> list[str]:
        return [leg.display_name for leg in self.legislators]

    def by_id(self) -> dict[str, Legislator]:
        return {leg.id: leg for leg in self.legislators}

    def by_name(self) -> dict[str, Legislator]:
        return {leg.display_name: leg for leg in self.legislators}

    def reference_methods(self) -> list[str]:
        seen: dict[str, None] = {}
        for leg in self.legislators:
            for method in leg.reference_scores:
                seen.setdefault(method)
        return list(seen)


def validate_roster(raw: Iterable[Mapping[str, Any]]) -> Roster:
    """Build a roster from loosely typed records, preserving order.

    Every record is checked; if anything is wrong the first failure is raised
    with the complete list attached as ``failures``.
    """
    failures: list[RosterError] = []
    legislators: list[Legislator] = []
    seen_names: set[str] = set()
    seen_ids: set[str] = set()

    for index, record in enumerate(raw):
        name = str(record.get("display_name") or record.get("name") or "").strip()
        if not name:
            failures.append(EmptyName(f"record {index}: empty display_name"))
            continue
        ident = str(record.get("id") or "").strip() or name
        try:
            party = Party.parse(record.get("party", ""))
        except UnknownParty as exc:
            failures.append(UnknownParty(f"record {index} ({name}): {exc}"))
            continue
        if name in seen_names:
            failures.append(DuplicateName(f"record {index}: duplicate display_name {name!r}"))
            continue
        if ident in seen_ids:
            failures.append(DuplicateName(f"record {index}: duplicate id {ident!r}"))
            continue
        seen_names.add(name)
        seen_ids.add(ident)
        refs = {
            str(k): float(v)
            for k, v in dict(record.get("reference_scores") or {}).items()
            if v is not None and v != ""
        }
        legislators.append(Legislator(ident, name, party, refs))

    if failures:
        first = failures[0]
        raise type(first)(
            f"{len(failures)} roster problem(s); first: {first}", failures=failures
        )
    return Roster(tuple(legislators))


def party_subset(roster: Roster, party: Party | str) -> Roster:
    wanted = Party.parse(party)
    return Roster(tuple(leg for leg in roster.legislators if leg.party is wanted))


@dataclass(frozen=True)
class ScoreMatrix:
    """Per-run scores, one row per retained run, columns in ``entity_ids`` order."""

    entity_ids: tuple[str, ...]
    runs: tuple[tuple[float, ...], ...]
    normalized: bool = False

    def __post_init__(self):
        n = len(self.entity_ids)
        for i, row in enumerate(self.runs):
            if len(row) != n:
                raise ValueError(f"run {i} has {len(row)} scores, expected {n}")

    @property
    def n_runs(self) -> int:
        return len(self.runs)


@dataclass(frozen=True)
class IdealPointEstimate:
    entity_id: str
    mean: float
    per_run_scores: tuple[float, ...]
    quantiles: tuple[float, float, float, float, float]  # p5, p25, p50, p75, p95


@dataclass(frozen=True)
class TextItem:
    id: str
    body: str
    author_id: str | None = None
    timestamp: datetime | None = None
    # Synthetic-fixture ground truth; never leaves the process on live runs.
    latent_hint: float | None = None

    def __post_init__(self):
        if not self.body or not self.body.strip():
            raise ValueError(f"text item {self.id!r} has an empty body")


class Method(str, enum.Enum):
    ALL_TWEETS = "all"
    IDEOLOGICAL_ONLY = "ideological"
    IDEOLOGICAL_ZERO_COT = "ideological_cot"

    @classmethod
    def parse(cls, value: "str | int | Method") -> "Method":
        if isinstance(value, Method):
            return value
        by_number = {"1": cls.ALL_TWEETS, "2": cls.IDEOLOGICAL_ONLY, "3": cls.IDEOLOGICAL_ZERO_COT}
        key = str(value).strip().lower()
        if key in by_number:
            return by_number[key]
        return cls(key)


class OutcomeKind(str, enum.Enum):
    NOT_IDEOLOGICAL = "not_ideological"
    SCORED = "scored"
    PARSE_FAILURE = "parse_failure"


@dataclass(frozen=True)
class Outcome:
    kind: OutcomeKind
    score: float | None = None
    reason: str | None = None

    def __post_init__(self):
        if self.kind is OutcomeKind.SCORED:
            if self.score is None or not math.isfinite(self.score):
                raise ValueError("scored outcome needs a finite score")
        elif self.score is not None:
            raise ValueError(f"{self.kind.value} outcome cannot carry a score")

    @classmethod
    def scored(cls, value: float) -> "Outcome":
        return cls(OutcomeKind.SCORED, float(value))

    @classmethod
    def not_ideological(cls) -> "Outcome":
        return cls(OutcomeKind.NOT_IDEOLOGICAL)

    @classmethod
    def failure(cls, reason: str) -> "Outcome":
        return cls(OutcomeKind.PARSE_FAILURE, reason=reason)


@dataclass(frozen=True)
class TextJudgment:
    item_id: str
    outcome: Outcome
    transcript_ref: str
    method: Method


@dataclass(frozen=True)
class ExperimentConfig:
    model_id: str = "gpt-3.5-turbo"
    temperature: float = 0.2
    permutations: int = 1000
    rng_seed: int = 0
    rate_limit: int = 60
    cache_dir: Path = Path(".ideoscale-cache")

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.permutations < 1:
            raise ValueError("permutations must be >= 1")
        if self.rate_limit < 1:
            raise ValueError("rate_limit must be >= 1")


def ordered_union(parts: Sequence[Roster], template: Roster) -> Roster:
    """Merge disjoint sub-rosters back into ``template``'s order."""
    members = {leg.id for part in parts for leg in part.legislators}
    return Roster(tuple(leg for leg in template.legislators if leg.id in members))

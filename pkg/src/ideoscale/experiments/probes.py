"""Fixed prompt grids repeated K times: the dog-whistle sweep and the
dinner-table vignettes."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from ..config import Settings
from ..errors import ParseError
from ..gateway.client import Gateway
from ..model import OutcomeKind
from ..parsing import parse_bare_score, parse_tail_score
from ..prompts.builders import (
    DOGWHISTLE_NAMES,
    DOGWHISTLE_RANGE,
    VignetteSpec,
    WhistleVariant,
    all_vignettes,
    build_dogwhistle_prompt,
    build_vignette_prompt,
)
from .base import ask, ordered_map, policy_of

VIGNETTE_RANGE = (-3.0, 3.0)


@dataclass
class CellResult:
    """Mean over the successfully parsed repeats of one grid cell."""

    scores: list[float] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)
    out_of_range: int = 0

    @property
    def mean(self) -> float | None:
        return math.fsum(self.scores) / len(self.scores) if self.scores else None

    @property
    def k(self) -> int:
        return len(self.scores)


@dataclass(frozen=True)
class WhistleCell:
    template: int
    n: int
    variant: WhistleVariant

    @property
    def template_name(self) -> str:
        return DOGWHISTLE_NAMES[self.template]


def dogwhistle_cells() -> list[WhistleCell]:
    return [WhistleCell(t, n, v) for t, n, v in itertools.product(
        range(len(DOGWHISTLE_NAMES)), DOGWHISTLE_RANGE, WhistleVariant)]


def run_dogwhistle(settings: Settings, gateway: Gateway) -> list[tuple[WhistleCell, CellResult]]:
    policy = policy_of(settings)

    def one(cell: WhistleCell) -> CellResult:
        prompt = build_dogwhistle_prompt(cell.variant, cell.template, cell.n)
        payload = {"template": cell.template, "n": cell.n, "variant": cell.variant.value}
        result = CellResult()
        for k in range(settings.repeats):
            text = ask(gateway, settings, prompt, "dogwhistle", payload, request_seed=k).text
            if cell.variant is WhistleVariant.COT:
                try:
                    result.scores.append(parse_tail_score(text, policy))
                except ParseError as exc:
                    result.failures.append(str(exc))
            else:
                outcome = parse_bare_score(text, policy)
                if outcome.kind is OutcomeKind.SCORED:
                    result.scores.append(outcome.score)
                else:
                    result.failures.append(outcome.reason or "")
        return result

    cells = dogwhistle_cells()
    return list(zip(cells, ordered_map(one, cells, settings.workers)))


def run_vignettes(settings: Settings, gateway: Gateway) -> list[tuple[VignetteSpec, CellResult]]:
    """Scores outside the -3..3 scale are kept and counted, never clamped."""
    policy = policy_of(settings)
    lo, hi = VIGNETTE_RANGE

    def one(spec: VignetteSpec) -> CellResult:
        prompt = build_vignette_prompt(spec)
        payload = {"parent": spec.parent.value, "mutter": spec.mutter.name.lower(),
                   "explanation": spec.explanation.value}
        result = CellResult()
        for k in range(settings.repeats):
            text = ask(gateway, settings, prompt, "vignette", payload, request_seed=k).text
            try:
                value = parse_tail_score(text, policy)
            except ParseError as exc:
                result.failures.append(str(exc))
                continue
            if not lo <= value <= hi:
                result.out_of_range += 1
            result.scores.append(value)
        return result

    specs = all_vignettes()
    return list(zip(specs, ordered_map(one, specs, settings.workers)))

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from ..errors import DegenerateInput, EmptyJoin, LengthMismatch
from ..model import Party, Roster, party_subset


def _pair(x: Sequence[float], y: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    xa, ya = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if xa.shape != ya.shape or xa.ndim != 1:
        raise LengthMismatch(f"lengths differ: {xa.shape} vs {ya.shape}")
    if xa.size < 2:
        raise DegenerateInput("need at least two points")
    return xa, ya


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    xa, ya = _pair(x, y)
    dx, dy = xa - xa.mean(), ya - ya.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    # separate roots so tiny spreads do not underflow the product
    denom = math.sqrt(sxx) * math.sqrt(syy)
    if denom == 0:
        raise DegenerateInput("constant input has no correlation")
    r = float(dx @ dy) / denom
    return max(-1.0, min(1.0, r))


class OLSFit(NamedTuple):
    slope: float
    intercept: float
    r: float  # nan when y is constant


def ols_fit(x: Sequence[float], y: Sequence[float]) -> OLSFit:
    xa, ya = _pair(x, y)
    dx, dy = xa - xa.mean(), ya - ya.mean()
    sxx = float(dx @ dx)
    if sxx == 0:
        raise DegenerateInput("x is constant; slope undefined")
    slope = float(dx @ dy) / sxx
    intercept = float(ya.mean() - slope * xa.mean())
    try:
        r = pearson(xa, ya)
    except DegenerateInput:
        r = float("nan")
    return OLSFit(slope, intercept, r)


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    from scipy.stats import rankdata

    xa, ya = _pair(x, y)
    return pearson(rankdata(xa), rankdata(ya))


@dataclass(frozen=True)
class CorrelationRow:
    scope: str
    method_a: str
    method_b: str
    r: float | None
    n: int
    excluded: int = 0
    error: str | None = None


SCOPES = ("overall", Party.DEMOCRAT.value, Party.REPUBLICAN.value)


def pearson_by_party(estimates: Mapping[str, float], reference: Mapping[str, float | None],
                     roster: Roster, method_a: str = "elicited",
                     method_b: str = "reference") -> list[CorrelationRow]:
    """Correlate two scalings overall and within each major party.

    Entities without a value on either side are excluded and counted; a scope
    whose values are constant is reported with an error instead of a value.
    """
    joined = [
        leg for leg in roster
        if leg.id in estimates and reference.get(leg.id) is not None
    ]
    if not joined:
        raise EmptyJoin("no entity has both an estimate and a reference score")
    joined_ids = {leg.id for leg in joined}

    rows = []
    for scope in SCOPES:
        members = roster if scope == "overall" else party_subset(roster, scope)
        in_scope = [leg for leg in members if leg.id in joined_ids]
        excluded = len(members) - len(in_scope)
        xs = [estimates[leg.id] for leg in in_scope]
        ys = [float(reference[leg.id]) for leg in in_scope]
        try:
            r: float | None = pearson(xs, ys)
            error = None
        except DegenerateInput as exc:
            r, error = None, f"DegenerateInput: {exc}"
        rows.append(CorrelationRow(scope, method_a, method_b, r, len(in_scope), excluded, error))
    return rows

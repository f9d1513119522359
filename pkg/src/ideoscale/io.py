"""Ingestion (rosters, reference tables, JSONL corpora) and CSV emission."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import random
from collections import defaultdict
from dataclasses import dataclass, field
from datetime import datetime
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Sequence

from .errors import DataError, FileUnreadable, NoValidRecords
from .model import Legislator, Party, Roster, TextItem, validate_roster

BASE_COLUMNS = ("id", "display_name", "party")
REFERENCE_METHODS = ("dw_nominate", "cfscore", "tbip")
OBAMA = {"id": "obama", "display_name": "Barack Obama", "party": "Democrat"}


def _read_text(path: str | Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise FileUnreadable(f"cannot read {path}: {exc}") from exc


def digest_file(path: str | Path) -> str:
    try:
        return hashlib.sha256(Path(path).read_bytes()).hexdigest()
    except OSError as exc:
        raise FileUnreadable(f"cannot read {path}: {exc}") from exc


def digest_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


# -- rosters / reference tables ----------------------------------------------


def parse_reference_table(text: str, source: str = "<table>") -> Roster:
    reader = csv.DictReader(io.StringIO(text))
    if not reader.fieldnames:
        raise DataError(f"{source}: missing header row")
    missing = [c for c in ("display_name", "party") if c not in reader.fieldnames]
    if missing:
        raise DataError(f"{source}: header lacks columns {missing}")
    methods = [c for c in reader.fieldnames if c not in BASE_COLUMNS]
    records = []
    for line_no, row in enumerate(reader, start=2):
        refs: dict[str, float] = {}
        for method in methods:
            cell = (row.get(method) or "").strip()
            if not cell:
                continue
            try:
                refs[method] = float(cell)
            except ValueError:
                raise DataError(f"{source}:{line_no}: {method}={cell!r} is not a number") from None
        records.append({
            "id": row.get("id"), "display_name": row.get("display_name"),
            "party": row.get("party"), "reference_scores": refs,
        })
    return validate_roster(records)


def load_roster(path: str | Path | None = None, *, include_obama: bool = False) -> Roster:
    """Load a roster CSV; without a path, the bundled 114th-Senate roster.

    ``include_obama`` appends Barack Obama to the bundled roster only; a
    custom roster is taken as given.
    """
    if path is None:
        text = resources.files(__package__).joinpath("data/senate114.csv").read_text("utf-8")
        source = "senate114.csv"
    else:
        text, source = _read_text(path), str(path)
    roster = parse_reference_table(text, source)
    if include_obama and path is None and "Barack Obama" not in roster.names:
        roster = Roster((*roster.legislators, Legislator(OBAMA["id"], OBAMA["display_name"],
                                                         Party.DEMOCRAT)))
    return roster


def roster_to_csv(roster: Roster) -> str:
    methods = list(REFERENCE_METHODS)
    methods += [m for m in roster.reference_methods() if m not in methods]
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow([*BASE_COLUMNS, *methods])
    for leg in roster:
        writer.writerow([
            leg.id, leg.display_name, leg.party.value,
            *[fmt_cell(leg.reference_scores.get(m)) for m in methods],
        ])
    return buffer.getvalue()


def write_roster(roster: Roster, path: str | Path) -> None:
    Path(path).write_text(roster_to_csv(roster), encoding="utf-8")


def load_issues(path: str | Path | None = None) -> list[str]:
    if path is None:
        text = resources.files(__package__).joinpath("data/issues.txt").read_text("utf-8")
    else:
        text = _read_text(path)
    return [line.strip() for line in text.splitlines() if line.strip() and not line.startswith("#")]


# -- corpora -----------------------------------------------------------------


@dataclass
class CorpusLoad:
    items: list[TextItem]
    rejections: list[tuple[int, str]] = field(default_factory=list)


def parse_timestamp(value: Any) -> datetime:
    """RFC 3339 instant; an explicit offset (or ``Z``) is required."""
    if not isinstance(value, str):
        raise ValueError(f"timestamp must be a string, got {type(value).__name__}")
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    stamp = datetime.fromisoformat(text)
    if stamp.tzinfo is None:
        raise ValueError(f"timestamp {value!r} has no UTC offset")
    return stamp


def load_corpus(path: str | Path, *, subsample: int | None = None, seed: int = 0,
                group_by: str | None = None, allow_hints: bool = True) -> CorpusLoad:
    """Read a JSONL corpus, one object per line with id, author_id,
    timestamp (RFC 3339) and body.

    Bad lines are skipped and reported with their 1-based line number.
    ``subsample`` keeps a seeded uniform sample of that many items, overall or
    per ``group_by`` group ("author" or "month"); file order is preserved.
    """
    text = _read_text(path)
    items: list[TextItem] = []
    rejections: list[tuple[int, str]] = []
    seen: set[str] = set()

    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            if not isinstance(record, dict):
                raise ValueError("not a JSON object")
            ident = str(record["id"])
            if ident in seen:
                raise ValueError(f"duplicate id {ident!r}")
            stamp = record.get("timestamp")
            hint = record.get("latent_hint") if allow_hints else None
            item = TextItem(
                id=ident,
                body=str(record["body"]),
                author_id=None if record.get("author_id") is None else str(record["author_id"]),
                timestamp=parse_timestamp(stamp) if stamp is not None else None,
                latent_hint=None if hint is None else float(hint),
            )
        except (ValueError, KeyError, TypeError) as exc:
            rejections.append((line_no, f"{type(exc).__name__}: {exc}"))
            continue
        seen.add(item.id)
        items.append(item)

    if not items:
        raise NoValidRecords(f"{path}: no valid records ({len(rejections)} rejected)")
    if subsample is not None:
        items = subsample_items(items, subsample, seed, group_by)
    return CorpusLoad(items, rejections)


def subsample_items(items: Sequence[TextItem], m: int, seed: int,
                    group_by: str | None = None) -> list[TextItem]:
    if m < 0:
        raise ValueError("subsample size must be nonnegative")
    groups: dict[str, list[int]] = defaultdict(list)
    for index, item in enumerate(items):
        if group_by == "author":
            key = item.author_id or ""
        elif group_by == "month":
            if item.timestamp is None:
                raise DataError(f"item {item.id} has no timestamp to group by month")
            key = item.timestamp.strftime("%Y-%m")
        elif group_by is None:
            key = ""
        else:
            raise ValueError(f"unknown grouping {group_by!r}")
        groups[key].append(index)
    keep: set[int] = set()
    for key in sorted(groups):
        members = groups[key]
        rng = random.Random(f"{seed}:{key}")
        keep.update(members if len(members) <= m else rng.sample(members, m))
    return [item for index, item in enumerate(items) if index in keep]


# -- CSV output --------------------------------------------------------------


def fmt_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else str(value)
    if isinstance(value, datetime):
        return value.isoformat()
    if hasattr(value, "value"):  # enums
        return str(value.value)
    # The csv module cannot write NUL and leaves a bare CR unquoted under a
    # "\n" terminator; model text occasionally contains either.
    text = str(value).replace("\x00", "\ufffd")
    return text.replace("\r\n", "\n").replace("\r", "\n")


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt_cell(v) for v in row])
    Path(path).write_text(buffer.getvalue(), encoding="utf-8")


def read_csv(path: str | Path) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as handle:
        return list(csv.DictReader(handle))


def read_float(cell: str) -> float | None:
    return None if cell == "" else float(cell)

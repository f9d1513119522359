"""Run manifests and the single writer that serializes result files.

A run directory holds ``manifest.json`` (a pure function of config and input
digests), ``runtime.json`` (provider, wall clock, request counters) and the
result CSVs. Every CSV row starts with the manifest id.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable, Sequence

from ..gateway.client import Gateway
from ..io import write_csv
from ..prompts.templates import template_checksums

MANIFEST_FILE = "manifest.json"
RUNTIME_FILE = "runtime.json"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _dumps(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False, default=str) + "\n"


@dataclass
class RunManifest:
    experiment: str
    config: dict[str, Any]
    digests: dict[str, str] = field(default_factory=dict)
    provider: str = ""
    started_at: str = field(default_factory=_now)
    finished_at: str | None = None
    requests: int = 0
    cache_hits: int = 0
    cache_misses: int = 0
    backend_calls: int = 0

    def __post_init__(self):
        self.digests = {**self.digests, **{
            f"template:{name}": digest for name, digest in template_checksums().items()
        }}

    def deterministic_part(self) -> dict[str, Any]:
        return {"experiment": self.experiment, "config": self.config, "digests": self.digests}

    @property
    def manifest_id(self) -> str:
        canonical = json.dumps(self.deterministic_part(), sort_keys=True, default=str)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]

    def finish(self, gateway: Gateway | None) -> None:
        self.finished_at = _now()
        if gateway is not None:
            self.provider = gateway.provider_name
            stats = gateway.stats
            self.cache_hits = stats.cache_hits
            self.cache_misses = stats.cache_misses
            self.requests = stats.requests
            self.backend_calls = stats.backend_calls

    def runtime_part(self) -> dict[str, Any]:
        return {
            "manifest_id": self.manifest_id,
            "provider": self.provider,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "requests": self.requests,
            "cache_hits": self.cache_hits,
            "cache_misses": self.cache_misses,
            "backend_calls": self.backend_calls,
        }


class RunWriter:
    """Owns an output directory; all file writes of a run go through here."""

    def __init__(self, out_dir: str | Path, manifest: RunManifest):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.manifest = manifest
        self.files: list[str] = []
        self._lock = threading.Lock()

    def table(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        path = self.out_dir / name
        mid = self.manifest.manifest_id
        with self._lock:
            write_csv(path, ["manifest_id", *header], ([mid, *row] for row in rows))
            self.files.append(name)
        return path

    def json(self, name: str, data: Any) -> Path:
        path = self.out_dir / name
        with self._lock:
            path.write_text(_dumps(data), encoding="utf-8")
            self.files.append(name)
        return path

    def close(self, gateway: Gateway | None) -> None:
        self.manifest.finish(gateway)
        with self._lock:
            (self.out_dir / MANIFEST_FILE).write_text(
                _dumps({"manifest_id": self.manifest.manifest_id,
                        **self.manifest.deterministic_part(),
                        "outputs": sorted(self.files)}),
                encoding="utf-8")
            (self.out_dir / RUNTIME_FILE).write_text(_dumps(self.manifest.runtime_part()),
                                                     encoding="utf-8")

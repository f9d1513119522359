"""On-disk response cache: one JSON record per exchange, named by cache key."""

from __future__ import annotations

import json
import os
import tempfile
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterator

from .types import ChatRequest, cache_key


@dataclass(frozen=True)
class CacheRecord:
    key: str
    request: dict
    text: str
    provider: str
    created_at: str


class ResponseCache:
    """Memory-fronted disk cache.

    Reads are lock-free against the memory dict and the filesystem; writes are
    serialized and land atomically (temp file + rename), so a concurrent reader
    sees either no record or a complete one.
    """

    def __init__(self, root: str | os.PathLike):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._memory: dict[str, CacheRecord] = {}
        self._write_lock = threading.Lock()

    def path_for(self, key: str) -> Path:
        return self.root / f"{key}.json"

    def get(self, key: str) -> CacheRecord | None:
        record = self._memory.get(key)
        if record is not None:
            return record
        path = self.path_for(key)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            return None
        except (json.JSONDecodeError, UnicodeDecodeError):
            return None
        try:
            record = CacheRecord(
                key=data["key"],
                request=data["request"],
                text=data["response"],
                provider=data.get("provider", "unknown"),
                created_at=data.get("created_at", ""),
            )
        except (KeyError, TypeError, AttributeError):
            return None
        self._memory[key] = record
        return record

    def put(self, request: ChatRequest, text: str, provider: str) -> CacheRecord:
        key = cache_key(request)
        record = CacheRecord(
            key=key,
            request=request.identity(),
            text=text,
            provider=provider,
            created_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        )
        body = json.dumps(
            {
                "key": record.key,
                "request": record.request,
                "response": record.text,
                "provider": record.provider,
                "created_at": record.created_at,
            },
            indent=1,
            sort_keys=True,
            ensure_ascii=False,
        )
        with self._write_lock:
            fd, tmp = tempfile.mkstemp(dir=self.root, prefix=".tmp-", suffix=".json")
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                handle.write(body)
            os.replace(tmp, self.path_for(key))
            self._memory[key] = record
        return record

    def evict_memory(self) -> None:
        self._memory.clear()

    def keys(self) -> Iterator[str]:
        for path in sorted(self.root.glob("*.json")):
            if not path.name.startswith(".tmp-"):
                yield path.stem

    def __len__(self) -> int:
        return sum(1 for _ in self.keys())

    def inspect(self) -> dict:
        providers: dict[str, int] = {}
        models: dict[str, int] = {}
        corrupt = 0
        size = 0
        for key in self.keys():
            size += self.path_for(key).stat().st_size
            record = self.get(key)
            if record is None:
                corrupt += 1
                continue
            providers[record.provider] = providers.get(record.provider, 0) + 1
            model = record.request.get("model", "?")
            models[model] = models.get(model, 0) + 1
        return {
            "root": str(self.root),
            "records": sum(providers.values()),
            "corrupt": corrupt,
            "bytes": size,
            "providers": dict(sorted(providers.items())),
            "models": dict(sorted(models.items())),
        }

    def gc(self, *, provider: str | None = None) -> int:
        """Delete corrupt records and stray temp files; optionally purge one provider."""
        removed = 0
        with self._write_lock:
            for tmp in self.root.glob(".tmp-*"):
                tmp.unlink(missing_ok=True)
                removed += 1
            for key in list(self.keys()):
                record = self.get(key)
                if record is None or record.key != key or (provider and record.provider == provider):
                    self.path_for(key).unlink(missing_ok=True)
                    self._memory.pop(key, None)
                    removed += 1
        return removed

from __future__ import annotations

import logging
import threading
import time
from dataclasses import dataclass
from typing import Callable, Protocol

from ..errors import ProviderMismatch, TransientError, TransientExhausted
from .cache import ResponseCache
from .ratelimit import RateLimiter
from .types import ChatRequest, ChatResponse, cache_key

log = logging.getLogger(__name__)


class Backend(Protocol):
    name: str

    def __call__(self, request: ChatRequest) -> str: ...


@dataclass(frozen=True)
class RetryPolicy:
    base_delay: float = 1.0
    factor: float = 2.0
    max_attempts: int = 5

    def delay(self, failed_attempts: int) -> float:
        return self.base_delay * self.factor ** (failed_attempts - 1)


class GatewayStats:
    def __init__(self):
        self._lock = threading.Lock()
        self.cache_hits = 0
        self.cache_misses = 0
        self.backend_calls = 0
        self.retries = 0

    @property
    def requests(self) -> int:
        return self.cache_hits + self.cache_misses

    def bump(self, field: str) -> None:
        with self._lock:
            setattr(self, field, getattr(self, field) + 1)

    def as_dict(self) -> dict[str, int]:
        return {
            "requests": self.requests,
            "cache_hits": self.cache_hits,
            "cache_misses": self.cache_misses,
            "backend_calls": self.backend_calls,
            "retries": self.retries,
        }


class Gateway:
    """Cache-first chat completion with retries and rate limiting.

    ``backend=None`` is replay mode: only cached exchanges can be served.
    Safe to share between worker threads.
    """

    def __init__(self, backend: Backend | None, *, cache: ResponseCache | None = None,
                 retry: RetryPolicy = RetryPolicy(), limiter: RateLimiter | None = None,
                 sleep: Callable[[float], None] = time.sleep,
                 clock: Callable[[], float] = time.perf_counter):
        self.backend = backend
        self.cache = cache
        self.retry = retry
        self.limiter = limiter
        self._sleep = sleep
        self._clock = clock
        self.stats = GatewayStats()

    @property
    def provider_name(self) -> str:
        return self.backend.name if self.backend is not None else "replay"

    def complete(self, request: ChatRequest) -> ChatResponse:
        start = self._clock()
        key = cache_key(request)
        if self.cache is not None:
            record = self.cache.get(key)
            if record is not None:
                self.stats.bump("cache_hits")
                return ChatResponse(record.text, record.provider, True,
                                    int((self._clock() - start) * 1000), key)
        self.stats.bump("cache_misses")
        if self.backend is None:
            raise ProviderMismatch(f"replay cache has no exchange for key {key[:16]}")

        text = self._call_with_retries(request)
        if self.cache is not None:
            self.cache.put(request, text, self.backend.name)
        return ChatResponse(text, self.backend.name, False,
                            int((self._clock() - start) * 1000), key)

    def _call_with_retries(self, request: ChatRequest) -> str:
        assert self.backend is not None
        last: Exception | None = None
        for attempt in range(1, self.retry.max_attempts + 1):
            if self.limiter is not None:
                self.limiter.acquire()
            self.stats.bump("backend_calls")
            try:
                return self.backend(request)
            except TransientError as exc:
                last = exc
                if attempt == self.retry.max_attempts:
                    break
                delay = self.retry.delay(attempt)
                log.warning("transient failure (attempt %d/%d), retrying in %.1fs: %s",
                            attempt, self.retry.max_attempts, delay, exc)
                self.stats.bump("retries")
                self._sleep(delay)
        raise TransientExhausted(
            f"gave up after {self.retry.max_attempts} attempts: {last}"
        ) from last

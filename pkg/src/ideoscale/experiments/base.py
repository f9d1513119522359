from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Iterable, Mapping, Sequence, TypeVar

from ..config import Settings
from ..gateway.cache import ResponseCache
from ..gateway.client import Gateway
from ..gateway.providers import LiveProvider
from ..gateway.ratelimit import RateLimiter
from ..gateway.synthetic import SyntheticAnnotator
from ..gateway.types import ChatMessage, ChatRequest, ChatResponse, Sidecar
from ..model import Roster
from ..parsing import ParsePolicy

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: int) -> list[R]:
    """Map over a worker pool; results come back in input order to the caller,
    which is the only place results are accumulated."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def policy_of(settings: Settings) -> ParsePolicy:
    return ParsePolicy(lenient_ranges=settings.prompt.lenient_ranges)


def ask(gateway: Gateway, settings: Settings, messages: str | Sequence[ChatMessage],
        kind: str, payload: Mapping[str, Any] | None = None, request_seed: int = 0
        ) -> ChatResponse:
    if isinstance(messages, str):
        messages = (ChatMessage.user(messages),)
    request = ChatRequest(
        settings.model_id, settings.temperature, tuple(messages),
        sidecar=Sidecar(kind, dict(payload or {})), request_seed=request_seed,
    )
    return gateway.complete(request)


def build_gateway(settings: Settings, roster: Roster | None = None) -> Gateway:
    """Gateway for the configured provider, sharing the on-disk cache.

    ``replay`` serves cached exchanges only; ``synthetic`` derives latent
    traits for ``roster`` from the root seed.
    """
    cache = ResponseCache(settings.cache_dir)
    if settings.provider == "replay":
        return Gateway(None, cache=cache)
    if settings.provider == "synthetic":
        return Gateway(SyntheticAnnotator(settings.annotator(roster)), cache=cache)
    return Gateway(LiveProvider(settings.base_url), cache=cache,
                   limiter=RateLimiter(settings.rate_limit))

from .cache import CacheRecord, ResponseCache
from .client import Gateway, GatewayStats, RetryPolicy
from .providers import API_KEY_ENV, DEFAULT_BASE_URL, LiveProvider
from .ratelimit import RateLimiter
from .synthetic import AnnotatorConfig, SyntheticAnnotator, synthetic_complete
from .types import ChatMessage, ChatRequest, ChatResponse, Role, Sidecar, cache_key

__all__ = [
    "API_KEY_ENV", "DEFAULT_BASE_URL", "AnnotatorConfig", "CacheRecord", "ChatMessage",
    "ChatRequest", "ChatResponse", "Gateway", "GatewayStats", "LiveProvider", "RateLimiter",
    "ResponseCache", "RetryPolicy", "Role", "Sidecar", "SyntheticAnnotator", "cache_key",
    "synthetic_complete",
]

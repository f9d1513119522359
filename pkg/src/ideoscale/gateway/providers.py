"""Backends that turn a ChatRequest into response text."""

from __future__ import annotations

import os

import httpx

from ..errors import AuthError, ProviderError, TransientError
from .types import ChatRequest

API_KEY_ENV = "IDEOSCALE_API_KEY"
DEFAULT_BASE_URL = "https://api.openai.com/v1"


class LiveProvider:
    """OpenAI-compatible ``/chat/completions`` over HTTPS."""

    name = "live"

    def __init__(self, base_url: str = DEFAULT_BASE_URL, api_key: str | None = None,
                 timeout: float = 120.0, transport: httpx.BaseTransport | None = None):
        self.base_url = base_url.rstrip("/")
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV, "").strip()
        self._client = httpx.Client(timeout=timeout, transport=transport)

    def close(self) -> None:
        self._client.close()

    def __call__(self, request: ChatRequest) -> str:
        if not self.api_key:
            raise AuthError(f"no API credential: set {API_KEY_ENV}")
        try:
            response = self._client.post(
                f"{self.base_url}/chat/completions",
                json=request.wire_payload(),
                headers={"Authorization": f"Bearer {self.api_key}"},
            )
        except (httpx.TimeoutException, httpx.TransportError) as exc:
            raise TransientError(f"transport failure: {exc!r}") from exc

        status = response.status_code
        if status in (401, 403):
            raise AuthError(f"HTTP {status}: {response.text[:200]}")
        if status == 429 or status >= 500:
            raise TransientError(f"HTTP {status}: {response.text[:200]}")
        if status >= 400:
            raise ProviderError(f"HTTP {status}: {response.text[:200]}")
        try:
            content = response.json()["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise ProviderError(f"malformed completion body: {response.text[:200]}") from exc
        return content or ""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence


class Role(str, enum.Enum):
    SYSTEM = "system"
    USER = "user"
    ASSISTANT = "assistant"


@dataclass(frozen=True)
class ChatMessage:
    role: Role
    content: str

    def __post_init__(self):
        object.__setattr__(self, "role", Role(self.role))
        if self.role is not Role.SYSTEM and not self.content:
            raise ValueError(f"{self.role.value} message content must be nonempty")

    def to_dict(self) -> dict[str, str]:
        return {"role": self.role.value, "content": self.content}

    @classmethod
    def user(cls, content: str) -> "ChatMessage":
        return cls(Role.USER, content)

    @classmethod
    def assistant(cls, content: str) -> "ChatMessage":
        return cls(Role.ASSISTANT, content)


@dataclass(frozen=True)
class Sidecar:
    """Structured hint for the synthetic annotator. Never sent over the wire."""

    kind: str
    payload: Mapping[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class ChatRequest:
    model_id: str
    temperature: float
    messages: tuple[ChatMessage, ...]
    sidecar: Sidecar | None = None
    request_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "messages", tuple(self.messages))
        if not self.messages:
            raise ValueError("a chat request needs at least one message")

    @classmethod
    def single(cls, prompt: str, *, model_id: str, temperature: float,
               sidecar: Sidecar | None = None, request_seed: int = 0) -> "ChatRequest":
        return cls(model_id, temperature, (ChatMessage.user(prompt),), sidecar, request_seed)

    def identity(self) -> dict[str, Any]:
        """The fields that define a request for caching purposes."""
        return {
            "model": self.model_id,
            "temperature": float(self.temperature),
            "messages": [m.to_dict() for m in self.messages],
            "request_seed": int(self.request_seed),
        }

    def wire_payload(self) -> dict[str, Any]:
        return {
            "model": self.model_id,
            "temperature": float(self.temperature),
            "messages": [m.to_dict() for m in self.messages],
        }

    @property
    def last_user_text(self) -> str:
        for message in reversed(self.messages):
            if message.role is Role.USER:
                return message.content
        return ""


def cache_key(request: ChatRequest) -> str:
    canonical = json.dumps(request.identity(), sort_keys=True, ensure_ascii=True,
                           separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class ChatResponse:
    text: str
    provider: str
    cache_hit: bool
    latency_ms: int
    key: str = ""


def messages_from_dicts(items: Sequence[Mapping[str, str]]) -> tuple[ChatMessage, ...]:
    return tuple(ChatMessage(Role(m["role"]), m["content"]) for m in items)

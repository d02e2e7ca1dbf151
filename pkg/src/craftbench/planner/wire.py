"""Chat-completion wire types, their JSON schemas, and the bundle mapping."""

from __future__ import annotations

from dataclasses import dataclass

from craftbench.curriculum import PromptBundle
from craftbench.errors import TransportError

SCHEMA_VERSION = 1

REQUEST_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "chat request",
    "type": "object",
    "required": ["model", "messages", "temperature", "max_tokens"],
    "additionalProperties": False,
    "properties": {
        "model": {"type": "string", "minLength": 1},
        "messages": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["role", "content"],
                "additionalProperties": False,
                "properties": {
                    "role": {"enum": ["system", "user", "assistant"]},
                    "content": {"type": "string"},
                    "attachment": {"type": "string"},
                },
            },
        },
        "temperature": {"type": "number", "minimum": 0},
        "max_tokens": {"type": "integer", "minimum": 1},
    },
}

RESPONSE_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "chat response",
    "type": "object",
    "required": ["text", "finish_reason"],
    "additionalProperties": True,
    "properties": {
        "text": {"type": "string"},
        "finish_reason": {"enum": ["stop", "length", "error"]},
        "usage": {
            "type": "object",
            "properties": {
                "prompt_tokens": {"type": "integer", "minimum": 0},
                "completion_tokens": {"type": "integer", "minimum": 0},
            },
        },
    },
}


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str
    attachment: str | None = None

    def to_json(self) -> dict:
        body = {"role": self.role, "content": self.content}
        if self.attachment is not None:
            body["attachment"] = self.attachment
        return body


@dataclass(frozen=True)
class ChatRequest:
    model: str
    messages: tuple[ChatMessage, ...]
    temperature: float
    max_tokens: int

    def to_json(self) -> dict:
        return {
            "model": self.model,
            "messages": [m.to_json() for m in self.messages],
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
        }


@dataclass(frozen=True)
class ChatResponse:
    text: str
    finish_reason: str
    usage: dict[str, int]

    @classmethod
    def from_json(cls, body) -> "ChatResponse":
        if not isinstance(body, dict) or "text" not in body or "finish_reason" not in body:
            raise TransportError("malformed", f"unexpected response body: {body!r}")
        if not isinstance(body["text"], str):
            raise TransportError("malformed", "response text is not a string")
        return cls(
            text=body["text"],
            finish_reason=str(body["finish_reason"]),
            usage=dict(body.get("usage", {})),
        )


def build_chat_request(
    bundle: PromptBundle, model: str, temperature: float, max_tokens: int
) -> ChatRequest:
    """System text becomes the system message, user text the user message;
    a frame attaches to the user message in its text serialization."""
    messages = [ChatMessage("system", bundle.system_text)] if bundle.system_text else []
    messages.append(
        ChatMessage(
            "user",
            bundle.user_text,
            attachment=bundle.attachment.serialize() if bundle.attachment else None,
        )
    )
    return ChatRequest(
        model=model,
        messages=tuple(messages),
        temperature=temperature,
        max_tokens=max_tokens,
    )

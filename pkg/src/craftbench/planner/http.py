"""Live HTTP chat backend with bounded retry and exponential backoff."""

from __future__ import annotations

import os
import threading
import time
from dataclasses import dataclass

import requests

from craftbench.curriculum import PromptBundle
from craftbench.errors import TransportError
from craftbench.planner.base import BackendDescriptor
from craftbench.planner.wire import ChatResponse, build_chat_request

RETRYABLE_STATUS = frozenset({429, 500, 502, 503, 504})
CREDENTIAL_ENV_VAR = "CRAFTBENCH_API_KEY"


@dataclass(frozen=True)
class EndpointConfig:
    url: str
    model: str
    temperature: float = 0.0
    max_tokens: int = 1024
    timeout_s: float = 30.0
    retries: int = 2  # retries after the first attempt
    backoff_base_s: float = 0.5
    max_in_flight: int = 4
    multimodal: bool = False
    credential_env_var: str = CREDENTIAL_ENV_VAR


class HttpBackend:
    """POSTs chat requests to a configured endpoint.

    Transient failures (timeouts, connection errors, retryable status codes)
    back off exponentially up to the retry cap; anything else raises a typed
    :class:`TransportError` immediately. The credential, if any, comes from
    an environment variable and is never persisted anywhere.
    """

    def __init__(self, config: EndpointConfig, sleeper=time.sleep):
        self.config = config
        self.descriptor = BackendDescriptor(
            name="http",
            model=config.model,
            deterministic=False,
            multimodal=config.multimodal,
        )
        self._sleep = sleeper
        self._gate = threading.BoundedSemaphore(config.max_in_flight)

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        credential = os.environ.get(self.config.credential_env_var)
        if credential:
            headers["Authorization"] = f"Bearer {credential}"
        return headers

    def propose(self, bundle: PromptBundle) -> str:
        request = build_chat_request(
            bundle,
            model=self.config.model,
            temperature=self.config.temperature,
            max_tokens=self.config.max_tokens,
        )
        body = request.to_json()
        attempts = self.config.retries + 1
        last_error: TransportError | None = None
        with self._gate:
            for attempt in range(attempts):
                if attempt:
                    self._sleep(self.config.backoff_base_s * 2 ** (attempt - 1))
                try:
                    response = requests.post(
                        self.config.url,
                        json=body,
                        headers=self._headers(),
                        timeout=self.config.timeout_s,
                    )
                except requests.Timeout as exc:
                    last_error = TransportError("timeout", str(exc))
                    continue
                except requests.ConnectionError as exc:
                    last_error = TransportError("connection", str(exc))
                    continue
                if response.status_code in RETRYABLE_STATUS:
                    last_error = TransportError(
                        "status", f"HTTP {response.status_code}"
                    )
                    continue
                if response.status_code != 200:
                    raise TransportError(
                        "status", f"HTTP {response.status_code}: {response.text[:200]}"
                    )
                try:
                    parsed = response.json()
                except ValueError as exc:
                    raise TransportError("malformed", f"not JSON: {exc}") from exc
                return ChatResponse.from_json(parsed).text
        assert last_error is not None
        raise last_error

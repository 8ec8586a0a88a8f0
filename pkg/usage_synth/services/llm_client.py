"""
Chat Completion Client

Minimal synchronous client for OpenAI-compatible endpoints:

    POST {base_url}/chat/completions  {"model": ..., "messages": [{"role", "content"}, ...]}

The reply text is the first choice's message content. Transport failures
(connection errors, timeouts) are retried up to `max_retries` times with the
same request body; HTTP errors are not retried.

Usage:
    with ChatCompletionClient.from_settings(load_settings()) as client:
        text = client.complete(spec.messages)
"""

import json
import logging
from typing import Any, Iterable, Sequence

import httpx

from usage_synth.core.config import Settings
from usage_synth.core.exceptions import LLMClientError
from usage_synth.models.generation import ChatMessage

logger = logging.getLogger(__name__)


class ChatCompletionClient:
    """One instance may serve many runs; every `complete` call sends a fresh conversation."""

    def __init__(
        self,
        base_url: str,
        model: str,
        api_key: str = "",
        timeout: float = 300.0,
        max_retries: int = 2,
        temperature: float | None = None,
        transport: httpx.BaseTransport | None = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.max_retries = max_retries
        self.temperature = temperature
        headers = {"Content-Type": "application/json"}
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        self._client = httpx.Client(headers=headers, timeout=timeout, transport=transport)

    @classmethod
    def from_settings(
        cls,
        settings: Settings,
        transport: httpx.BaseTransport | None = None,
    ) -> "ChatCompletionClient":
        return cls(
            base_url=settings.endpoint_url,
            model=settings.model_name,
            api_key=settings.usage_synth_api_key,
            timeout=settings.request_timeout_s,
            max_retries=settings.max_retries,
            temperature=settings.temperature,
            transport=transport,
        )

    @property
    def completions_url(self) -> str:
        return f"{self.base_url}/chat/completions"

    def close(self):
        self._client.close()

    def __enter__(self):
        return self

    def __exit__(self, *args):
        self.close()

    def build_payload(self, messages: Sequence[ChatMessage]) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "model": self.model,
            "messages": [{"role": m.role, "content": m.content} for m in messages],
        }
        if self.temperature is not None:
            payload["temperature"] = self.temperature
        return payload

    def complete(self, messages: Sequence[ChatMessage]) -> str:
        """Request exactly one completion for `messages` and return its text."""
        payload = self.build_payload(messages)
        attempts = 0
        last_error: httpx.TransportError | None = None

        while attempts <= self.max_retries:
            attempts += 1
            try:
                resp = self._client.post(self.completions_url, json=payload)
            except httpx.TransportError as e:
                last_error = e
                logger.warning(
                    f"Request to {self.completions_url} failed "
                    f"(attempt {attempts}/{self.max_retries + 1}): {e!r}"
                )
                continue

            if resp.status_code >= 400:
                raise LLMClientError(
                    f"HTTP {resp.status_code} from {self.completions_url}",
                    status_code=resp.status_code,
                    detail=resp.text,
                    attempts=attempts,
                )
            return self._reply_text(resp, attempts)

        kind = "timed out" if isinstance(last_error, httpx.TimeoutException) else "unreachable"
        logger.error(f"Endpoint {self.completions_url} {kind} after {attempts} attempts")
        raise LLMClientError(
            f"Endpoint {kind} after {attempts} attempts: {last_error!r}",
            detail=str(last_error),
            attempts=attempts,
        )

    def _reply_text(self, resp: httpx.Response, attempts: int) -> str:
        try:
            content = resp.json()["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError):
            raise LLMClientError(
                "Malformed chat-completion response",
                status_code=resp.status_code,
                detail=resp.text,
                attempts=attempts,
            )
        if not isinstance(content, str):
            raise LLMClientError(
                "Chat-completion response has no text content",
                status_code=resp.status_code,
                detail=resp.text,
                attempts=attempts,
            )
        return content


# --- Mock endpoint ---

class MockChatTransport(httpx.MockTransport):
    """
    Local stand-in for a chat-completion endpoint. Serves `replies` in order
    and repeats the last one when they run out. Request bodies are kept in
    `requests` for inspection.
    """

    def __init__(self, replies: Iterable[str]):
        self.replies = list(replies)
        if not self.replies:
            raise ValueError("MockChatTransport needs at least one reply")
        self.requests: list[dict[str, Any]] = []
        super().__init__(self._handle)

    def _handle(self, request: httpx.Request) -> httpx.Response:
        if not request.url.path.endswith("/chat/completions"):
            return httpx.Response(404, json={"error": {"message": f"no route {request.url.path}"}})
        body = json.loads(request.content)
        self.requests.append(body)
        reply = self.replies[min(len(self.requests), len(self.replies)) - 1]
        return httpx.Response(200, json={
            "id": f"mock-{len(self.requests)}",
            "object": "chat.completion",
            "model": body.get("model", "mock"),
            "choices": [{
                "index": 0,
                "message": {"role": "assistant", "content": reply},
                "finish_reason": "stop",
            }],
        })

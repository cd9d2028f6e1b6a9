"""Chat-completion and embedding providers.

One HTTP adapter speaks the common chat-completions/embeddings wire shape;
everything else in the pipeline is provider-agnostic. The mock providers are
part of the supported test surface: scripted (programmatic) and replay
(file-backed, keyed by request hash).
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Protocol

from ..errors import (
    ProviderRefusalError,
    TokenLimitError,
    TransportError,
    ValidationError,
)


@dataclass(frozen=True)
class ChatRequest:
    """One chat-completion call, tagged with the pipeline step issuing it."""

    model_id: str
    user_text: str
    system_text: str | None = None
    temperature: float = 0.0
    max_output_tokens: int = 4096
    request_tag: str = "untagged"

    def __post_init__(self) -> None:
        if not self.user_text:
            raise ValidationError("ChatRequest.user_text must be non-empty")
        if not math.isfinite(self.temperature):
            raise ValidationError("ChatRequest.temperature must be finite")
        if self.temperature < 0:
            raise ValidationError("ChatRequest.temperature must be >= 0")
        if self.max_output_tokens <= 0:
            raise ValidationError("ChatRequest.max_output_tokens must be positive")

    def fingerprint(self) -> str:
        """Stable hash of the request payload, used by the replay provider."""
        payload = json.dumps(
            {
                "model_id": self.model_id,
                "system_text": self.system_text,
                "user_text": self.user_text,
                "temperature": self.temperature,
                "max_output_tokens": self.max_output_tokens,
            },
            sort_keys=True,
            ensure_ascii=False,
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class ChatResponse:
    text: str
    input_tokens: int
    output_tokens: int


@dataclass(frozen=True)
class EmbeddingVector:
    """A finite, non-empty embedding."""

    values: tuple[float, ...]
    model_id: str

    def __post_init__(self) -> None:
        if not self.values:
            raise ValidationError("EmbeddingVector.values must be non-empty")
        for v in self.values:
            if v != v or v in (float("inf"), float("-inf")):
                raise ValidationError("EmbeddingVector entries must be finite")


class ChatProvider(Protocol):
    def complete(self, request: ChatRequest) -> ChatResponse: ...


class EmbeddingProvider(Protocol):
    def embed(self, texts: list[str], model_id: str) -> list[list[float]]: ...


def _estimate_tokens(text: str) -> int:
    # Rough chars/4 heuristic; mocks only, real providers report usage.
    return max(1, len(text) // 4)


class HttpChatProvider:
    """Adapter for an OpenAI-style /chat/completions endpoint."""

    def __init__(
        self,
        base_url: str,
        api_key: str,
        *,
        timeout: float = 120.0,
        transport_retries: int = 3,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        import httpx

        self._client = httpx.Client(
            base_url=base_url.rstrip("/"),
            headers={"Authorization": f"Bearer {api_key}"},
            timeout=timeout,
        )
        self._retries = transport_retries
        self._sleep = sleep

    def complete(self, request: ChatRequest) -> ChatResponse:
        import httpx

        messages = []
        if request.system_text:
            messages.append({"role": "system", "content": request.system_text})
        messages.append({"role": "user", "content": request.user_text})
        payload = {
            "model": request.model_id,
            "messages": messages,
            "temperature": request.temperature,
            "max_tokens": request.max_output_tokens,
        }
        last: Exception | None = None
        for attempt in range(self._retries):
            try:
                response = self._client.post("/chat/completions", json=payload)
            except httpx.HTTPError as exc:
                last = exc
                self._sleep(min(2.0**attempt, 8.0))
                continue
            if response.status_code == 429 or response.status_code >= 500:
                last = TransportError(f"provider returned {response.status_code}")
                self._sleep(min(2.0**attempt, 8.0))
                continue
            if response.status_code >= 400:
                body = response.text[:500]
                if "context_length" in body or "maximum context" in body:
                    raise TokenLimitError(body)
                raise ProviderRefusalError(
                    f"provider rejected request ({response.status_code}): {body}"
                )
            data = response.json()
            choice = data["choices"][0]
            if choice.get("finish_reason") == "content_filter":
                raise ProviderRefusalError("provider filtered the completion")
            usage = data.get("usage", {})
            return ChatResponse(
                text=choice["message"]["content"] or "",
                input_tokens=int(usage.get("prompt_tokens", 0)),
                output_tokens=int(usage.get("completion_tokens", 0)),
            )
        raise TransportError(f"chat completion failed after {self._retries} attempts: {last}")


class HttpEmbeddingProvider:
    """Adapter for an OpenAI-style /embeddings endpoint."""

    def __init__(
        self,
        base_url: str,
        api_key: str,
        *,
        timeout: float = 60.0,
        transport_retries: int = 3,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        import httpx

        self._client = httpx.Client(
            base_url=base_url.rstrip("/"),
            headers={"Authorization": f"Bearer {api_key}"},
            timeout=timeout,
        )
        self._retries = transport_retries
        self._sleep = sleep

    def embed(self, texts: list[str], model_id: str) -> list[list[float]]:
        import httpx

        last: Exception | None = None
        for attempt in range(self._retries):
            try:
                response = self._client.post(
                    "/embeddings", json={"model": model_id, "input": texts}
                )
            except httpx.HTTPError as exc:
                last = exc
                self._sleep(min(2.0**attempt, 8.0))
                continue
            if response.status_code >= 400:
                last = TransportError(f"provider returned {response.status_code}")
                self._sleep(min(2.0**attempt, 8.0))
                continue
            data = response.json()["data"]
            ordered = sorted(data, key=lambda item: item["index"])
            return [list(map(float, item["embedding"])) for item in ordered]
        raise TransportError(f"embedding failed after {self._retries} attempts: {last}")


class ScriptedChatProvider:
    """Returns canned responses chosen by a matcher over the prompt text.

    Rules are (predicate, response) pairs tried in order; `default` answers
    anything unmatched. Call counts are recorded for assertions.
    """

    def __init__(self, default: str | None = None) -> None:
        self._rules: list[tuple[Callable[[ChatRequest], bool], Callable[[ChatRequest], str]]] = []
        self.default = default
        self.calls: list[ChatRequest] = []

    @staticmethod
    def _wrap(
        predicate: Callable[[ChatRequest], bool] | str,
        response: str | Callable[[ChatRequest], str],
    ) -> tuple[Callable[[ChatRequest], bool], Callable[[ChatRequest], str]]:
        if isinstance(predicate, str):
            needle = predicate
            predicate = lambda req, _n=needle: _n in req.user_text  # noqa: E731
        if isinstance(response, str):
            text = response
            response = lambda req, _t=text: _t  # noqa: E731
        return predicate, response

    def add(
        self,
        predicate: Callable[[ChatRequest], bool] | str,
        response: str | Callable[[ChatRequest], str],
    ) -> "ScriptedChatProvider":
        self._rules.append(self._wrap(predicate, response))
        return self

    def add_first(
        self,
        predicate: Callable[[ChatRequest], bool] | str,
        response: str | Callable[[ChatRequest], str],
    ) -> "ScriptedChatProvider":
        """Install an overriding rule; rules are tried in order."""
        self._rules.insert(0, self._wrap(predicate, response))
        return self

    def complete(self, request: ChatRequest) -> ChatResponse:
        self.calls.append(request)
        for predicate, response in self._rules:
            if predicate(request):
                text = response(request)
                return ChatResponse(
                    text=text,
                    input_tokens=_estimate_tokens(request.user_text),
                    output_tokens=_estimate_tokens(text),
                )
        if self.default is not None:
            return ChatResponse(
                text=self.default,
                input_tokens=_estimate_tokens(request.user_text),
                output_tokens=_estimate_tokens(self.default),
            )
        raise ProviderRefusalError(
            f"scripted provider has no rule for tag {request.request_tag!r}"
        )


class ReplayChatProvider:
    """File-backed mock replaying canned responses keyed by request hash.

    The directory holds one `<fingerprint>.json` per known request with
    {"text": ..., "input_tokens": ..., "output_tokens": ...}. Unknown
    requests raise, which keeps replays honest.
    """

    def __init__(self, directory: str | Path) -> None:
        self.directory = Path(directory)
        self.calls = 0

    def record(self, request: ChatRequest, text: str) -> None:
        self.directory.mkdir(parents=True, exist_ok=True)
        entry = {
            "text": text,
            "input_tokens": _estimate_tokens(request.user_text),
            "output_tokens": _estimate_tokens(text),
        }
        path = self.directory / f"{request.fingerprint()}.json"
        path.write_text(json.dumps(entry, ensure_ascii=False), encoding="utf-8")

    def complete(self, request: ChatRequest) -> ChatResponse:
        self.calls += 1
        path = self.directory / f"{request.fingerprint()}.json"
        if not path.exists():
            raise TransportError(
                f"replay provider has no canned response for hash {request.fingerprint()[:12]}"
            )
        entry = json.loads(path.read_text(encoding="utf-8"))
        return ChatResponse(
            text=entry["text"],
            input_tokens=int(entry.get("input_tokens", 0)),
            output_tokens=int(entry.get("output_tokens", 0)),
        )


class HashEmbeddingProvider:
    """Deterministic unit-norm embeddings derived from a text hash.

    Identical texts embed identically; distinct texts spread out enough for
    ranking tests. Optional overrides pin exact vectors per text.
    """

    def __init__(self, dim: int = 8, overrides: dict[str, list[float]] | None = None) -> None:
        if dim < 1:
            raise ValidationError("embedding dim must be >= 1")
        self.dim = dim
        self.overrides = dict(overrides or {})
        self.calls = 0

    def embed(self, texts: list[str], model_id: str) -> list[list[float]]:
        self.calls += 1
        vectors = []
        for text in texts:
            if text in self.overrides:
                vectors.append([float(v) for v in self.overrides[text]])
                continue
            digest = hashlib.sha256(text.encode("utf-8")).digest()
            raw = []
            for i in range(self.dim):
                chunk = digest[(2 * i) % len(digest)]
                raw.append((chunk / 255.0) * 2.0 - 1.0)
            norm = sum(v * v for v in raw) ** 0.5 or 1.0
            vectors.append([v / norm for v in raw])
        return vectors

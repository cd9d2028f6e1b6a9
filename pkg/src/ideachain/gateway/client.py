"""The gateway every pipeline step talks to.

Wraps a chat provider and an embedding provider behind one object that
renders catalog prompts, enforces the retry policy, meters usage, and parses
responses against their schemas. Parse failures re-issue the same prompt
(strict-format prompts usually recover on a resample); transport failures
are retried inside the provider adapters.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from ..config import DEFAULT_COST_TABLE, PipelineConfig
from ..errors import ParseError, TransportError, ValidationError
from .limiter import RequestLimiter
from .parsing import ParsedFields, parse_structured
from .prompts import render_prompt, template_temperature
from .provider import (
    ChatProvider,
    ChatRequest,
    EmbeddingProvider,
    EmbeddingVector,
)
from .usage import UsageLog, cost_report, make_usage_record

logger = logging.getLogger(__name__)


@dataclass
class CompletionResult:
    text: str
    input_tokens: int
    output_tokens: int
    cost: float


class LlmGateway:
    def __init__(
        self,
        chat: ChatProvider,
        embeddings: EmbeddingProvider,
        config: PipelineConfig | None = None,
        *,
        cost_table: dict[str, tuple[float, float]] | None = None,
        limiter: RequestLimiter | None = None,
        usage_log: UsageLog | None = None,
    ) -> None:
        self.config = config or PipelineConfig()
        self._chat = chat
        self._embeddings = embeddings
        self._cost_table = dict(DEFAULT_COST_TABLE if cost_table is None else cost_table)
        self._limiter = limiter or RequestLimiter(
            self.config.max_in_flight, self.config.requests_per_minute
        )
        self.usage_log = usage_log or UsageLog()

    def _prices(self, model_id: str) -> tuple[float, float]:
        return self._cost_table.get(model_id, (0.0, 0.0))

    def complete(self, request: ChatRequest) -> CompletionResult:
        """Run one completion and append its usage record."""
        with self._limiter:
            response = self._chat.complete(request)
        record = make_usage_record(
            model_id=request.model_id,
            input_tokens=response.input_tokens,
            output_tokens=response.output_tokens,
            prices=self._prices(request.model_id),
            request_tag=request.request_tag,
        )
        self.usage_log.append(record)
        return CompletionResult(
            text=response.text,
            input_tokens=response.input_tokens,
            output_tokens=response.output_tokens,
            cost=record.cost,
        )

    def run_template(
        self,
        template_id: str,
        bindings: dict[str, str],
        *,
        request_tag: str | None = None,
        model_id: str | None = None,
        temperature: float | None = None,
        validator=None,
    ) -> ParsedFields:
        """Render a catalog prompt, complete it, and parse the response.

        Retries up to `retry_attempts` times on parse failure, re-issuing the
        identical prompt each time. The schema id always equals the template
        id: every published prompt declares exactly one output format. An
        optional `validator(fields)` may raise ParseError to reject responses
        that are well-formed but break the step's semantic contract; those
        rejections retry like any other parse failure.
        """
        prompt = render_prompt(template_id, bindings)
        request = ChatRequest(
            model_id=model_id or self.config.reasoning_model,
            user_text=prompt,
            temperature=(
                template_temperature(
                    template_id,
                    self.config.generative_temperature,
                    self.config.judging_temperature,
                )
                if temperature is None
                else temperature
            ),
            max_output_tokens=self.config.max_output_tokens,
            request_tag=request_tag or template_id,
        )
        last_error: ParseError | None = None
        for attempt in range(1, self.config.retry_attempts + 1):
            result = self.complete(request)
            try:
                fields = parse_structured(result.text, template_id)
                if validator is not None:
                    validator(fields)
                return fields
            except ParseError as exc:
                last_error = exc
                logger.warning(
                    "parse failure (%s) on %s attempt %d/%d",
                    exc.code,
                    template_id,
                    attempt,
                    self.config.retry_attempts,
                )
        raise ParseError(
            f"{template_id} response stayed malformed after "
            f"{self.config.retry_attempts} attempts: {last_error}",
            code=last_error.code if last_error else "malformed",
        )

    def embed(self, texts: list[str], *, model_id: str | None = None) -> list[EmbeddingVector]:
        """Embed a batch, preserving order; one vector per input text."""
        if not texts:
            raise ValidationError("embed() requires at least one text")
        for text in texts:
            if not text:
                raise ValidationError("embed() texts must be non-empty")
        model = model_id or self.config.embedding_model
        with self._limiter:
            raw = self._embeddings.embed(list(texts), model)
        if len(raw) != len(texts):
            raise TransportError(
                f"embedding batch returned {len(raw)} vectors for {len(texts)} texts"
            )
        dims = {len(v) for v in raw}
        if len(dims) != 1:
            raise TransportError(f"embedding dimensions differ across batch: {sorted(dims)}")
        return [EmbeddingVector(values=tuple(v), model_id=model) for v in raw]

    def cost_summary(self):
        return cost_report(self.usage_log)

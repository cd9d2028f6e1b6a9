"""Pipeline configuration.

Everything tunable lives here so CLI flags, config files, and tests share a
single source of defaults. Model ids and token prices are configuration, not
code: prices drift and deployments differ.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ValidationError

# Per-token prices keyed by model id: (input, output), in currency units.
# Editable via a JSON cost-table file; unknown models price at zero.
DEFAULT_COST_TABLE: dict[str, tuple[float, float]] = {
    "gpt-4o": (2.5e-06, 1.0e-05),
    "gpt-4o-mini": (1.5e-07, 6.0e-07),
    "text-embedding-3-large": (1.3e-07, 0.0),
}

ABLATION_FLAGS = ("no-chain", "no-future-trend", "no-entities")


@dataclass
class PipelineConfig:
    """Knobs for chain construction, ideation, and experiment design."""

    branches: int = 3
    max_length: int = 5
    milestone_citations: int = 1000
    forward_candidates: int = 20
    relevance_probe_depth: int = 3
    max_novelty_iters: int = 3
    novelty_queries: int = 3
    novelty_papers: int = 10
    refine_iterations: int = 1
    refine_search_papers: int = 5
    rag_papers: int = 5
    content_char_budget: int = 60_000
    reasoning_model: str = "gpt-4o"
    digest_model: str = "gpt-4o-mini"
    embedding_model: str = "text-embedding-3-large"
    generative_temperature: float = 0.7
    judging_temperature: float = 0.0
    max_output_tokens: int = 4096
    retry_attempts: int = 3
    max_in_flight: int = 8
    requests_per_minute: int = 120
    forward_anchor_fixed: bool = False
    ablate_chain: bool = False
    ablate_future_trend: bool = False
    ablate_entities: bool = False
    parallel_branches: bool = True
    seed: int = 0

    def __post_init__(self) -> None:
        if self.branches < 1:
            raise ValidationError("branches must be >= 1")
        if self.max_length < 1:
            raise ValidationError("max_length must be >= 1")
        if self.milestone_citations < 1:
            raise ValidationError("milestone_citations must be >= 1")
        if self.forward_candidates < 1:
            raise ValidationError("forward_candidates must be >= 1")
        if self.relevance_probe_depth < 1:
            raise ValidationError("relevance_probe_depth must be >= 1")
        if self.max_novelty_iters < 1:
            raise ValidationError("max_novelty_iters must be >= 1")
        if self.refine_iterations < 0:
            raise ValidationError("refine_iterations must be >= 0")
        if self.retry_attempts < 1:
            raise ValidationError("retry_attempts must be >= 1")

    def with_ablations(self, names: tuple[str, ...]) -> "PipelineConfig":
        """Return a copy with the given ablation flags switched on."""
        updates: dict[str, bool] = {}
        for name in names:
            if name not in ABLATION_FLAGS:
                raise ValidationError(
                    f"unknown ablation {name!r}; choose from {', '.join(ABLATION_FLAGS)}"
                )
            updates["ablate_" + name.replace("-", "_").removeprefix("no_")] = True
        return dataclasses.replace(self, **updates)

    def snapshot(self) -> dict:
        """Plain-dict view for run manifests and chain documents."""
        return dataclasses.asdict(self)


@dataclass
class EloConfig:
    """Rating parameters for tournament scoring."""

    initial_rating: float = 1000.0
    k_factor: float = 16.0
    shuffles: int = 1000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.k_factor <= 0:
            raise ValidationError("k_factor must be > 0")
        if self.shuffles < 1:
            raise ValidationError("shuffles must be >= 1")


def load_cost_table(path: str | Path | None) -> dict[str, tuple[float, float]]:
    """Load a {model_id: [input_price, output_price]} JSON file.

    Returns the built-in table when no path is given.
    """
    if path is None:
        return dict(DEFAULT_COST_TABLE)
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    table: dict[str, tuple[float, float]] = {}
    for model_id, prices in raw.items():
        if not isinstance(prices, (list, tuple)) or len(prices) != 2:
            raise ValidationError(
                f"cost table entry for {model_id!r} must be [input_price, output_price]"
            )
        table[model_id] = (float(prices[0]), float(prices[1]))
    return table


@dataclass
class ProviderSettings:
    """Connection settings for the chat/embedding provider and search service.

    Values default from environment variables so the CLI works without a
    config file; tests construct these directly.
    """

    llm_api_key: str = ""
    llm_base_url: str = "https://api.openai.com/v1"
    scholar_api_key: str = ""
    scholar_base_url: str = "https://api.semanticscholar.org/graph/v1"

    @classmethod
    def from_env(cls, environ: dict[str, str]) -> "ProviderSettings":
        return cls(
            llm_api_key=environ.get("IDEACHAIN_LLM_API_KEY", ""),
            llm_base_url=environ.get(
                "IDEACHAIN_LLM_BASE_URL", cls.llm_base_url
            ),
            scholar_api_key=environ.get("IDEACHAIN_SCHOLAR_API_KEY", ""),
            scholar_base_url=environ.get(
                "IDEACHAIN_SCHOLAR_BASE_URL", cls.scholar_base_url
            ),
        )


def config_field_names() -> list[str]:
    """Names of every tunable field, used by the CLI doc-sync test."""
    return [f.name for f in dataclasses.fields(PipelineConfig)]

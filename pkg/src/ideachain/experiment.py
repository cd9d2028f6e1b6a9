"""Experiment design and its review-refine loop.

A revision-0 plan is drafted from the idea, the entity pool, and the
experiment summaries of the winning branch's papers as few-shot examples.
Each refinement round reviews the latest plan, optionally derives a search
query from the suggestions (an empty query means no search), and rewrites
the plan with the retrieved literature bound in.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .chain import format_papers_block
from .config import PipelineConfig
from .errors import ValidationError
from .gateway.client import LlmGateway
from .scholar.client import ScholarClient
from .scholar.models import PaperStub

PLAN_SCHEMA_VERSION = 1


@dataclass
class ExperimentPlan:
    steps: list[str]
    revision: int = 0
    suggestions_applied: list[str] = field(default_factory=list)
    search_queries_used: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.steps:
            raise ValidationError("an experiment plan needs at least one step")
        if self.revision < 0:
            raise ValidationError("revision must be >= 0")

    def body(self) -> str:
        return "\n".join(self.steps)


@dataclass
class ReviewSuggestions:
    text: str
    revision_target: int

    def __post_init__(self) -> None:
        if not self.text:
            raise ValidationError("review suggestions must be non-empty")


def design_experiment(
    gateway: LlmGateway,
    idea_text: str,
    entities: str,
    past_experiments: list[str],
) -> ExperimentPlan:
    """Revision-0 plan; the few-shot slot may legitimately be empty."""
    if not idea_text:
        raise ValidationError("idea text must be non-empty")
    past_block = (
        "\n\n".join(
            f"Example {i}:\n{text}" for i, text in enumerate(past_experiments, start=1)
        )
        or "None"
    )
    fields = gateway.run_template(
        "experiment_generation",
        {"Past experiments": past_block, "Entities": entities, "Idea": idea_text},
        request_tag="experiment.design",
    )
    return ExperimentPlan(steps=list(fields["Experiment"]), revision=0)


def review_experiment(
    gateway: LlmGateway, idea_text: str, plan: ExperimentPlan, entities: str
) -> ReviewSuggestions:
    fields = gateway.run_template(
        "experiment_review",
        {"Entities": entities, "Idea": idea_text, "Experiment": plan.body()},
        request_tag="experiment.review",
    )
    return ReviewSuggestions(text=fields["Suggestion"], revision_target=plan.revision)


def derive_refinement_query(
    gateway: LlmGateway, plan: ExperimentPlan, suggestions: ReviewSuggestions
) -> str | None:
    """Search query derived from the review, or None when no search is
    needed (the model answers with an empty string)."""
    if not suggestions.text:
        raise ValidationError("suggestions must be non-empty")
    fields = gateway.run_template(
        "refine_query",
        {"Experiment": plan.body(), "Suggestions": suggestions.text},
        request_tag="experiment.refine_query",
    )
    query = fields["Query"].strip()
    return query or None


def refine_experiment(
    gateway: LlmGateway,
    plan: ExperimentPlan,
    suggestions: ReviewSuggestions,
    retrieved: list[PaperStub],
    *,
    query_used: str | None = None,
) -> ExperimentPlan:
    """One refinement pass: revision + 1, lineage appended."""
    if not suggestions.text:
        raise ValidationError("suggestions must be non-empty")
    literature = format_papers_block(retrieved) if retrieved else "None"
    fields = gateway.run_template(
        "experiment_refine",
        {
            "Searched paper information": literature,
            "Experiment": plan.body(),
            "Suggestions": suggestions.text,
        },
        request_tag="experiment.refine",
    )
    return ExperimentPlan(
        steps=list(fields["Experiment"]),
        revision=plan.revision + 1,
        suggestions_applied=plan.suggestions_applied + [suggestions.text],
        search_queries_used=plan.search_queries_used
        + ([query_used] if query_used else []),
    )


def design(
    gateway: LlmGateway,
    scholar: ScholarClient,
    idea_text: str,
    entities: str,
    past_experiments: list[str],
    config: PipelineConfig,
    iterations: int | None = None,
) -> ExperimentPlan:
    """Initial design plus `iterations` review-search-refine rounds.

    The final revision number equals the iteration count exactly; a round
    whose derived query is empty skips the search call entirely.
    """
    rounds = config.refine_iterations if iterations is None else iterations
    if rounds < 0:
        raise ValidationError("iterations must be >= 0")
    plan = design_experiment(gateway, idea_text, entities, past_experiments)
    for _ in range(rounds):
        suggestions = review_experiment(gateway, idea_text, plan, entities)
        query = derive_refinement_query(gateway, plan, suggestions)
        retrieved: list[PaperStub] = []
        if query is not None:
            retrieved = scholar.search_papers(query, limit=config.refine_search_papers)
        plan = refine_experiment(
            gateway, plan, suggestions, retrieved, query_used=query
        )
    return plan


def plan_to_document(plan: ExperimentPlan, topic: str) -> dict:
    return {
        "schema_version": PLAN_SCHEMA_VERSION,
        "kind": "plan",
        "topic": topic,
        "steps": list(plan.steps),
        "revision": plan.revision,
        "suggestions_applied": list(plan.suggestions_applied),
        "search_queries_used": list(plan.search_queries_used),
    }


def plan_from_document(document: dict) -> ExperimentPlan:
    return ExperimentPlan(
        steps=list(document["steps"]),
        revision=int(document["revision"]),
        suggestions_applied=list(document.get("suggestions_applied", [])),
        search_queries_used=list(document.get("search_queries_used", [])),
    )

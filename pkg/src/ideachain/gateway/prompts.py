"""Prompt-template catalog.

Each template ships as a data file whose body reproduces the published
prompt text byte-for-byte, with `[Name]` placeholder markers. Rendering is a
single-pass substitution so binding values are never re-scanned for markers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources

from ..errors import MissingBindingError, UnknownTemplateError

# Placeholder names per template, as printed in the published prompts.
TEMPLATE_PLACEHOLDERS: dict[str, frozenset[str]] = {
    "query_generation": frozenset({"Topic"}),
    "relevance_check": frozenset({"Title", "Abstract", "Topic"}),
    "paper_digest": frozenset({"Topic", "Paper content"}),
    "trend_summary": frozenset({"Entities", "Topic", "Idea chain"}),
    "future_trend": frozenset({"Entities", "Chain of ideas", "Trend", "Topic"}),
    "idea_generation": frozenset(
        {"Bad case", "Entities", "Topic", "Chain of ideas", "Trend", "Future direction"}
    ),
    "novelty_check": frozenset({"Idea", "Content of retrieved papers"}),
    "experiment_generation": frozenset({"Past experiments", "Entities", "Idea"}),
    "experiment_review": frozenset({"Entities", "Idea", "Experiment"}),
    "refine_query": frozenset({"Experiment", "Suggestions"}),
    "experiment_refine": frozenset(
        {"Searched paper information", "Experiment", "Suggestions"}
    ),
    "extract_topic": frozenset({"Title", "Abstract", "Introduction"}),
    "extract_idea": frozenset({"Content"}),
    "extract_experiment": frozenset({"Content"}),
    "compare_ideas": frozenset({"idea0", "idea1", "topic"}),
    "compare_experiments": frozenset(
        {"idea0", "experiment0", "idea1", "experiment1"}
    ),
}

TEMPLATE_IDS = tuple(sorted(TEMPLATE_PLACEHOLDERS))

# Steps whose output feeds free-form content rather than a strict verdict get
# the generative temperature; judging/extraction steps run cold.
GENERATIVE_TEMPLATES = frozenset(
    {
        "query_generation",
        "trend_summary",
        "future_trend",
        "idea_generation",
        "experiment_generation",
        "experiment_review",
        "experiment_refine",
    }
)

_MARKER = re.compile(r"\[([A-Za-z][A-Za-z0-9 ]*)\]")


@dataclass(frozen=True)
class PromptTemplate:
    """A published prompt body plus the placeholders it requires."""

    template_id: str
    body: str
    required_bindings: frozenset[str]

    def render(self, bindings: dict[str, str]) -> str:
        missing = self.required_bindings - bindings.keys()
        if missing:
            raise MissingBindingError(
                f"template {self.template_id!r} missing bindings: "
                + ", ".join(sorted(missing))
            )

        def substitute(match: re.Match[str]) -> str:
            name = match.group(1)
            if name in self.required_bindings:
                return str(bindings[name])
            return match.group(0)

        return _MARKER.sub(substitute, self.body)


def _load_body(template_id: str) -> str:
    ref = resources.files(__package__) / "templates" / f"{template_id}.txt"
    return ref.read_text(encoding="utf-8")


class PromptCatalog:
    """Loads and caches all templates; verifies markers match declarations."""

    def __init__(self) -> None:
        self._templates: dict[str, PromptTemplate] = {}

    def get(self, template_id: str) -> PromptTemplate:
        if template_id not in TEMPLATE_PLACEHOLDERS:
            raise UnknownTemplateError(f"unknown template id {template_id!r}")
        if template_id not in self._templates:
            body = _load_body(template_id)
            declared = TEMPLATE_PLACEHOLDERS[template_id]
            found = {m.group(1) for m in _MARKER.finditer(body)} & declared
            if found != declared:
                raise UnknownTemplateError(
                    f"template file {template_id!r} does not contain declared "
                    f"placeholders: missing {sorted(declared - found)}"
                )
            self._templates[template_id] = PromptTemplate(
                template_id=template_id,
                body=body,
                required_bindings=frozenset(declared),
            )
        return self._templates[template_id]


_CATALOG = PromptCatalog()


def render_prompt(template_id: str, bindings: dict[str, str]) -> str:
    """Render a catalog template with the given placeholder bindings."""
    return _CATALOG.get(template_id).render(bindings)


def template_temperature(template_id: str, generative: float, judging: float) -> float:
    return generative if template_id in GENERATIVE_TEMPLATES else judging

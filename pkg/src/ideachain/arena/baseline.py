"""Baseline extraction from real papers.

Three sequential model calls pull a topic, a double-blind idea, and the
experiment steps out of a published paper, producing the ground-truth
contestant the generated methods are measured against.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from ..errors import ValidationError
from ..gateway.client import LlmGateway

BASELINE_SCHEMA_VERSION = 1


class BaselineSource(str, Enum):
    EXTRACTED_REAL_PAPER = "extracted_real_paper"
    IMPORTED_METHOD_OUTPUT = "imported_method_output"


@dataclass
class BaselineRecord:
    topic: str
    idea_text: str
    experiment_steps: list[str]
    source: BaselineSource

    def __post_init__(self) -> None:
        if not self.topic:
            raise ValidationError("baseline record needs a topic")
        if self.source is BaselineSource.EXTRACTED_REAL_PAPER:
            if not self.idea_text or not self.experiment_steps:
                raise ValidationError(
                    "extracted baselines carry topic, idea, and experiment steps"
                )

    def to_dict(self) -> dict:
        return {
            "schema_version": BASELINE_SCHEMA_VERSION,
            "kind": "baseline",
            "topic": self.topic,
            "idea": self.idea_text,
            "experiment": list(self.experiment_steps),
            "source": self.source.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BaselineRecord":
        return cls(
            topic=data["topic"],
            idea_text=data.get("idea", ""),
            experiment_steps=list(data.get("experiment", [])),
            source=BaselineSource(data.get("source", "extracted_real_paper")),
        )


def extract_baseline(
    gateway: LlmGateway,
    paper_text: str,
    title: str,
    abstract: str,
    introduction: str,
) -> BaselineRecord:
    """Extract topic, idea, and experiment steps from one paper's text.

    The introduction may be empty (topic extraction proceeds with an empty
    slot); the full paper text feeds the idea and experiment stages.
    """
    if not paper_text:
        raise ValidationError("paper_text must be non-empty")
    if not title or not abstract:
        raise ValidationError("title and abstract must be non-empty")

    topic_fields = gateway.run_template(
        "extract_topic",
        {"Title": title, "Abstract": abstract, "Introduction": introduction or "N/A"},
        request_tag="arena.extract_topic",
    )
    idea_fields = gateway.run_template(
        "extract_idea", {"Content": paper_text}, request_tag="arena.extract_idea"
    )
    experiment_fields = gateway.run_template(
        "extract_experiment",
        {"Content": paper_text},
        request_tag="arena.extract_experiment",
    )
    return BaselineRecord(
        topic=topic_fields["topic"],
        idea_text=idea_fields["Final idea"],
        experiment_steps=list(experiment_fields["Experiment"]),
        source=BaselineSource.EXTRACTED_REAL_PAPER,
    )

"""Pairwise judges: the model-backed judge plus scripted stand-ins.

A judge sees two anonymous entries in presentation order and returns one
verdict per criterion: 0 (first presented wins), 1 (second wins), 2 (tie).
De-rotation back to method identity happens in the record layer, never here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Protocol

from ..errors import ValidationError
from ..gateway.client import LlmGateway
from .criteria import (
    EXPERIMENT_VERDICT_LABELS,
    IDEA_VERDICT_LABELS,
    Criterion,
    Track,
)


@dataclass(frozen=True)
class Contestant:
    """One side of a match: the idea text and, for the experiment track,
    the plan that goes with it."""

    idea_text: str
    experiment_text: str = ""


class PairJudge(Protocol):
    judge_id: str

    def judge_pair(
        self, track: Track, topic: str, first: Contestant, second: Contestant
    ) -> dict[Criterion, int]: ...


def judge_idea_pair(
    gateway: LlmGateway, topic: str, idea0: str, idea1: str
) -> dict[Criterion, int]:
    """Five per-criterion verdicts for two ideas, presentation-relative."""
    if not idea0 or not idea1:
        raise ValidationError("both ideas must be non-empty")
    fields = gateway.run_template(
        "compare_ideas",
        {"idea0": idea0, "idea1": idea1, "topic": topic},
        request_tag="arena.compare_ideas",
    )
    return {criterion: fields[label] for label, criterion in IDEA_VERDICT_LABELS.items()}


def judge_experiment_pair(
    gateway: LlmGateway,
    idea0: str,
    plan0: str,
    idea1: str,
    plan1: str,
) -> dict[Criterion, int]:
    """Three per-criterion verdicts for two experiment designs."""
    if not plan0 or not plan1:
        raise ValidationError("both experiment plans must be non-empty")
    fields = gateway.run_template(
        "compare_experiments",
        {"idea0": idea0, "experiment0": plan0, "idea1": idea1, "experiment1": plan1},
        request_tag="arena.compare_experiments",
    )
    return {
        criterion: fields[label]
        for label, criterion in EXPERIMENT_VERDICT_LABELS.items()
    }


class LlmPairJudge:
    """Judge backed by the compare prompts via the gateway."""

    def __init__(self, gateway: LlmGateway, judge_id: str) -> None:
        self.gateway = gateway
        self.judge_id = judge_id

    def judge_pair(
        self, track: Track, topic: str, first: Contestant, second: Contestant
    ) -> dict[Criterion, int]:
        if track is Track.IDEA:
            return judge_idea_pair(self.gateway, topic, first.idea_text, second.idea_text)
        return judge_experiment_pair(
            self.gateway,
            first.idea_text,
            first.experiment_text,
            second.idea_text,
            second.experiment_text,
        )


class ScriptedPairJudge:
    """Deterministic judge for tests; counts every call it receives.

    `decide(track, topic, first, second)` returns one verdict value applied
    to every criterion, or a full per-criterion dict.
    """

    def __init__(
        self,
        judge_id: str,
        decide: Callable[[Track, str, Contestant, Contestant], int | dict[Criterion, int]],
    ) -> None:
        self.judge_id = judge_id
        self._decide = decide
        self.calls = 0

    def judge_pair(
        self, track: Track, topic: str, first: Contestant, second: Contestant
    ) -> dict[Criterion, int]:
        from .criteria import criteria_for

        self.calls += 1
        outcome = self._decide(track, topic, first, second)
        if isinstance(outcome, dict):
            return dict(outcome)
        return {criterion: outcome for criterion in criteria_for(track)}

"""Evaluation tracks, criteria, and their published rubric text."""

from __future__ import annotations

from enum import Enum

from ..errors import ValidationError


class Track(str, Enum):
    IDEA = "idea"
    EXPERIMENT = "experiment"


class Criterion(str, Enum):
    NOVELTY = "novelty"
    SIGNIFICANCE = "significance"
    CLARITY = "clarity"
    FEASIBILITY = "feasibility"
    EFFECTIVENESS = "effectiveness"
    TECHNICAL_QUALITY = "technical_quality"


IDEA_CRITERIA: tuple[Criterion, ...] = (
    Criterion.NOVELTY,
    Criterion.SIGNIFICANCE,
    Criterion.CLARITY,
    Criterion.FEASIBILITY,
    Criterion.EFFECTIVENESS,
)

EXPERIMENT_CRITERIA: tuple[Criterion, ...] = (
    Criterion.FEASIBILITY,
    Criterion.TECHNICAL_QUALITY,
    Criterion.CLARITY,
)

# Judge-output labels per track, in the order the compare prompts demand.
IDEA_VERDICT_LABELS: dict[str, Criterion] = {
    "Novelty": Criterion.NOVELTY,
    "Significance": Criterion.SIGNIFICANCE,
    "Feasibility": Criterion.FEASIBILITY,
    "Clarity": Criterion.CLARITY,
    "Effectiveness": Criterion.EFFECTIVENESS,
}

EXPERIMENT_VERDICT_LABELS: dict[str, Criterion] = {
    "Feasibility": Criterion.FEASIBILITY,
    "Quality": Criterion.TECHNICAL_QUALITY,
    "Clarity": Criterion.CLARITY,
}

RUBRICS: dict[tuple[Track, Criterion], str] = {
    (Track.IDEA, Criterion.NOVELTY): (
        "Are the problems or approaches new? Is this a novel combination of "
        "familiar techniques? Is it clear how this work differs from previous "
        "contributions? Is related work adequately referenced?"
    ),
    (Track.IDEA, Criterion.SIGNIFICANCE): (
        "Are the idea important? Are other people (practitioners or "
        "researchers) likely to use these ideas or build on them? Does the "
        "idea address a difficult problem in a better way than previous "
        "research? Does it provide a unique theoretical or pragmatic approach?"
    ),
    (Track.IDEA, Criterion.CLARITY): (
        "Is the paper clearly written? Is it well-organized? Does it "
        "adequately inform the reader?"
    ),
    (Track.IDEA, Criterion.FEASIBILITY): (
        "Can the idea be realized with existing technology or methods? Are "
        "there any technical difficulties or bottlenecks? Is the idea clear "
        "and logical? Is there any obvious error or unreasonable part in the "
        "idea, and can the experiment be designed normally according to this "
        "idea."
    ),
    (Track.IDEA, Criterion.EFFECTIVENESS): (
        "How likely the proposed idea is going to work well (e.g., better "
        "than existing baselines)."
    ),
    (Track.EXPERIMENT, Criterion.FEASIBILITY): (
        "Can the experiment be realized with existing technology or methods? "
        "Are there any technical difficulties or bottlenecks? Is the "
        "experimental plan detailed and feasible? Are the experimental steps "
        "clear and logical? Is there any obvious error or unreasonable part "
        "in the experiment. Consider the rationality of its steps and the "
        "possibility that the idea can be successfully implemented."
    ),
    (Track.EXPERIMENT, Criterion.TECHNICAL_QUALITY): (
        "Is there a clear rationale for each step of the experimental design? "
        "Are the baseline and evaluation metrics chosen appropriately? Has "
        "the design taken into account the potential advantages and "
        "limitations of the methods used? Can this experimental design "
        "effectively support the claims made in the idea."
    ),
    (Track.EXPERIMENT, Criterion.CLARITY): (
        "Is the experimental plan clearly written? Dose it provide enough "
        "information for the expert reader to understand the experiment? Is "
        "it well organized? Does it adequately inform the reader?"
    ),
}


def criteria_for(track: Track) -> tuple[Criterion, ...]:
    if track is Track.IDEA:
        return IDEA_CRITERIA
    if track is Track.EXPERIMENT:
        return EXPERIMENT_CRITERIA
    raise ValidationError(f"unknown track {track!r}")


def rubric_for(track: Track, criterion: Criterion) -> str:
    key = (track, criterion)
    if key not in RUBRICS:
        raise ValidationError(f"criterion {criterion.value} is not part of track {track.value}")
    return RUBRICS[key]

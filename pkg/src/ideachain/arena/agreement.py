"""Judge-agreement statistics.

Agreement is the fraction of shared matches on which two judges name the
same winner by method identity. The primary figure counts a tie as its own
outcome (two ties agree); the tie-excluded variant keeps only matches where
both judges picked a winner.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ValidationError
from .criteria import Criterion, criteria_for
from .records import TIE, MatchRecord, ok_records


@dataclass
class AgreementReport:
    per_criterion: dict[Criterion, float]
    average: float
    per_criterion_tie_excluded: dict[Criterion, float | None]
    average_tie_excluded: float | None
    matched_keys: int


def compute_agreement(
    records_a: list[MatchRecord], records_b: list[MatchRecord]
) -> AgreementReport:
    """Per-criterion agreement between two judges' record sets.

    Symmetric in its arguments; identical inputs score 1.0 everywhere.
    """
    by_key_a = {r.key(): r for r in ok_records(records_a)}
    by_key_b = {r.key(): r for r in ok_records(records_b)}
    shared = sorted(set(by_key_a) & set(by_key_b))
    if not shared:
        raise ValidationError("the two record sets share no match keys")

    tracks = {by_key_a[k].track for k in shared}
    if len(tracks) != 1:
        raise ValidationError("shared records must belong to one track")
    criteria = criteria_for(tracks.pop())

    per_criterion: dict[Criterion, float] = {}
    per_criterion_excl: dict[Criterion, float | None] = {}
    for criterion in criteria:
        agree = 0
        both_decided = 0
        agree_decided = 0
        for key in shared:
            outcome_a = by_key_a[key].winner(criterion)
            outcome_b = by_key_b[key].winner(criterion)
            if outcome_a == outcome_b:
                agree += 1
            if outcome_a != TIE and outcome_b != TIE:
                both_decided += 1
                if outcome_a == outcome_b:
                    agree_decided += 1
        per_criterion[criterion] = agree / len(shared)
        per_criterion_excl[criterion] = (
            agree_decided / both_decided if both_decided else None
        )

    average = sum(per_criterion.values()) / len(criteria)
    decided_values = [v for v in per_criterion_excl.values() if v is not None]
    average_excl = sum(decided_values) / len(decided_values) if decided_values else None
    return AgreementReport(
        per_criterion=per_criterion,
        average=average,
        per_criterion_tie_excluded=per_criterion_excl,
        average_tie_excluded=average_excl,
        matched_keys=len(shared),
    )

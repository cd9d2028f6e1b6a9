"""Win/tie/lose scoring for pipeline-variant comparisons.

A variant battles the reference over a fixed match set and earns 2 points
per win, 1 per tie, 0 per loss, so 50 matches cap at 100. The reference
scored against itself is all ties by definition: one point per match.
"""

from __future__ import annotations

from ..errors import ValidationError
from .criteria import Criterion
from .records import TIE, MatchRecord, ok_records


def ablation_score(
    records: list[MatchRecord],
    reference_method: str,
    subject_method: str,
    criterion: Criterion,
) -> int:
    records = ok_records(records)
    if subject_method == reference_method:
        # Self-battle: every match is a tie by definition.
        return len(records)
    wins = ties = losses = 0
    for record in records:
        pair = {record.method_a, record.method_b}
        if pair != {reference_method, subject_method}:
            raise ValidationError(
                f"record pairs {sorted(pair)}, expected exactly "
                f"{sorted({reference_method, subject_method})}"
            )
        outcome = record.winner(criterion)
        if outcome == TIE:
            ties += 1
        elif outcome == subject_method:
            wins += 1
        else:
            losses += 1
    return 2 * wins + ties


def ablation_table(
    records: list[MatchRecord],
    reference_method: str,
    subject_method: str,
    criteria: tuple[Criterion, ...],
) -> dict[Criterion, int]:
    return {
        criterion: ablation_score(records, reference_method, subject_method, criterion)
        for criterion in criteria
    }

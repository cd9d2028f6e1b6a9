"""Rating computation over match records.

Sequential linear updates: with ratings R_a, R_b, the expected score for a
is E = 1 / (1 + 10^((R_b - R_a) / 400)); a win scores 1, a tie 0.5, a loss
0, and both sides move by k * (score - expectation). Because the processing
order matters, ratings are averaged over seeded random shuffles of the
record list, which makes results order-free and reproducible per seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..config import EloConfig
from ..errors import ValidationError
from .criteria import Criterion, Track, criteria_for
from .records import TIE, MatchRecord, ok_records


@dataclass
class EloTable:
    track: Track
    criteria: tuple[Criterion, ...]
    ratings: dict[Criterion, dict[str, float]]
    averages: dict[str, float] = field(default_factory=dict)
    ranks: dict[str, int] = field(default_factory=dict)

    def methods(self) -> list[str]:
        return sorted(self.averages)


def _update(
    ratings: dict[str, float], winner: str, loser: str, score: float, k: float
) -> None:
    expected = 1.0 / (1.0 + 10.0 ** ((ratings[loser] - ratings[winner]) / 400.0))
    delta = k * (score - expected)
    ratings[winner] += delta
    ratings[loser] -= delta


def compute_elo(records: list[MatchRecord], config: EloConfig) -> EloTable:
    """Per-criterion ratings averaged over shuffled match orders."""
    records = ok_records(records)
    if not records:
        raise ValidationError("compute_elo needs at least one completed record")
    tracks = {record.track for record in records}
    if len(tracks) != 1:
        raise ValidationError("records must all belong to one track")
    track = tracks.pop()
    criteria = criteria_for(track)

    methods = sorted({r.method_a for r in records} | {r.method_b for r in records})
    rng = random.Random(config.seed)
    totals: dict[Criterion, dict[str, float]] = {
        criterion: {m: 0.0 for m in methods} for criterion in criteria
    }

    order = list(range(len(records)))
    for _ in range(config.shuffles):
        rng.shuffle(order)
        tables = {
            criterion: {m: config.initial_rating for m in methods}
            for criterion in criteria
        }
        for index in order:
            record = records[index]
            for criterion in criteria:
                winner = record.winner(criterion)
                table = tables[criterion]
                if winner == TIE:
                    _update(table, record.method_a, record.method_b, 0.5, config.k_factor)
                else:
                    loser = (
                        record.method_b if winner == record.method_a else record.method_a
                    )
                    _update(table, winner, loser, 1.0, config.k_factor)
        for criterion in criteria:
            for method in methods:
                totals[criterion][method] += tables[criterion][method]

    ratings = {
        criterion: {m: totals[criterion][m] / config.shuffles for m in methods}
        for criterion in criteria
    }
    averages = {
        m: sum(ratings[criterion][m] for criterion in criteria) / len(criteria)
        for m in methods
    }
    by_average = sorted(methods, key=lambda m: (-averages[m], m))
    ranks = {m: i + 1 for i, m in enumerate(by_average)}
    return EloTable(
        track=track, criteria=criteria, ratings=ratings, averages=averages, ranks=ranks
    )

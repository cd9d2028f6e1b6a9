"""Match records and the append-only match log.

Verdicts are stored exactly as the judge emitted them: 0 means the first
presented entry won, 1 the second, 2 a tie. `presented_order` says which
method was shown first, so outcomes can always be de-rotated back to method
identity. Records are plain carriers; `validate()` enforces the judging
invariants at the boundaries that create or ingest records.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from ..errors import ValidationError
from .criteria import Criterion, Track, criteria_for

MATCH_SCHEMA_VERSION = 1

ORDER_AB = "ab"
ORDER_BA = "ba"

TIE = "tie"


@dataclass
class MatchRecord:
    topic_id: str
    track: Track
    method_a: str
    method_b: str
    presented_order: str
    verdicts: dict[Criterion, int] = field(default_factory=dict)
    judge_id: str = ""
    timestamp: float = 0.0
    status: str = "ok"
    error: str = ""

    def key(self) -> tuple[str, str, str, str, str]:
        """Identity of the scheduled match, independent of the judge."""
        return (
            self.track.value,
            self.topic_id,
            self.method_a,
            self.method_b,
            self.presented_order,
        )

    def validate(self) -> None:
        if not self.topic_id:
            raise ValidationError("match record needs a topic_id")
        if self.method_a == self.method_b:
            raise ValidationError("a match needs two distinct methods")
        if self.presented_order not in (ORDER_AB, ORDER_BA):
            raise ValidationError(f"bad presented_order {self.presented_order!r}")
        if self.status == "ok":
            expected = set(criteria_for(self.track))
            if set(self.verdicts) != expected:
                raise ValidationError(
                    f"verdicts must cover exactly {sorted(c.value for c in expected)}"
                )
            for criterion, value in self.verdicts.items():
                if value not in (0, 1, 2):
                    raise ValidationError(
                        f"verdict for {criterion.value} must be 0, 1, or 2"
                    )

    def winner(self, criterion: Criterion) -> str:
        """De-rotate one verdict to a method id, or "tie"."""
        value = self.verdicts[criterion]
        if value == 2:
            return TIE
        first = self.method_a if self.presented_order == ORDER_AB else self.method_b
        second = self.method_b if self.presented_order == ORDER_AB else self.method_a
        return first if value == 0 else second

    def to_dict(self) -> dict:
        return {
            "schema_version": MATCH_SCHEMA_VERSION,
            "kind": "match",
            "topic_id": self.topic_id,
            "track": self.track.value,
            "method_a": self.method_a,
            "method_b": self.method_b,
            "presented_order": self.presented_order,
            "verdicts": {c.value: v for c, v in self.verdicts.items()},
            "judge_id": self.judge_id,
            "timestamp": self.timestamp,
            "status": self.status,
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MatchRecord":
        return cls(
            topic_id=data["topic_id"],
            track=Track(data["track"]),
            method_a=data["method_a"],
            method_b=data["method_b"],
            presented_order=data["presented_order"],
            verdicts={Criterion(c): int(v) for c, v in data.get("verdicts", {}).items()},
            judge_id=data.get("judge_id", ""),
            timestamp=float(data.get("timestamp", 0.0)),
            status=data.get("status", "ok"),
            error=data.get("error", ""),
        )


def make_record(
    topic_id: str,
    track: Track,
    method_a: str,
    method_b: str,
    presented_order: str,
    verdicts: dict[Criterion, int],
    judge_id: str,
    *,
    timestamp: float | None = None,
) -> MatchRecord:
    record = MatchRecord(
        topic_id=topic_id,
        track=track,
        method_a=method_a,
        method_b=method_b,
        presented_order=presented_order,
        verdicts=dict(verdicts),
        judge_id=judge_id,
        timestamp=time.time() if timestamp is None else timestamp,
    )
    record.validate()
    return record


class MatchLog:
    """Line-delimited JSON log with serialized appends."""

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)
        self._lock = threading.Lock()

    def append(self, record: MatchRecord) -> None:
        record.validate()
        line = json.dumps(record.to_dict(), ensure_ascii=False)
        with self._lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8") as handle:
                handle.write(line + "\n")

    def load(self) -> list[MatchRecord]:
        if not self.path.exists():
            return []
        records = []
        with self.path.open("r", encoding="utf-8") as handle:
            for line in handle:
                line = line.strip()
                if not line:
                    continue
                records.append(MatchRecord.from_dict(json.loads(line)))
        return records

    def completed_keys(self, judge_id: str | None = None) -> set[tuple]:
        keys = set()
        for record in self.load():
            if record.status != "ok":
                continue
            if judge_id is not None and record.judge_id != judge_id:
                continue
            keys.add(record.key())
        return keys


def ok_records(records: Iterable[MatchRecord]) -> list[MatchRecord]:
    """Drop failure markers; only completed matches feed the statistics."""
    return [r for r in records if r.status == "ok"]

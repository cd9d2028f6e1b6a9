"""Usage and cost accounting for provider calls."""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field

from ..errors import ValidationError


@dataclass(frozen=True)
class UsageRecord:
    """Token counts and the cost of one provider call."""

    model_id: str
    input_tokens: int
    output_tokens: int
    price_in: float
    price_out: float
    cost: float
    request_tag: str
    timestamp: float

    def __post_init__(self) -> None:
        if self.input_tokens < 0 or self.output_tokens < 0:
            raise ValidationError("token counts must be non-negative")
        if self.cost < 0:
            raise ValidationError("cost must be non-negative")


def make_usage_record(
    model_id: str,
    input_tokens: int,
    output_tokens: int,
    prices: tuple[float, float],
    request_tag: str,
    timestamp: float | None = None,
) -> UsageRecord:
    price_in, price_out = prices
    cost = input_tokens * price_in + output_tokens * price_out
    return UsageRecord(
        model_id=model_id,
        input_tokens=input_tokens,
        output_tokens=output_tokens,
        price_in=price_in,
        price_out=price_out,
        cost=cost,
        request_tag=request_tag,
        timestamp=time.time() if timestamp is None else timestamp,
    )


class UsageLog:
    """Append-only, thread-safe accounting log."""

    def __init__(self) -> None:
        self._records: list[UsageRecord] = []
        self._lock = threading.Lock()

    def append(self, record: UsageRecord) -> None:
        with self._lock:
            self._records.append(record)

    def records(self) -> list[UsageRecord]:
        with self._lock:
            return list(self._records)

    def __len__(self) -> int:
        with self._lock:
            return len(self._records)


@dataclass
class CostReport:
    total: float
    by_tag: dict[str, float] = field(default_factory=dict)
    by_model: dict[str, float] = field(default_factory=dict)
    calls: int = 0

    def lines(self) -> list[str]:
        out = [f"total cost: {self.total:.6f} over {self.calls} calls"]
        for tag in sorted(self.by_tag):
            out.append(f"  [{tag}] {self.by_tag[tag]:.6f}")
        for model in sorted(self.by_model):
            out.append(f"  model {model}: {self.by_model[model]:.6f}")
        return out


def cost_report(log: UsageLog | list[UsageRecord]) -> CostReport:
    """Totals grouped by request tag and by model id."""
    records = log.records() if isinstance(log, UsageLog) else list(log)
    report = CostReport(total=0.0, calls=len(records))
    for record in records:
        report.total += record.cost
        report.by_tag[record.request_tag] = (
            report.by_tag.get(record.request_tag, 0.0) + record.cost
        )
        report.by_model[record.model_id] = (
            report.by_model.get(record.model_id, 0.0) + record.cost
        )
    return report

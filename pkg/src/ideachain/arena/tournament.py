"""Round-Robin tournament scheduling and execution.

Every unordered method pair meets twice per topic, once in each presentation
order, so a finished tournament holds 2 * |topics| * C(n, 2) records. Runs
are resumable: matches already recorded OK in the log are skipped, failed
ones are retried.
"""

from __future__ import annotations

import itertools
import json
import logging
from dataclasses import dataclass
from pathlib import Path

from ..errors import IdeaChainError, ValidationError
from .criteria import Track
from .judging import Contestant, PairJudge
from .records import ORDER_AB, ORDER_BA, MatchLog, MatchRecord, make_record

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Topic:
    topic_id: str
    text: str


def load_topics(path: str | Path) -> list[Topic]:
    """Topics file: JSON array of {"id": ..., "topic": ...} objects."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, list) or not raw:
        raise ValidationError("topics file must be a non-empty JSON array")
    topics = []
    for i, entry in enumerate(raw):
        if isinstance(entry, str):
            topics.append(Topic(topic_id=f"t{i:03d}", text=entry))
        else:
            topics.append(Topic(topic_id=str(entry["id"]), text=entry["topic"]))
    return topics


class MethodOutputs:
    """Directory of per-method, per-topic output documents.

    Layout: `<root>/<method_id>/<topic_id>.json` holding the idea text and
    experiment steps. External baselines are imported as these files.
    """

    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)

    def method_ids(self) -> list[str]:
        if not self.root.exists():
            return []
        return sorted(p.name for p in self.root.iterdir() if p.is_dir())

    def load(self, method_id: str, topic_id: str) -> Contestant:
        path = self.root / method_id / f"{topic_id}.json"
        if not path.exists():
            raise ValidationError(
                f"missing output for method {method_id!r} on topic {topic_id!r} "
                f"(expected {path})"
            )
        data = json.loads(path.read_text(encoding="utf-8"))
        steps = data.get("experiment", [])
        if isinstance(steps, list):
            experiment_text = "\n".join(steps)
        else:
            experiment_text = str(steps)
        return Contestant(idea_text=data.get("idea", ""), experiment_text=experiment_text)

    def save(
        self, method_id: str, topic_id: str, idea: str, experiment: list[str]
    ) -> Path:
        path = self.root / method_id / f"{topic_id}.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(
            json.dumps(
                {
                    "schema_version": 1,
                    "kind": "method_output",
                    "method": method_id,
                    "topic_id": topic_id,
                    "idea": idea,
                    "experiment": experiment,
                },
                ensure_ascii=False,
                indent=2,
            ),
            encoding="utf-8",
        )
        return path


@dataclass(frozen=True)
class PlannedMatch:
    topic_id: str
    method_a: str
    method_b: str
    presented_order: str

    def key(self, track: Track) -> tuple[str, str, str, str, str]:
        return (
            track.value,
            self.topic_id,
            self.method_a,
            self.method_b,
            self.presented_order,
        )


def plan_matches(methods: list[str], topics: list[Topic]) -> list[PlannedMatch]:
    """The full Round-Robin schedule, both orders of every pair."""
    if len(methods) < 2:
        raise ValidationError("a tournament needs at least two methods")
    if len(set(methods)) != len(methods):
        raise ValidationError("method ids must be unique")
    planned = []
    for topic in topics:
        for a, b in itertools.combinations(sorted(methods), 2):
            planned.append(PlannedMatch(topic.topic_id, a, b, ORDER_AB))
            planned.append(PlannedMatch(topic.topic_id, a, b, ORDER_BA))
    return planned


def expected_match_count(n_methods: int, n_topics: int) -> int:
    return 2 * n_topics * (n_methods * (n_methods - 1) // 2)


def run_tournament(
    outputs: MethodOutputs,
    methods: list[str],
    topics: list[Topic],
    track: Track,
    judge: PairJudge,
    log: MatchLog,
) -> list[MatchRecord]:
    """Judge every pending match, appending records as they complete.

    Outputs are loaded up front so a missing file fails before any judge
    call. Already-recorded matches (same judge) are skipped; matches whose
    judge call fails are logged with a failure marker and picked up again on
    the next run.
    """
    topic_texts = {t.topic_id: t.text for t in topics}
    contestants: dict[tuple[str, str], Contestant] = {}
    for topic in topics:
        for method in methods:
            contestants[(method, topic.topic_id)] = outputs.load(method, topic.topic_id)

    planned = plan_matches(methods, topics)
    done = log.completed_keys(judge_id=judge.judge_id)
    pending = [m for m in planned if m.key(track) not in done]
    logger.info(
        "tournament: %d planned, %d already recorded, %d pending",
        len(planned),
        len(planned) - len(pending),
        len(pending),
    )

    new_records = []
    for match in pending:
        first_id = match.method_a if match.presented_order == ORDER_AB else match.method_b
        second_id = match.method_b if match.presented_order == ORDER_AB else match.method_a
        first = contestants[(first_id, match.topic_id)]
        second = contestants[(second_id, match.topic_id)]
        try:
            verdicts = judge.judge_pair(
                track, topic_texts[match.topic_id], first, second
            )
            record = make_record(
                topic_id=match.topic_id,
                track=track,
                method_a=match.method_a,
                method_b=match.method_b,
                presented_order=match.presented_order,
                verdicts=verdicts,
                judge_id=judge.judge_id,
            )
        except IdeaChainError as exc:
            # Judge-level failures are recorded and retried on the next run;
            # anything else (interrupts, bugs) propagates and stops the loop.
            logger.warning("match %s failed: %s", match, exc)
            record = MatchRecord(
                topic_id=match.topic_id,
                track=track,
                method_a=match.method_a,
                method_b=match.method_b,
                presented_order=match.presented_order,
                judge_id=judge.judge_id,
                status="failed",
                error=str(exc),
            )
        log.append(record)
        new_records.append(record)
    return new_records

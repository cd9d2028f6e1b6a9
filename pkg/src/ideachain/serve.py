"""Local HTTP service backing blind human judging.

Humans see anonymous "Idea A"/"Idea B" texts, never method ids, file paths,
or run ids. Each scheduled match is locked to one session while it is on
screen, verdicts are idempotent (the first one wins), and records land in
the same match log the LLM tournament writes, so agreement and ratings
consume human and model verdicts identically.
"""

from __future__ import annotations

import hashlib
import random
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from .arena.criteria import Track, criteria_for, rubric_for
from .arena.judging import Contestant
from .arena.records import MatchLog, make_record
from .arena.tournament import (
    MethodOutputs,
    PlannedMatch,
    Topic,
    plan_matches,
)
from .errors import ValidationError

ASSIGNMENT_TIMEOUT_SECONDS = 30 * 60


@dataclass
class _Session:
    session_id: str
    judge_id: str
    order: list[PlannedMatch]
    served: dict[str, PlannedMatch] = field(default_factory=dict)  # token -> match
    cursor: int = 0


@dataclass
class _Lock:
    session_id: str
    expires_at: float


def _compose_text(track: Track, contestant: Contestant) -> str:
    if track is Track.IDEA:
        return contestant.idea_text
    return f"Idea:\n{contestant.idea_text}\n\nExperiment:\n{contestant.experiment_text}"


class JudgingService:
    """Session and assignment state behind the judging API."""

    def __init__(
        self,
        outputs: MethodOutputs,
        methods: list[str],
        topics: list[Topic],
        track: Track,
        log: MatchLog,
        *,
        seed: int = 0,
        assignment_timeout: float = ASSIGNMENT_TIMEOUT_SECONDS,
        clock=time.time,
    ) -> None:
        self.track = track
        self.log = log
        self.seed = seed
        self.assignment_timeout = assignment_timeout
        self.clock = clock
        self.topics = {t.topic_id: t for t in topics}
        self.planned = plan_matches(methods, topics)
        self.contestants: dict[tuple[str, str], Contestant] = {}
        for topic in topics:
            for method in methods:
                self.contestants[(method, topic.topic_id)] = outputs.load(
                    method, topic.topic_id
                )
        self._sessions: dict[str, _Session] = {}
        self._locks: dict[tuple, _Lock] = {}
        self._mutex = threading.Lock()

    # -- sessions -----------------------------------------------------------

    def create_session(self, judge_id: str) -> dict:
        if not judge_id:
            raise ValidationError("judge_id must be non-empty")
        with self._mutex:
            done = self.log.completed_keys(judge_id=judge_id)
            pending = [m for m in self.planned if m.key(self.track) not in done]
            rng = random.Random(f"{self.seed}:{judge_id}")
            rng.shuffle(pending)
            session = _Session(
                session_id=uuid.uuid4().hex,
                judge_id=judge_id,
                order=pending,
            )
            self._sessions[session.session_id] = session
            return {
                "session_id": session.session_id,
                "judge_id": judge_id,
                "track": self.track.value,
                "total": len(self.planned),
                "pending": len(pending),
            }

    def _session(self, session_id: str) -> _Session:
        session = self._sessions.get(session_id)
        if session is None:
            raise ValidationError(f"unknown session {session_id!r}")
        return session

    def _token(self, session: _Session, match: PlannedMatch) -> str:
        raw = f"{session.session_id}:{match.key(self.track)}"
        return hashlib.sha256(raw.encode("utf-8")).hexdigest()[:20]

    def _is_locked_elsewhere(self, key: tuple, session_id: str) -> bool:
        lock = self._locks.get(key)
        if lock is None or lock.session_id == session_id:
            return False
        if lock.expires_at <= self.clock():
            del self._locks[key]
            return False
        return True

    def next_pair(self, session_id: str) -> dict:
        """The next blinded pair for a session, or a done marker."""
        with self._mutex:
            session = self._session(session_id)
            done = self.log.completed_keys(judge_id=session.judge_id)
            while session.cursor < len(session.order):
                match = session.order[session.cursor]
                key = match.key(self.track)
                if key in done or self._is_locked_elsewhere(key, session_id):
                    session.cursor += 1
                    continue
                self._locks[key] = _Lock(
                    session_id=session_id,
                    expires_at=self.clock() + self.assignment_timeout,
                )
                token = self._token(session, match)
                session.served[token] = match
                first_id = match.method_a if match.presented_order == "ab" else match.method_b
                second_id = match.method_b if match.presented_order == "ab" else match.method_a
                first = self.contestants[(first_id, match.topic_id)]
                second = self.contestants[(second_id, match.topic_id)]
                return {
                    "done": False,
                    "match_token": token,
                    "label_a_text": _compose_text(self.track, first),
                    "label_b_text": _compose_text(self.track, second),
                    "topic": self.topics[match.topic_id].text,
                    "track": self.track.value,
                    "criteria": [
                        {"name": c.value, "rubric": rubric_for(self.track, c)}
                        for c in criteria_for(self.track)
                    ],
                    "progress": {
                        "completed": len(done),
                        "total": len(self.planned),
                    },
                }
            return {
                "done": True,
                "progress": {
                    "completed": len(self.log.completed_keys(judge_id=session.judge_id)),
                    "total": len(self.planned),
                },
            }

    def submit_verdict(self, session_id: str, match_token: str, verdicts: dict) -> dict:
        """Record one verdict; duplicates conflict and keep the first record.

        Returns {"status": "recorded"} or raises VerdictConflict.
        """
        with self._mutex:
            session = self._session(session_id)
            match = session.served.get(match_token)
            if match is None:
                raise ValidationError(f"session has not been served token {match_token!r}")
            key = match.key(self.track)
            if key in self.log.completed_keys(judge_id=session.judge_id):
                raise VerdictConflict("match already judged; first verdict retained")
            criteria = criteria_for(self.track)
            expected = {c.value for c in criteria}
            if set(verdicts) != expected:
                raise ValidationError(
                    f"verdicts must cover exactly {sorted(expected)}"
                )
            mapping = {"a": 0, "b": 1, "tie": 2}
            numeric = {}
            for criterion in criteria:
                choice = verdicts[criterion.value]
                if choice not in mapping:
                    raise ValidationError(
                        f"verdict for {criterion.value} must be one of a, b, tie"
                    )
                numeric[criterion] = mapping[choice]
            record = make_record(
                topic_id=match.topic_id,
                track=self.track,
                method_a=match.method_a,
                method_b=match.method_b,
                presented_order=match.presented_order,
                verdicts=numeric,
                judge_id=session.judge_id,
            )
            self.log.append(record)
            self._locks.pop(key, None)
            session.cursor += 1
            return {
                "status": "recorded",
                "progress": {
                    "completed": len(self.log.completed_keys(judge_id=session.judge_id)),
                    "total": len(self.planned),
                },
            }

    def progress(self) -> dict:
        by_judge: dict[str, int] = {}
        for record in self.log.load():
            if record.status == "ok":
                by_judge[record.judge_id] = by_judge.get(record.judge_id, 0) + 1
        return {"total_planned": len(self.planned), "completed_by_judge": by_judge}

    def pending_count(self) -> int:
        done = {k for k in self.log.completed_keys()}
        return sum(1 for m in self.planned if m.key(self.track) not in done)


class VerdictConflict(Exception):
    """A verdict already exists for this match and judge."""


def create_app(service: JudgingService, static_dir: str | Path | None = None):
    """FastAPI app exposing the judging API plus the bundled UI assets."""
    from fastapi import FastAPI, HTTPException, Request
    from fastapi.responses import FileResponse, JSONResponse

    app = FastAPI(title="pairwise judging service", docs_url=None, redoc_url=None)

    @app.get("/api/session")
    def create_session(judge_id: str = ""):
        try:
            return service.create_session(judge_id)
        except ValidationError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    @app.get("/api/session/{session_id}/next")
    def next_pair(session_id: str):
        try:
            return service.next_pair(session_id)
        except ValidationError as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    @app.post("/api/session/{session_id}/verdict")
    async def submit_verdict(session_id: str, request: Request):
        payload = await request.json()
        try:
            return service.submit_verdict(
                session_id,
                payload.get("match_token", ""),
                payload.get("verdicts", {}),
            )
        except VerdictConflict as exc:
            return JSONResponse(status_code=409, content={"detail": str(exc)})
        except ValidationError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    @app.get("/api/progress")
    def progress():
        return service.progress()

    if static_dir is not None:
        static_root = Path(static_dir)

        @app.get("/")
        def index():
            return FileResponse(static_root / "index.html")

        @app.get("/assets/{name}")
        def asset(name: str):
            target = (static_root / name).resolve()
            if not str(target).startswith(str(static_root.resolve())) or not target.exists():
                raise HTTPException(status_code=404, detail="not found")
            return FileResponse(target)

    return app


def default_static_dir() -> Path | None:
    """Built UI assets bundled with the package, when present."""
    candidate = Path(__file__).parent / "webui"
    return candidate if (candidate / "index.html").exists() else None

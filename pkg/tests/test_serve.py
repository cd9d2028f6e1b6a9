"""Judging service: sessions, blinding, idempotent verdicts, order balance."""

from __future__ import annotations

import json
import math

import pytest
from fastapi.testclient import TestClient

from ideachain.arena import MatchLog, Topic, Track, compute_agreement, compute_elo
from ideachain.arena.tournament import MethodOutputs
from ideachain.config import EloConfig
from ideachain.serve import JudgingService, create_app

METHODS = ["method-alpha", "method-beta", "method-gamma"]


def seed_outputs(tmp_path, methods=METHODS, topics=None) -> tuple[MethodOutputs, list[Topic]]:
    topics = topics or [Topic(f"t{i:02d}", f"topic {i}") for i in range(3)]
    outputs = MethodOutputs(tmp_path / "methods")
    for method in methods:
        for topic in topics:
            outputs.save(
                method,
                topic.topic_id,
                idea=f"blinded idea text {hash((method, topic.topic_id)) % 9999}",
                experiment=[f"Step1: blinded step {hash((method, topic.topic_id)) % 977}"],
            )
    return outputs, topics


def make_service(tmp_path, track=Track.IDEA, methods=METHODS, topics=None, seed=0):
    outputs, topics = seed_outputs(tmp_path, methods, topics)
    log = MatchLog(tmp_path / "matches.jsonl")
    return JudgingService(outputs, methods, topics, track, log, seed=seed), log


def judge_everything(client, judge_id: str, choose="tie") -> list[dict]:
    session = client.get(f"/api/session?judge_id={judge_id}").json()
    payloads = []
    while True:
        pair = client.get(f"/api/session/{session['session_id']}/next").json()
        payloads.append(pair)
        if pair.get("done"):
            return payloads
        verdicts = {c["name"]: choose for c in pair["criteria"]}
        response = client.post(
            f"/api/session/{session['session_id']}/verdict",
            json={"match_token": pair["match_token"], "verdicts": verdicts},
        )
        payloads.append(response.json())
        assert response.status_code == 200


def test_session_lifecycle_and_progress(tmp_path):
    service, log = make_service(tmp_path)
    client = TestClient(create_app(service))
    session = client.get("/api/session?judge_id=human-1").json()
    assert session["pending"] == 2 * 3 * 3  # 2 orders, C(3,2) pairs, 3 topics
    judge_everything(client, "human-1")
    progress = client.get("/api/progress").json()
    assert progress["completed_by_judge"]["human-1"] == 18
    assert len(log.completed_keys(judge_id="human-1")) == 18


def test_single_pending_match_session_of_length_one(tmp_path):
    service, log = make_service(
        tmp_path, methods=["method-alpha", "method-beta"], topics=[Topic("t0", "only topic")]
    )
    client = TestClient(create_app(service))
    # pre-record one of the two matches for this judge
    session = client.get("/api/session?judge_id=h").json()
    pair = client.get(f"/api/session/{session['session_id']}/next").json()
    verdicts = {c["name"]: "a" for c in pair["criteria"]}
    client.post(
        f"/api/session/{session['session_id']}/verdict",
        json={"match_token": pair["match_token"], "verdicts": verdicts},
    )
    fresh = client.get("/api/session?judge_id=h").json()
    assert fresh["pending"] == 1


def test_blinding_no_method_identifiers_in_any_payload(tmp_path):
    methods = ["method-alpha", "method-beta", "method-gamma", "method-delta", "method-epsilon"]
    topics = [Topic(f"t{i:02d}", f"fixture topic {i}") for i in range(5)]
    service, _ = make_service(tmp_path, methods=methods, topics=topics)
    client = TestClient(create_app(service))
    payloads = judge_everything(client, "human-1")
    assert len([p for p in payloads if "match_token" in p]) == 2 * 10 * 5  # 100 pairs
    serialized = json.dumps(payloads)
    for method in methods:
        assert method not in serialized
    assert "methods/" not in serialized  # no file paths either


def test_verdict_is_idempotent_first_retained(tmp_path):
    service, log = make_service(tmp_path)
    client = TestClient(create_app(service))
    session = client.get("/api/session?judge_id=h").json()
    pair = client.get(f"/api/session/{session['session_id']}/next").json()
    verdicts_one = {c["name"]: "a" for c in pair["criteria"]}
    verdicts_two = {c["name"]: "b" for c in pair["criteria"]}
    first = client.post(
        f"/api/session/{session['session_id']}/verdict",
        json={"match_token": pair["match_token"], "verdicts": verdicts_one},
    )
    assert first.status_code == 200
    duplicate = client.post(
        f"/api/session/{session['session_id']}/verdict",
        json={"match_token": pair["match_token"], "verdicts": verdicts_two},
    )
    assert duplicate.status_code == 409
    records = log.load()
    assert len(records) == 1
    assert set(records[0].verdicts.values()) == {0}  # the first submission


def test_incomplete_verdict_rejected(tmp_path):
    service, _ = make_service(tmp_path)
    client = TestClient(create_app(service))
    session = client.get("/api/session?judge_id=h").json()
    pair = client.get(f"/api/session/{session['session_id']}/next").json()
    response = client.post(
        f"/api/session/{session['session_id']}/verdict",
        json={"match_token": pair["match_token"], "verdicts": {"novelty": "a"}},
    )
    assert response.status_code == 400


def test_match_locked_while_assigned_elsewhere(tmp_path):
    service, _ = make_service(
        tmp_path, methods=["method-alpha", "method-beta"], topics=[Topic("t0", "x")]
    )
    client = TestClient(create_app(service))
    s1 = client.get("/api/session?judge_id=h").json()
    s2 = client.get("/api/session?judge_id=h").json()
    p1 = client.get(f"/api/session/{s1['session_id']}/next").json()
    p2 = client.get(f"/api/session/{s2['session_id']}/next").json()
    assert p1["match_token"] != p2.get("match_token")


def test_lock_expires_after_timeout(tmp_path):
    now = [0.0]
    outputs, topics = seed_outputs(
        tmp_path, ["method-alpha", "method-beta"], [Topic("t0", "x")]
    )
    log = MatchLog(tmp_path / "m.jsonl")
    service = JudgingService(
        outputs,
        ["method-alpha", "method-beta"],
        topics,
        Track.IDEA,
        log,
        assignment_timeout=60,
        clock=lambda: now[0],
    )
    client = TestClient(create_app(service))
    s1 = client.get("/api/session?judge_id=h").json()
    s2 = client.get("/api/session?judge_id=h").json()
    first = client.get(f"/api/session/{s1['session_id']}/next").json()
    now[0] = 61.0
    second = client.get(f"/api/session/{s2['session_id']}/next").json()
    assert second["match_token"] != first["match_token"] or not second.get("done")


def test_experiment_track_serves_three_criteria(tmp_path):
    service, _ = make_service(tmp_path, track=Track.EXPERIMENT)
    client = TestClient(create_app(service))
    session = client.get("/api/session?judge_id=h").json()
    pair = client.get(f"/api/session/{session['session_id']}/next").json()
    names = [c["name"] for c in pair["criteria"]]
    assert names == ["feasibility", "technical_quality", "clarity"]
    assert "Experiment:" in pair["label_a_text"]
    for criterion in pair["criteria"]:
        assert criterion["rubric"]


def test_rubric_text_is_published_wording(tmp_path):
    service, _ = make_service(tmp_path)
    client = TestClient(create_app(service))
    session = client.get("/api/session?judge_id=h").json()
    pair = client.get(f"/api/session/{session['session_id']}/next").json()
    rubric = {c["name"]: c["rubric"] for c in pair["criteria"]}
    assert rubric["novelty"].startswith("Are the problems or approaches new?")


def test_order_balance_within_binomial_bounds(tmp_path):
    # 10 topics x C(5,2) pairs x 2 orders = 400 assignments.
    methods = [f"method-{i}" for i in "abcde"]
    topics = [Topic(f"t{i:02d}", f"topic {i}") for i in range(10)]
    service, log = make_service(tmp_path, methods=methods, topics=topics, seed=11)
    client = TestClient(create_app(service))
    payloads = judge_everything(client, "human-1")
    records = log.load()
    assert len(records) == 400
    first_counts = {m: 0 for m in methods}
    appearances = {m: 0 for m in methods}
    for record in records:
        first = record.method_a if record.presented_order == "ab" else record.method_b
        first_counts[first] += 1
        appearances[record.method_a] += 1
        appearances[record.method_b] += 1
    for method in methods:
        n = appearances[method]
        share = first_counts[method] / n
        half_width = 2.576 * math.sqrt(0.25 / n)
        assert abs(share - 0.5) <= half_width, (method, share)


def test_human_records_feed_elo_and_agreement_unchanged(tmp_path):
    service, log = make_service(tmp_path)
    client = TestClient(create_app(service))
    judge_everything(client, "human-1", choose="tie")
    judge_everything(client, "human-2", choose="tie")
    records = log.load()
    by_judge = {"human-1": [], "human-2": []}
    for record in records:
        by_judge[record.judge_id].append(record)
    table = compute_elo(by_judge["human-1"], EloConfig(shuffles=2, seed=0))
    assert all(
        rating == pytest.approx(1000.0)
        for ratings in table.ratings.values()
        for rating in ratings.values()
    )
    report = compute_agreement(by_judge["human-1"], by_judge["human-2"])
    assert report.average == 1.0

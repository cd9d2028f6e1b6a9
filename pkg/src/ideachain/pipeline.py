"""End-to-end run orchestration: ideate, design the experiment, archive."""

from __future__ import annotations

import logging
import re
import time
import uuid
from dataclasses import dataclass

from .arena.judging import LlmPairJudge, PairJudge
from .chain import chain_to_document, format_entities
from .config import PipelineConfig
from .experiment import ExperimentPlan, design, plan_to_document
from .gateway.client import LlmGateway
from .ideation import IdeationResult, idea_to_document, ideate
from .scholar.client import ScholarClient
from .store import RunStore, build_manifest

logger = logging.getLogger(__name__)


@dataclass
class Runtime:
    """Everything a pipeline run needs, assembled once at the entry point."""

    gateway: LlmGateway
    scholar: ScholarClient
    store: RunStore
    config: PipelineConfig


@dataclass
class RunResult:
    run_id: str
    manifest_ref: str
    ideation: IdeationResult
    plan: ExperimentPlan | None
    cost_lines: list[str]


def _slug(topic: str) -> str:
    slug = re.sub(r"[^a-z0-9]+", "-", topic.lower()).strip("-")[:40]
    return slug or "run"


def new_run_id(topic: str) -> str:
    return f"{_slug(topic)}-{time.strftime('%Y%m%d-%H%M%S')}-{uuid.uuid4().hex[:6]}"


def run_pipeline(
    runtime: Runtime,
    topic: str,
    *,
    judge: PairJudge | None = None,
    skip_experiment: bool = False,
    run_id: str | None = None,
) -> RunResult:
    """One full run for a topic, archived under a fresh run id."""
    config = runtime.config
    judge = judge or LlmPairJudge(runtime.gateway, judge_id=config.reasoning_model)
    run_id = run_id or new_run_id(topic)
    runtime.store.create_run(run_id)

    result = ideate(runtime.gateway, runtime.scholar, topic, config, judge)

    chain_refs = []
    for chain in result.chains:
        ref = runtime.store.persist(
            chain_to_document(chain, config, seed=config.seed),
            "chain",
            run_id,
            f"chain-{chain.branch_index}",
        )
        chain_refs.append(ref)

    idea_ref = runtime.store.persist(
        idea_to_document(result.final, topic, chain_refs), "idea", run_id, "idea"
    )

    plan = None
    artifacts = {"idea": idea_ref}
    for i, ref in enumerate(chain_refs):
        artifacts[f"chain-{i}"] = ref

    if not skip_experiment:
        winning = next(
            (c for c in result.chains if c.branch_index == result.final.draft.branch_index),
            None,
        )
        entities = format_entities(winning.entity_pool()) if winning else "None"
        if config.ablate_entities:
            entities = ""
        past = [n.digest.experiment_summary for n in winning.nodes] if winning else []
        plan = design(
            runtime.gateway,
            runtime.scholar,
            result.final.draft.final_text,
            entities,
            past,
            config,
        )
        artifacts["plan"] = runtime.store.persist(
            plan_to_document(plan, topic), "plan", run_id, "plan"
        )

    summary = runtime.gateway.cost_summary()
    cost_lines = summary.lines()
    # The published minimum cost per candidate idea + design, for comparison
    # when reading the report; provider prices make this figure drift.
    cost_lines.append("reference: published minimum per-run cost 0.50")
    manifest = build_manifest(
        run_id=run_id,
        topic=topic,
        config_snapshot=config.snapshot(),
        artifacts=artifacts,
        cost_summary={
            "total": summary.total,
            "by_tag": dict(summary.by_tag),
            "by_model": dict(summary.by_model),
            "calls": summary.calls,
        },
        seed=config.seed,
    )
    manifest_ref = runtime.store.write_manifest(run_id, manifest)
    logger.info("run %s archived (%d artifacts)", run_id, len(artifacts))
    return RunResult(
        run_id=run_id,
        manifest_ref=manifest_ref,
        ideation=result,
        plan=plan,
        cost_lines=cost_lines,
    )

"""Idea generation over constructed chains.

Per branch: extrapolate the trend lines into a future direction, consolidate
an idea (motivation, novelty, method, final text), and loop it through the
novelty judge, regenerating with the accumulated near-miss summaries until
the judge stops flagging similarity or the iteration budget runs out. The
branch winners then meet in a small round-robin and the highest win rate
becomes the run's final idea.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .arena.criteria import IDEA_CRITERIA, Criterion, Track
from .arena.judging import Contestant, PairJudge
from .arena.records import ORDER_AB, ORDER_BA, TIE, MatchRecord, make_record
from .chain import (
    ChainBuilder,
    FailedBranch,
    IdeaChain,
    format_entities,
    format_idea_chain,
    format_papers_block,
    format_trends,
)
from .config import PipelineConfig
from .errors import ValidationError
from .gateway.client import LlmGateway
from .scholar.client import ScholarClient
from .scholar.models import PaperStub

logger = logging.getLogger(__name__)

IDEA_SCHEMA_VERSION = 1


@dataclass
class FutureDirection:
    text: str
    branch_index: int


@dataclass
class NoveltyVerdict:
    similar: bool
    idea_summary: str
    similar_paper_index: int | None = None
    rationale: str = ""


@dataclass
class IdeaDraft:
    motivation: str
    novelty: str
    method: str
    final_text: str
    branch_index: int
    novelty_iterations_used: int = 0
    bad_cases: list[str] = field(default_factory=list)
    novelty_verdicts: list[NoveltyVerdict] = field(default_factory=list)


@dataclass
class FinalIdea:
    draft: IdeaDraft
    branch_win_rate: float
    selection_matches: list[MatchRecord] = field(default_factory=list)


@dataclass
class IdeationInputs:
    """Prompt-ready view of one branch.

    Ablation flags act here and only here, by blanking bindings: the
    templates themselves never change.
    """

    topic: str
    branch_index: int
    literature: str
    trends: str
    entities: str


def inputs_from_chain(
    chain: IdeaChain, config: PipelineConfig
) -> IdeationInputs:
    return IdeationInputs(
        topic=chain.topic,
        branch_index=chain.branch_index,
        literature=format_idea_chain(chain),
        trends=format_trends(chain.trends),
        entities="" if config.ablate_entities else format_entities(chain.entity_pool()),
    )


def inputs_from_papers(
    topic: str, stubs: list[PaperStub], branch_index: int = 0
) -> IdeationInputs:
    """Unordered retrieved literature: no trend lines, no entity pool."""
    return IdeationInputs(
        topic=topic,
        branch_index=branch_index,
        literature=format_papers_block(stubs),
        trends="",
        entities="",
    )


def predict_future_trend(
    gateway: LlmGateway, inputs: IdeationInputs
) -> FutureDirection:
    """Extrapolate the branch's evolution into a future research direction."""
    fields = gateway.run_template(
        "future_trend",
        {
            "Entities": inputs.entities,
            "Chain of ideas": inputs.literature,
            "Trend": inputs.trends,
            "Topic": inputs.topic,
        },
        request_tag="ideation.future_trend",
    )
    return FutureDirection(text=fields["Future direction"], branch_index=inputs.branch_index)


def _format_bad_cases(bad_cases: list[str]) -> str:
    if not bad_cases:
        return "None"
    return "\n".join(f"{i}. {case}" for i, case in enumerate(bad_cases, start=1))


def idea_bindings(
    inputs: IdeationInputs, future_text: str, bad_cases: list[str]
) -> dict[str, str]:
    """The exact placeholder bindings for one idea-consolidation call."""
    return {
        "Bad case": _format_bad_cases(bad_cases),
        "Entities": inputs.entities,
        "Topic": inputs.topic,
        "Chain of ideas": inputs.literature,
        "Trend": inputs.trends,
        "Future direction": future_text,
    }


def generate_idea(
    gateway: LlmGateway,
    inputs: IdeationInputs,
    future: FutureDirection | None,
    bad_cases: list[str],
) -> IdeaDraft:
    """Consolidate one idea draft: motivation, novelty, method, final text."""
    future_text = future.text if future is not None else ""
    fields = gateway.run_template(
        "idea_generation",
        idea_bindings(inputs, future_text, bad_cases),
        request_tag="ideation.generate",
    )
    return IdeaDraft(
        motivation=fields["Motivation"],
        novelty=fields["Novelty"],
        method=fields["Method"],
        final_text=fields["Final idea"],
        branch_index=inputs.branch_index,
        bad_cases=list(bad_cases),
    )


def retrieve_novelty_candidates(
    gateway: LlmGateway,
    scholar: ScholarClient,
    draft: IdeaDraft,
    config: PipelineConfig,
) -> list[PaperStub]:
    """Literature to compare the draft against: a few queries generated from
    the draft text, results interleaved and deduplicated."""
    fields = gateway.run_template(
        "query_generation",
        {"Topic": draft.final_text},
        request_tag="ideation.novelty_queries",
    )
    queries = fields["Queries"][: config.novelty_queries]
    per_query = max(1, math.ceil(config.novelty_papers / max(1, len(queries))))
    buckets = [scholar.search_papers(q, limit=per_query) for q in queries]
    merged: list[PaperStub] = []
    seen: set[str] = set()
    for i in range(per_query):
        for bucket in buckets:
            if i < len(bucket) and bucket[i].paper_id not in seen:
                seen.add(bucket[i].paper_id)
                merged.append(bucket[i])
    return merged[: config.novelty_papers]


def check_novelty(
    gateway: LlmGateway,
    scholar: ScholarClient,
    draft: IdeaDraft,
    config: PipelineConfig,
) -> NoveltyVerdict:
    """Judge the draft against retrieved papers; empty retrieval is novel."""
    if not draft.final_text:
        raise ValidationError("draft has no final text to check")
    candidates = retrieve_novelty_candidates(gateway, scholar, draft, config)
    if not candidates:
        return NoveltyVerdict(
            similar=False, idea_summary="", rationale="no comparison papers retrieved"
        )
    fields = gateway.run_template(
        "novelty_check",
        {
            "Idea": draft.final_text,
            "Content of retrieved papers": format_papers_block(candidates),
        },
        request_tag="ideation.novelty_check",
    )
    similar = fields["Similar"] == 1
    index = fields.get("Similar paper id")
    return NoveltyVerdict(
        similar=similar,
        idea_summary=fields["Summary of the idea"],
        similar_paper_index=index if similar and index is not None else None,
        rationale=fields.get("Think", ""),
    )


def ideate_branch(
    gateway: LlmGateway,
    scholar: ScholarClient,
    inputs: IdeationInputs,
    future: FutureDirection | None,
    config: PipelineConfig,
) -> IdeaDraft:
    """Generate-and-check loop, bounded by `max_novelty_iters`.

    A draft judged similar contributes its summary to the bad-case list for
    the next attempt; when the budget runs out the last draft is returned
    with the full verdict history attached.
    """
    bad_cases: list[str] = []
    verdicts: list[NoveltyVerdict] = []
    draft: IdeaDraft | None = None
    for iteration in range(1, config.max_novelty_iters + 1):
        draft = generate_idea(gateway, inputs, future, bad_cases)
        verdict = check_novelty(gateway, scholar, draft, config)
        verdicts.append(verdict)
        draft.novelty_iterations_used = iteration
        draft.novelty_verdicts = list(verdicts)
        if not verdict.similar:
            return draft
        bad_cases.append(verdict.idea_summary or draft.final_text)
        logger.info(
            "branch %d draft judged similar (iteration %d/%d)",
            inputs.branch_index,
            iteration,
            config.max_novelty_iters,
        )
    assert draft is not None
    return draft


def _match_outcome(record: MatchRecord) -> str:
    """Winner of one selection match: majority across the five criteria."""
    first_wins = sum(1 for c in IDEA_CRITERIA if record.winner(c) == record.method_a)
    second_wins = sum(1 for c in IDEA_CRITERIA if record.winner(c) == record.method_b)
    if first_wins > second_wins:
        return record.method_a
    if second_wins > first_wins:
        return record.method_b
    return TIE


def select_best_idea(
    judge: PairJudge, drafts: list[IdeaDraft], topic: str
) -> FinalIdea:
    """Round-robin over the branch drafts, both presentation orders.

    Win rate is (wins + ties/2) / matches on the per-match majority outcome.
    Exact win-rate ties break on Novelty-criterion wins, then branch index.
    """
    if not drafts:
        raise ValidationError("select_best_idea needs at least one draft")
    if len(drafts) == 1:
        return FinalIdea(draft=drafts[0], branch_win_rate=1.0, selection_matches=[])

    method_ids = [f"branch-{draft.branch_index}" for draft in drafts]
    if len(set(method_ids)) != len(method_ids):
        raise ValidationError("draft branch indices must be unique")
    by_method = dict(zip(method_ids, drafts))

    records: list[MatchRecord] = []
    for i in range(len(drafts)):
        for j in range(i + 1, len(drafts)):
            for order in (ORDER_AB, ORDER_BA):
                first_idx, second_idx = (i, j) if order == ORDER_AB else (j, i)
                verdicts = judge.judge_pair(
                    Track.IDEA,
                    topic,
                    Contestant(idea_text=drafts[first_idx].final_text),
                    Contestant(idea_text=drafts[second_idx].final_text),
                )
                records.append(
                    make_record(
                        topic_id="selection",
                        track=Track.IDEA,
                        method_a=method_ids[i],
                        method_b=method_ids[j],
                        presented_order=order,
                        verdicts=verdicts,
                        judge_id=judge.judge_id,
                    )
                )

    wins = {m: 0.0 for m in method_ids}
    matches = {m: 0 for m in method_ids}
    novelty_wins = {m: 0 for m in method_ids}
    for record in records:
        outcome = _match_outcome(record)
        for side in (record.method_a, record.method_b):
            matches[side] += 1
            if outcome == side:
                wins[side] += 1.0
            elif outcome == TIE:
                wins[side] += 0.5
        novelty_winner = record.winner(Criterion.NOVELTY)
        if novelty_winner != TIE:
            novelty_wins[novelty_winner] += 1

    def rate(method: str) -> float:
        return wins[method] / matches[method]

    best = max(
        method_ids,
        key=lambda m: (rate(m), novelty_wins[m], -by_method[m].branch_index),
    )
    return FinalIdea(
        draft=by_method[best], branch_win_rate=rate(best), selection_matches=records
    )


def generate_idea_rag(
    gateway: LlmGateway,
    scholar: ScholarClient,
    topic: str,
    config: PipelineConfig,
) -> IdeaDraft:
    """Plain retrieval-augmented baseline: one consolidation call over the
    top retrieved papers, same output format as the full pipeline."""
    if not topic:
        raise ValidationError("topic must be non-empty")
    stubs = scholar.search_papers(topic, limit=config.rag_papers)
    if not stubs:
        raise ValidationError(f"retrieval returned nothing for topic {topic!r}")
    inputs = inputs_from_papers(topic, stubs)
    return generate_idea(gateway, inputs, future=None, bad_cases=[])


@dataclass
class IdeationResult:
    final: FinalIdea
    drafts: list[IdeaDraft]
    chains: list[IdeaChain]
    failures: list[FailedBranch]
    futures: list[FutureDirection]


def ideate(
    gateway: LlmGateway,
    scholar: ScholarClient,
    topic: str,
    config: PipelineConfig,
    judge: PairJudge,
) -> IdeationResult:
    """Whole ideation stage: chains, per-branch drafts, branch selection."""
    if not topic:
        raise ValidationError("topic must be non-empty")

    chains: list[IdeaChain] = []
    failures: list[FailedBranch] = []
    if config.ablate_chain:
        stubs = scholar.search_papers(topic, limit=config.max_length)
        if not stubs:
            raise ValidationError(f"retrieval returned nothing for topic {topic!r}")
        branch_inputs = [inputs_from_papers(topic, stubs)]
    else:
        builder = ChainBuilder(gateway, scholar, config)
        chains, failures = builder.build_chains(topic)
        branch_inputs = [inputs_from_chain(chain, config) for chain in chains]

    def run_branch(inputs: IdeationInputs) -> tuple[FutureDirection | None, IdeaDraft]:
        future = None
        if not config.ablate_future_trend:
            future = predict_future_trend(gateway, inputs)
        draft = ideate_branch(gateway, scholar, inputs, future, config)
        return future, draft

    if config.parallel_branches and len(branch_inputs) > 1:
        with ThreadPoolExecutor(max_workers=len(branch_inputs)) as pool:
            outcomes = list(pool.map(run_branch, branch_inputs))
    else:
        outcomes = [run_branch(inputs) for inputs in branch_inputs]

    futures = [f for f, _ in outcomes if f is not None]
    drafts = [d for _, d in outcomes]
    final = select_best_idea(judge, drafts, topic)
    return IdeationResult(
        final=final, drafts=drafts, chains=chains, failures=failures, futures=futures
    )


def idea_to_document(final: FinalIdea, topic: str, chain_refs: list[str]) -> dict:
    draft = final.draft
    return {
        "schema_version": IDEA_SCHEMA_VERSION,
        "kind": "idea",
        "topic": topic,
        "motivation": draft.motivation,
        "novelty": draft.novelty,
        "method": draft.method,
        "final_text": draft.final_text,
        "branch_index": draft.branch_index,
        "chain_refs": list(chain_refs),
        "novelty_iterations_used": draft.novelty_iterations_used,
        "bad_cases": list(draft.bad_cases),
        "novelty_history": [
            {
                "similar": v.similar,
                "idea_summary": v.idea_summary,
                "similar_paper_index": v.similar_paper_index,
                "rationale": v.rationale,
            }
            for v in draft.novelty_verdicts
        ],
        "branch_win_rate": final.branch_win_rate,
        "selection_matches": [r.to_dict() for r in final.selection_matches],
    }

"""Chain construction: ranking oracle, extension rules, structure, shape."""

from __future__ import annotations

import json

import pytest

from helpers import (
    DIGEST_REFS,
    build_corpus,
    chain_chat_provider,
    make_gateway,
    make_scholar,
    synthesize_response,
)

from ideachain.chain import (
    AnchorNotFoundError,
    ChainBuilder,
    IdeaChain,
    StopReason,
    chain_from_document,
    chain_to_document,
    cosine_similarity,
)
from ideachain.config import PipelineConfig
from ideachain.errors import ValidationError
from ideachain.scholar.models import PaperStub
from ideachain.scholar.service import FixturePaper, FixtureTransport
from ideachain.scholar.client import ScholarClient

TOPIC = "using research agents for idea generation"


def make_builder(provider=None, papers=None, query_results=None, **config_kwargs):
    config = PipelineConfig(parallel_branches=False, **config_kwargs)
    gateway = make_gateway(provider or chain_chat_provider(), config)
    if papers is None:
        scholar, transport = make_scholar()
    else:
        transport = FixtureTransport(papers, query_results or {})
        scholar = ScholarClient(transport)
    return ChainBuilder(gateway, scholar, config), transport


# ---------------------------------------------------------------------------
# queries, relevance, anchor


def test_generate_queries_cardinality():
    builder, _ = make_builder()
    assert len(builder.generate_queries(TOPIC, 3)) == 3


def test_generate_queries_k1_returns_holistic_first():
    builder, _ = make_builder()
    assert builder.generate_queries(TOPIC, 1) == ["q-whole"]


def test_generate_queries_shortfall_is_error():
    provider = chain_chat_provider()
    provider.add_first("master of literature searching", 'Queries: "only-one"')
    builder, _ = make_builder(provider)
    with pytest.raises(ValidationError):
        builder.generate_queries(TOPIC, 3)


def test_check_relevance_parses_verdict():
    builder, _ = make_builder()
    stub = PaperStub(paper_id="A", title="Anchor Work on Topic", abstract="x")
    assert builder.check_relevance(stub, TOPIC) is True


def test_select_anchor_probes_in_order():
    papers = [
        FixturePaper(paper_id="bad", title="Off Topic Paper", abstract="irrelevant"),
        FixturePaper(paper_id="good", title="On Topic Paper", abstract="relevant"),
    ]
    provider = chain_chat_provider()
    provider.add_first(
        lambda req: "evaluating whether a given paper is relevant" in req.user_text
        and "Off Topic Paper" in req.user_text,
        "Think: no\nRelevant: 0",
    )
    builder, _ = make_builder(provider, papers, {"q": ["bad", "good"]})
    assert builder.select_anchor("q", TOPIC).paper_id == "good"


def test_select_anchor_none_relevant_errors():
    papers = [FixturePaper(paper_id="bad", title="Off Topic Paper")]
    provider = chain_chat_provider()
    provider.add_first(
        lambda req: "evaluating whether a given paper is relevant" in req.user_text,
        "Think: no\nRelevant: 0",
    )
    builder, _ = make_builder(provider, papers, {"q": ["bad"]})
    with pytest.raises(AnchorNotFoundError):
        builder.select_anchor("q", TOPIC)


# ---------------------------------------------------------------------------
# ranking


def test_cosine_identical_vector_scores_one():
    assert cosine_similarity((1.0, 2.0), (1.0, 2.0)) == pytest.approx(1.0)


def test_cosine_orthogonal_scores_zero():
    assert cosine_similarity((1.0, 0.0), (0.0, 1.0)) == pytest.approx(0.0)


def test_rank_candidates_hand_oracle():
    # reference (1,0); candidates (1,1) -> 1/sqrt(2), (1,0) -> 1, (0,1) -> 0
    ref_text = "reference"
    stubs = [
        PaperStub(paper_id="diag", title="diag", abstract=""),
        PaperStub(paper_id="same", title="same", abstract=""),
        PaperStub(paper_id="ortho", title="ortho", abstract=""),
    ]
    overrides = {
        ref_text: [1.0, 0.0],
        "diag": [1.0, 1.0],
        "same": [1.0, 0.0],
        "ortho": [0.0, 1.0],
    }
    config = PipelineConfig(parallel_branches=False)
    gateway = make_gateway(chain_chat_provider(), config, dim=2, overrides=overrides)
    scholar, _ = make_scholar()
    builder = ChainBuilder(gateway, scholar, config)
    ranked = builder.rank_candidates(stubs, ref_text)
    assert [stub.paper_id for stub, _ in ranked] == ["same", "diag", "ortho"]
    scores = {stub.paper_id: score for stub, score in ranked}
    assert scores["same"] == pytest.approx(1.0)
    assert scores["diag"] == pytest.approx(0.70711, abs=1e-5)
    assert scores["ortho"] == pytest.approx(0.0)
    assert all(-1.0 <= score <= 1.0 for _, score in ranked)


def test_rank_candidates_is_stable_permutation():
    stubs = [PaperStub(paper_id=f"p{i}", title="tie", abstract="") for i in range(4)]
    overrides = {"ref": [1.0, 0.0], "tie": [1.0, 1.0]}
    config = PipelineConfig(parallel_branches=False)
    gateway = make_gateway(chain_chat_provider(), config, dim=2, overrides=overrides)
    scholar, _ = make_scholar()
    builder = ChainBuilder(gateway, scholar, config)
    ranked = builder.rank_candidates(stubs, "ref")
    assert [stub.paper_id for stub, _ in ranked] == ["p0", "p1", "p2", "p3"]


# ---------------------------------------------------------------------------
# digestion


def test_extract_digest_parses_all_fields():
    builder, _ = make_builder()
    content = builder.scholar.fetch_content("A")
    digest = builder.extract_digest(content, TOPIC)
    assert digest.idea_summary == "Idea summary for CONTENT-A"
    assert digest.experiment_summary == "Experiment summary for CONTENT-A"
    assert digest.reference_titles == ["Reference One Foundations"]
    assert digest.entities and digest.entities[0].name == "Entity-CONTENT-A"


def test_extract_digest_empty_references():
    builder, _ = make_builder()
    content = builder.scholar.fetch_content("R3")
    assert builder.extract_digest(content, TOPIC).reference_titles == []


def test_extract_digest_works_on_abstract_only():
    papers = [
        FixturePaper(paper_id="X", title="T", abstract="CONTENT-A style abstract")
    ]
    builder, _ = make_builder(papers=papers)
    content = builder.scholar.fetch_content("X")
    digest = builder.extract_digest(content, TOPIC)
    assert digest.idea_summary


# ---------------------------------------------------------------------------
# extension


def _anchored_chain(builder) -> IdeaChain:
    stub = builder.scholar.get_paper("A")
    node = builder._digest_node(0, stub, TOPIC)
    return IdeaChain(topic=TOPIC, query="q-whole", nodes=[node])


def test_extend_backward_budget_zero_unchanged():
    builder, _ = make_builder()
    chain = _anchored_chain(builder)
    builder.extend_backward(chain, 0)
    assert len(chain.nodes) == 1
    assert chain.stop_reasons.backward is StopReason.BUDGET


def test_extend_forward_budget_zero_unchanged():
    builder, _ = make_builder()
    chain = _anchored_chain(builder)
    builder.extend_forward(chain, 0)
    assert len(chain.nodes) == 1
    assert chain.stop_reasons.forward is StopReason.BUDGET


def test_extend_forward_appends_relevant_citer():
    builder, _ = make_builder()
    chain = _anchored_chain(builder)
    builder.extend_forward(chain, 1)
    assert [n.stub.paper_id for n in chain.nodes] == ["A", "F1"]
    assert chain.nodes[-1].offset == 1
    assert chain.stop_reasons.forward is StopReason.BUDGET


def test_extend_forward_all_irrelevant_stops_no_followup():
    provider = chain_chat_provider()
    provider.add_first(
        lambda req: "evaluating whether a given paper is relevant" in req.user_text
        and "Follow Up Work" in req.user_text,
        "Think: no\nRelevant: 0",
    )
    builder, _ = make_builder(provider)
    chain = _anchored_chain(builder)
    builder.extend_forward(chain, 3)
    assert len(chain.nodes) == 1
    assert chain.stop_reasons.forward is StopReason.NO_FOLLOWUP


def test_extend_forward_zero_citers_stops_no_candidates():
    builder, _ = make_builder()
    stub = builder.scholar.get_paper("F1")  # nothing cites F1
    node = builder._digest_node(0, stub, TOPIC)
    chain = IdeaChain(topic=TOPIC, query="q", nodes=[node])
    builder.extend_forward(chain, 2)
    assert chain.stop_reasons.forward is StopReason.NO_CANDIDATES


def test_extend_backward_prepends_and_continues_below_milestone():
    builder, _ = make_builder()
    chain = _anchored_chain(builder)
    builder.extend_backward(chain, 1)
    assert [n.stub.paper_id for n in chain.nodes] == ["R1", "A"]
    assert chain.nodes[0].offset == -1
    # R1 has 500 citations, below the bar: the stop was the budget.
    assert chain.stop_reasons.backward is StopReason.BUDGET


def test_extend_backward_milestone_included_and_stops():
    builder, _ = make_builder()
    chain = _anchored_chain(builder)
    builder.extend_backward(chain, 4)
    assert [n.stub.paper_id for n in chain.nodes] == ["R3", "R2", "R1", "A"]
    assert chain.stop_reasons.backward is StopReason.MILESTONE
    assert chain.nodes[0].stub.citation_count == 1500
    assert chain.nodes[0].offset == min(n.offset for n in chain.nodes)


def test_extend_backward_empty_references_stops_no_candidates():
    builder, _ = make_builder()
    stub = builder.scholar.get_paper("R3")  # digest lists no references
    node = builder._digest_node(0, stub, TOPIC)
    chain = IdeaChain(topic=TOPIC, query="q", nodes=[node])
    builder.extend_backward(chain, 3)
    assert len(chain.nodes) == 1
    assert chain.stop_reasons.backward is StopReason.NO_CANDIDATES


def test_extend_backward_irrelevant_reference_stops():
    provider = chain_chat_provider()
    provider.add_first(
        lambda req: "evaluating whether a given paper is relevant" in req.user_text
        and "Reference One Foundations" in req.user_text,
        "Think: no\nRelevant: 0",
    )
    builder, _ = make_builder(provider)
    chain = _anchored_chain(builder)
    builder.extend_backward(chain, 3)
    assert len(chain.nodes) == 1
    assert chain.stop_reasons.backward is StopReason.IRRELEVANT


# ---------------------------------------------------------------------------
# trends


def test_summarize_trends_cardinality():
    builder, _ = make_builder()
    chain = _anchored_chain(builder)
    builder.extend_backward(chain, 4)
    builder.extend_forward(chain, 1)
    trends = builder.summarize_trends(chain)
    assert len(trends) == len(chain.nodes) - 1 == 4


def test_summarize_trends_single_node_empty():
    builder, _ = make_builder()
    chain = _anchored_chain(builder)
    assert builder.summarize_trends(chain) == []


def test_summarize_trends_wrong_count_retries_then_succeeds():
    provider = chain_chat_provider()
    answers = iter(
        [
            synthesize_response("trend_summary", {"Trends": ["only one"]}),
            synthesize_response("trend_summary", {"Trends": ["one", "two", "three", "four"]}),
        ]
    )
    provider.add_first(
        lambda req: "historical progression of research" in req.user_text,
        lambda req: next(answers),
    )
    builder, _ = make_builder(provider)
    chain = _anchored_chain(builder)
    builder.extend_backward(chain, 4)
    builder.extend_forward(chain, 1)
    assert len(builder.summarize_trends(chain)) == 4


# ---------------------------------------------------------------------------
# whole chains


def test_build_chains_defaults_three_chains():
    builder, _ = make_builder()
    chains, failures = builder.build_chains(TOPIC)
    assert len(chains) == 3
    assert failures == []
    for chain in chains:
        assert 1 <= len(chain.nodes) <= 5
        assert len(chain.trends) == len(chain.nodes) - 1
        offsets = [n.offset for n in chain.nodes]
        assert offsets == list(range(offsets[0], offsets[0] + len(offsets)))
        assert offsets.count(0) == 1


def test_case_study_shape_offsets_minus3_to_plus1():
    builder, _ = make_builder()
    chains, _ = builder.build_chains(TOPIC)
    offsets = [n.offset for n in chains[0].nodes]
    assert offsets == [-3, -2, -1, 0, 1]
    assert chains[0].stop_reasons.backward is StopReason.MILESTONE


def test_build_chain_single_node_when_no_citers_and_no_references():
    papers = [
        FixturePaper(
            paper_id="lone",
            title="Lonely Paper",
            abstract="a",
            fulltext="CONTENT-R3\n\nno refs here",
        )
    ]
    builder, _ = make_builder(papers=papers, query_results={"q-whole": ["lone"]})
    chain = builder.build_branch(TOPIC, "q-whole", 0)
    assert len(chain.nodes) == 1
    assert chain.trends == []


def test_failed_branch_recorded_not_fatal():
    papers, query_results = build_corpus()
    query_results = dict(query_results)
    query_results["q-aspect-2"] = []  # this branch finds no anchor
    builder, _ = make_builder(papers=papers, query_results=query_results)
    chains, failures = builder.build_chains(TOPIC)
    assert len(chains) == 2
    assert len(failures) == 1 and failures[0].query == "q-aspect-2"


def test_all_branches_failed_is_error():
    papers, _ = build_corpus()
    builder, _ = make_builder(
        papers=papers,
        query_results={"q-whole": [], "q-aspect-1": [], "q-aspect-2": []},
    )
    from ideachain.chain import AllBranchesFailedError

    with pytest.raises(AllBranchesFailedError):
        builder.build_chains(TOPIC)


def test_edge_semantics_on_fixture():
    builder, _ = make_builder()
    chains, _ = builder.build_chains(TOPIC)
    chain = chains[0]
    papers = {p.paper_id: p for p in build_corpus()[0]}
    for left, right in zip(chain.nodes, chain.nodes[1:]):
        if right.offset <= 0:
            # backward edge: left must be among right's digest references
            marker = f"CONTENT-{right.stub.paper_id}"
            titles = DIGEST_REFS[marker]
            assert papers[left.stub.paper_id].title in titles
        else:
            # forward edge: right must cite left
            assert right.stub.paper_id in papers[left.stub.paper_id].cited_by


def test_milestone_is_minimum_offset():
    builder, _ = make_builder()
    chains, _ = builder.build_chains(TOPIC)
    for chain in chains:
        milestones = [
            n.offset for n in chain.nodes if n.stub.citation_count > 1000 and n.offset < 0
        ]
        if milestones:
            assert min(n.offset for n in chain.nodes) == min(milestones)


def test_build_chains_bit_reproducible():
    def run() -> str:
        builder, _ = make_builder()
        chains, _ = builder.build_chains(TOPIC)
        config = PipelineConfig(parallel_branches=False)
        return json.dumps(
            [chain_to_document(c, config) for c in chains], sort_keys=True
        )

    assert run() == run()


def test_parallel_branches_match_sequential():
    doc_config = PipelineConfig()

    def run(parallel: bool) -> str:
        provider = chain_chat_provider()
        config = PipelineConfig(parallel_branches=parallel)
        gateway = make_gateway(provider, config)
        scholar, _ = make_scholar()
        builder = ChainBuilder(gateway, scholar, config)
        chains, _ = builder.build_chains(TOPIC)
        return json.dumps(
            [chain_to_document(c, doc_config) for c in chains], sort_keys=True
        )

    assert run(True) == run(False)


def test_chain_document_round_trip():
    builder, _ = make_builder()
    chains, _ = builder.build_chains(TOPIC)
    config = PipelineConfig(parallel_branches=False)
    document = chain_to_document(chains[0], config)
    restored = chain_from_document(json.loads(json.dumps(document)))
    assert chain_to_document(restored, config) == document

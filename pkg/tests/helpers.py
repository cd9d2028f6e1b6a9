"""Shared test machinery: canonical response synthesizers for every schema,
and a reusable literature fixture whose chain shape is known by hand."""

from __future__ import annotations

from ideachain.config import PipelineConfig
from ideachain.gateway.client import LlmGateway
from ideachain.gateway.provider import HashEmbeddingProvider, ScriptedChatProvider
from ideachain.scholar.client import ScholarClient
from ideachain.scholar.service import FixturePaper, FixtureTransport


def synthesize_response(schema_id: str, values: dict) -> str:
    """Render field values into the canonical well-formed response text."""
    if schema_id == "query_generation":
        quoted = ", ".join(f'"{q}"' for q in values["Queries"])
        return f"Queries: {quoted}"
    if schema_id == "relevance_check":
        return f"Think: {values.get('Think', 'considered')}\nRelevant: {values['Relevant']}"
    if schema_id == "paper_digest":
        refs = values["References"]
        refs_text = "[]" if not refs else "\n".join(f'"{t}"' for t in refs)
        return (
            f"Entities: {values['Entities']}\n"
            f"Idea: {values['Idea']}\n"
            f"Experiment: {values['Experiment']}\n"
            f"References: {refs_text}"
        )
    if schema_id == "trend_summary":
        lines = ["Trends:"]
        for i, entry in enumerate(values["Trends"]):
            lines.append(f"Paper {i} to Paper {i + 1}: {entry}")
        return "\n".join(lines)
    if schema_id == "future_trend":
        return f"Future direction: {values['Future direction']}"
    if schema_id == "idea_generation":
        return (
            f"Motivation: {values['Motivation']}\n"
            f"Novelty: {values['Novelty']}\n"
            f"Method: {values['Method']}\n"
            f"Final idea: {values['Final idea']}"
        )
    if schema_id == "novelty_check":
        lines = [
            f"Think: {values.get('Think', 'compared')}",
            f"Similar: {values['Similar']}",
            f"Summary of the idea: {values['Summary of the idea']}",
        ]
        if "Similar paper id" in values:
            lines.append(f"Similar paper id: {values['Similar paper id']}")
        return "\n".join(lines)
    if schema_id in ("experiment_generation", "experiment_refine", "extract_experiment"):
        steps = values["Experiment"]
        return "Experiment:\n" + "\n".join(steps)
    if schema_id == "experiment_review":
        return f"Suggestion: {values['Suggestion']}"
    if schema_id == "refine_query":
        query = values["Query"]
        return f'Query: {query}' if query else 'Query: ""'
    if schema_id == "extract_topic":
        return f"topic: {values['topic']}"
    if schema_id == "extract_idea":
        return f"Final idea: {values['Final idea']}"
    if schema_id == "compare_ideas":
        return (
            "Your thinking process: weighed both.\nYour choice:\n"
            f"Novelty: {values['Novelty']}\n"
            f"Significance: {values['Significance']}\n"
            f"Feasibility: {values['Feasibility']}\n"
            f"Clarity: {values['Clarity']}\n"
            f"Effectiveness: {values['Effectiveness']}"
        )
    if schema_id == "compare_experiments":
        return (
            "Your thinking process: weighed both.\nYour choice:\n"
            f"Feasibility: {values['Feasibility']}\n"
            f"Quality: {values['Quality']}\n"
            f"Clarity: {values['Clarity']}"
        )
    raise AssertionError(f"no synthesizer for {schema_id}")


def steps_response(n: int, prefix: str = "do thing") -> str:
    return "Experiment:\n" + "\n".join(f"Step{i}: {prefix} {i}" for i in range(1, n + 1))


# ---------------------------------------------------------------------------
# chain fixture: milestone at -3, one forward citer, so defaults give -3..+1


def build_corpus() -> tuple[list[FixturePaper], dict[str, list[str]]]:
    papers = [
        FixturePaper(
            paper_id="A",
            title="Anchor Work on Topic",
            abstract="Anchor abstract about the research topic.",
            year=2024,
            citation_count=40,
            fulltext="CONTENT-A\n\nFull text of the anchor paper.",
            cited_by=["F1"],
        ),
        FixturePaper(
            paper_id="R1",
            title="Reference One Foundations",
            abstract="First reference abstract.",
            year=2023,
            citation_count=500,
            fulltext="CONTENT-R1\n\nFull text of reference one.",
        ),
        FixturePaper(
            paper_id="R2",
            title="Reference Two Origins",
            abstract="Second reference abstract.",
            year=2022,
            citation_count=600,
            fulltext="CONTENT-R2\n\nFull text of reference two.",
        ),
        FixturePaper(
            paper_id="R3",
            title="Reference Three Milestone",
            abstract="Milestone reference abstract.",
            year=2020,
            citation_count=1500,
            fulltext="CONTENT-R3\n\nFull text of the milestone paper.",
        ),
        FixturePaper(
            paper_id="F1",
            title="Follow Up Work",
            abstract="Forward citer abstract.",
            year=2025,
            citation_count=5,
            fulltext="CONTENT-F1\n\nFull text of the follow-up paper.",
        ),
    ]
    query_results = {
        "q-whole": ["A"],
        "q-aspect-1": ["A"],
        "q-aspect-2": ["A"],
        "Reference One Foundations": ["R1"],
        "Reference Two Origins": ["R2"],
        "Reference Three Milestone": ["R3"],
    }
    return papers, query_results


DIGEST_REFS = {
    "CONTENT-A": ["Reference One Foundations"],
    "CONTENT-R1": ["Reference Two Origins"],
    "CONTENT-R2": ["Reference Three Milestone"],
    "CONTENT-R3": [],
    "CONTENT-F1": [],
}


def chain_chat_provider() -> ScriptedChatProvider:
    """Scripted responses for every step of chain construction."""
    provider = ScriptedChatProvider()
    provider.add(
        "master of literature searching",
        'Queries: "q-whole", "q-aspect-1", "q-aspect-2"',
    )
    provider.add(
        lambda req: "evaluating whether a given paper is relevant" in req.user_text,
        "Think: on topic\nRelevant: 1",
    )

    def digest_response(req) -> str:
        marker = next((m for m in DIGEST_REFS if m in req.user_text), None)
        assert marker is not None, "digest prompt without known content"
        refs = DIGEST_REFS[marker]
        return synthesize_response(
            "paper_digest",
            {
                "Entities": f"Entity-{marker}: something recurring",
                "Idea": f"Idea summary for {marker}",
                "Experiment": f"Experiment summary for {marker}",
                "References": refs,
            },
        )

    provider.add(
        lambda req: "extracting and summarizing information" in req.user_text,
        digest_response,
    )

    def trends_response(req) -> str:
        count = req.user_text.count("(title:")
        entries = [f"shift {i}" for i in range(max(count - 1, 1))]
        return synthesize_response("trend_summary", {"Trends": entries})

    provider.add(
        lambda req: "historical progression of research" in req.user_text,
        trends_response,
    )
    return provider


def make_gateway(
    provider: ScriptedChatProvider,
    config: PipelineConfig | None = None,
    dim: int = 8,
    overrides: dict | None = None,
) -> LlmGateway:
    return LlmGateway(
        chat=provider,
        embeddings=HashEmbeddingProvider(dim=dim, overrides=overrides),
        config=config or PipelineConfig(parallel_branches=False),
    )


def make_scholar(
    papers=None, query_results=None, cache_dir=None, **kwargs
) -> tuple[ScholarClient, FixtureTransport]:
    if papers is None:
        papers, query_results = build_corpus()
    transport = FixtureTransport(papers, query_results)
    client = ScholarClient(transport, cache_dir=cache_dir, **kwargs)
    return client, transport

"""Literature-chain construction.

A chain is an ordered lineage of digested papers around an anchor: offset 0
is the anchor, negative offsets are the references it grew from, positive
offsets the works that cite it. Construction runs backward first (toward the
foundational milestone), then spends the remaining length budget moving
forward through citing papers, and finishes by summarizing the idea
evolution between every adjacent pair.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

from .config import PipelineConfig
from .errors import IdeaChainError, ParseError, UpstreamServiceError, ValidationError
from .gateway.client import LlmGateway
from .gateway.parsing import ParsedFields
from .scholar.client import ScholarClient
from .scholar.models import PaperContent, PaperStub, SourceKind

logger = logging.getLogger(__name__)

MAX_REFERENCE_TITLES = 3

CHAIN_SCHEMA_VERSION = 1


class StopReason(str, Enum):
    BUDGET = "budget"
    MILESTONE = "milestone"
    IRRELEVANT = "irrelevant"
    NO_FOLLOWUP = "no_followup"
    NO_CANDIDATES = "no_candidates"


class AnchorNotFoundError(IdeaChainError):
    """No relevant paper within the probe depth for a branch query."""


class AllBranchesFailedError(IdeaChainError):
    """Every branch of a run failed to produce a chain."""


@dataclass(frozen=True)
class Entity:
    name: str
    description: str = ""


@dataclass
class PaperDigest:
    """What the digest model extracted from one paper."""

    entities: list[Entity]
    idea_summary: str
    experiment_summary: str
    reference_titles: list[str]

    def __post_init__(self) -> None:
        if len(self.reference_titles) > MAX_REFERENCE_TITLES:
            raise ValidationError(
                f"digest keeps at most {MAX_REFERENCE_TITLES} reference titles"
            )


@dataclass
class ChainNode:
    offset: int
    stub: PaperStub
    digest: PaperDigest
    content_kind: SourceKind = SourceKind.ABSTRACT_ONLY


@dataclass
class StopReasons:
    backward: StopReason = StopReason.BUDGET
    forward: StopReason = StopReason.BUDGET


@dataclass
class IdeaChain:
    """One constructed chain plus its trend analyses and entity pool."""

    topic: str
    query: str
    nodes: list[ChainNode]
    trends: list[str] = field(default_factory=list)
    stop_reasons: StopReasons = field(default_factory=StopReasons)
    branch_index: int = 0

    def __post_init__(self) -> None:
        offsets = [node.offset for node in self.nodes]
        if offsets != sorted(offsets):
            raise ValidationError("chain nodes must be ordered by offset")
        if offsets and offsets != list(range(offsets[0], offsets[0] + len(offsets))):
            raise ValidationError("chain offsets must be consecutive")
        if offsets.count(0) != 1:
            raise ValidationError("chain must contain exactly one anchor (offset 0)")

    @property
    def anchor(self) -> ChainNode:
        return next(node for node in self.nodes if node.offset == 0)

    @property
    def head(self) -> ChainNode:
        return self.nodes[-1]

    @property
    def tail(self) -> ChainNode:
        return self.nodes[0]

    def entity_pool(self) -> list[Entity]:
        """Entities across all digests, deduplicated by name, chain order."""
        seen: dict[str, Entity] = {}
        for node in self.nodes:
            for entity in node.digest.entities:
                seen.setdefault(entity.name, entity)
        return list(seen.values())

    def paper_ids(self) -> set[str]:
        return {node.stub.paper_id for node in self.nodes}


@dataclass
class FailedBranch:
    branch_index: int
    query: str
    error: str


# ---------------------------------------------------------------------------
# formatting helpers (prompt bindings)


def format_entities(entities: list[Entity]) -> str:
    if not entities:
        return "None"
    return "\n".join(
        f"{e.name}: {e.description}" if e.description else e.name for e in entities
    )


def format_idea_chain(chain: IdeaChain) -> str:
    """Node ideas numbered Paper 0..n-1 from the earliest paper onward."""
    lines = []
    for i, node in enumerate(chain.nodes):
        lines.append(f"Paper {i} (title: {node.stub.title}): {node.digest.idea_summary}")
    return "\n".join(lines)


def format_trends(trends: list[str]) -> str:
    if not trends:
        return "None"
    return "\n".join(
        f"Paper {i} to Paper {i + 1}: {text}" for i, text in enumerate(trends)
    )


def format_papers_block(stubs: list[PaperStub]) -> str:
    """Numbered title+abstract block for retrieved-literature slots."""
    lines = []
    for i, stub in enumerate(stubs):
        lines.append(f"Paper {i} (title: {stub.title}): {stub.abstract}")
    return "\n".join(lines)


def parse_entity_block(block: str) -> list[Entity]:
    entities = []
    for line in block.splitlines():
        item = line.strip().lstrip("-*+ ").strip()
        item = item.lstrip("0123456789.) ").strip()
        if not item:
            continue
        name, _, description = item.partition(":")
        entities.append(Entity(name=name.strip(), description=description.strip()))
    return entities


def cosine_similarity(a: tuple[float, ...], b: tuple[float, ...]) -> float:
    if len(a) != len(b):
        raise ValidationError("cosine similarity needs equal-length vectors")
    dot = sum(x * y for x, y in zip(a, b))
    norm_a = sum(x * x for x in a) ** 0.5
    norm_b = sum(y * y for y in b) ** 0.5
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    return max(-1.0, min(1.0, dot / (norm_a * norm_b)))


# ---------------------------------------------------------------------------
# construction


class ChainBuilder:
    def __init__(
        self, gateway: LlmGateway, scholar: ScholarClient, config: PipelineConfig
    ) -> None:
        self.gateway = gateway
        self.scholar = scholar
        self.config = config

    # -- single LLM steps ---------------------------------------------------

    def generate_queries(self, topic: str, k: int) -> list[str]:
        """K distinct search queries, the first covering the whole topic."""
        if not topic:
            raise ValidationError("topic must be non-empty")
        if k < 1:
            raise ValidationError("branch count must be >= 1")
        fields = self.gateway.run_template(
            "query_generation", {"Topic": topic}, request_tag="chain.queries"
        )
        queries: list[str] = []
        for query in fields["Queries"]:
            if query not in queries:
                queries.append(query)
        if len(queries) < k:
            raise ValidationError(
                f"model produced {len(queries)} distinct queries, need {k}; "
                "lower the branch count or retry"
            )
        return queries[:k]

    def check_relevance(self, stub: PaperStub, topic: str) -> bool:
        if not stub.title:
            raise ValidationError("relevance check needs a paper title")
        if not topic:
            raise ValidationError("topic must be non-empty")
        fields = self.gateway.run_template(
            "relevance_check",
            {"Title": stub.title, "Abstract": stub.abstract or "N/A", "Topic": topic},
            request_tag="chain.relevance",
        )
        return fields["Relevant"] == 1

    def select_anchor(self, query: str, topic: str) -> PaperStub:
        """Highest-ranked search hit that passes the relevance check."""
        if not query:
            raise ValidationError("query must be non-empty")
        probe_depth = self.config.relevance_probe_depth
        results = self.scholar.search_papers(query, limit=probe_depth)
        for stub in results:
            if self.check_relevance(stub, topic):
                return stub
        raise AnchorNotFoundError(
            f"no relevant paper within the top {probe_depth} results for {query!r}"
        )

    def rank_candidates(
        self, candidates: list[PaperStub], reference_text: str
    ) -> list[tuple[PaperStub, float]]:
        """Candidates by cosine similarity to the reference, descending.

        The sort is stable, so equal scores keep their input order.
        """
        if not candidates:
            raise ValidationError("rank_candidates needs at least one candidate")
        if not reference_text:
            raise ValidationError("reference_text must be non-empty")
        texts = [reference_text] + [stub.ranking_text() or stub.paper_id for stub in candidates]
        vectors = self.gateway.embed(texts)
        reference = vectors[0].values
        scored = [
            (stub, cosine_similarity(reference, vector.values))
            for stub, vector in zip(candidates, vectors[1:])
        ]
        return sorted(scored, key=lambda item: -item[1])

    def extract_digest(self, content: PaperContent, topic: str) -> PaperDigest:
        if not content.text:
            raise ValidationError("digest needs non-empty paper content")
        fields = self.gateway.run_template(
            "paper_digest",
            {"Topic": topic, "Paper content": content.text},
            request_tag="chain.digest",
            model_id=self.config.digest_model,
        )
        return PaperDigest(
            entities=parse_entity_block(fields["Entities"]),
            idea_summary=fields["Idea"],
            experiment_summary=fields["Experiment"],
            reference_titles=list(fields["References"])[:MAX_REFERENCE_TITLES],
        )

    def summarize_trends(self, chain: IdeaChain) -> list[str]:
        """One evolution summary per adjacent node pair; [] for one node."""
        if len(chain.nodes) < 2:
            return []
        expected = len(chain.nodes) - 1

        def check_count(fields: ParsedFields) -> None:
            if len(fields["Trends"]) != expected:
                raise ParseError(
                    f"expected {expected} trend entries, got {len(fields['Trends'])}",
                    code="bad_trends",
                )

        fields = self.gateway.run_template(
            "trend_summary",
            {
                "Entities": format_entities(chain.entity_pool()),
                "Topic": chain.topic,
                "Idea chain": format_idea_chain(chain),
            },
            request_tag="chain.trends",
            validator=check_count,
        )
        return list(fields["Trends"])

    # -- extension ----------------------------------------------------------

    def _digest_node(self, offset: int, stub: PaperStub, topic: str) -> ChainNode:
        content = self.scholar.fetch_content(stub.paper_id)
        digest = self.extract_digest(content, topic)
        return ChainNode(
            offset=offset, stub=stub, digest=digest, content_kind=content.source_kind
        )

    def extend_backward(self, chain: IdeaChain, remaining_budget: int) -> IdeaChain:
        """Prepend up to `remaining_budget` reference papers.

        Each step walks the current tail's relevance-sorted reference titles,
        resolves them against the search service, and keeps the first
        resolvable title that passes the relevance check. A milestone paper
        (citations above the configured bar) is kept and ends the walk: it is
        the chain's starting point.
        """
        if remaining_budget < 0:
            raise ValidationError("remaining_budget must be >= 0")
        if not chain.nodes:
            raise ValidationError("extend_backward needs a digested tail node")
        for _ in range(remaining_budget):
            tail = chain.tail
            titles = tail.digest.reference_titles
            if not titles:
                chain.stop_reasons.backward = StopReason.NO_CANDIDATES
                return chain
            resolved_any = False
            chosen: PaperStub | None = None
            for title in titles:
                stub = self.scholar.resolve_title(title)
                if stub is None or stub.paper_id in chain.paper_ids():
                    continue
                resolved_any = True
                if self.check_relevance(stub, chain.topic):
                    chosen = stub
                    break
            if chosen is None:
                chain.stop_reasons.backward = (
                    StopReason.IRRELEVANT if resolved_any else StopReason.NO_CANDIDATES
                )
                return chain
            node = self._digest_node(tail.offset - 1, chosen, chain.topic)
            chain.nodes.insert(0, node)
            if chosen.citation_count > self.config.milestone_citations:
                chain.stop_reasons.backward = StopReason.MILESTONE
                return chain
        chain.stop_reasons.backward = StopReason.BUDGET
        return chain

    def extend_forward(self, chain: IdeaChain, remaining_budget: int) -> IdeaChain:
        """Append up to `remaining_budget` citing papers.

        Each step fetches the head's citers, ranks them by similarity to the
        topic plus the reference abstract, and probes the top few through the
        relevance check; the first paper judged relevant joins the chain.
        """
        if remaining_budget < 0:
            raise ValidationError("remaining_budget must be >= 0")
        if not chain.nodes:
            raise ValidationError("extend_forward needs a head node")
        for _ in range(remaining_budget):
            head = chain.head
            citers = self.scholar.fetch_citations(head.stub.paper_id)
            citers = [c for c in citers if c.paper_id not in chain.paper_ids()]
            if not citers:
                chain.stop_reasons.forward = StopReason.NO_CANDIDATES
                return chain
            citers = citers[: self.config.forward_candidates]
            # The similarity reference tracks the current head unless the
            # fixed-anchor reading is configured.
            reference_node = chain.anchor if self.config.forward_anchor_fixed else head
            reference_text = f"{chain.topic}\n{reference_node.stub.abstract or reference_node.stub.title}"
            ranked = self.rank_candidates(citers, reference_text)
            chosen: PaperStub | None = None
            for stub, _score in ranked[: self.config.relevance_probe_depth]:
                if self.check_relevance(stub, chain.topic):
                    chosen = stub
                    break
            if chosen is None:
                chain.stop_reasons.forward = StopReason.NO_FOLLOWUP
                return chain
            node = self._digest_node(head.offset + 1, chosen, chain.topic)
            chain.nodes.append(node)
        chain.stop_reasons.forward = StopReason.BUDGET
        return chain

    # -- whole branches -----------------------------------------------------

    def build_branch(self, topic: str, query: str, branch_index: int) -> IdeaChain:
        anchor_stub = self.select_anchor(query, topic)
        anchor = self._digest_node(0, anchor_stub, topic)
        chain = IdeaChain(
            topic=topic, query=query, nodes=[anchor], branch_index=branch_index
        )
        backward_budget = self.config.max_length - 1
        self.extend_backward(chain, backward_budget)
        forward_budget = self.config.max_length - len(chain.nodes)
        self.extend_forward(chain, forward_budget)
        chain.trends = self.summarize_trends(chain)
        return chain

    def build_chains(
        self, topic: str, queries: list[str] | None = None
    ) -> tuple[list[IdeaChain], list[FailedBranch]]:
        """One chain per branch query; failed branches are recorded, and the
        run only aborts when every branch fails."""
        k = self.config.branches
        if queries is None:
            queries = self.generate_queries(topic, k)
        elif len(queries) != k:
            raise ValidationError(f"expected {k} queries, got {len(queries)}")

        def build(indexed: tuple[int, str]) -> IdeaChain | FailedBranch:
            index, query = indexed
            try:
                return self.build_branch(topic, query, index)
            except (IdeaChainError, UpstreamServiceError) as exc:
                logger.warning("branch %d (%r) failed: %s", index, query, exc)
                return FailedBranch(branch_index=index, query=query, error=str(exc))

        jobs = list(enumerate(queries))
        if self.config.parallel_branches and len(jobs) > 1:
            with ThreadPoolExecutor(max_workers=len(jobs)) as pool:
                results = list(pool.map(build, jobs))
        else:
            results = [build(job) for job in jobs]

        chains = [r for r in results if isinstance(r, IdeaChain)]
        failures = [r for r in results if isinstance(r, FailedBranch)]
        if not chains:
            raise AllBranchesFailedError(
                "; ".join(f"branch {f.branch_index}: {f.error}" for f in failures)
            )
        return chains, failures


# ---------------------------------------------------------------------------
# export format


def chain_to_document(chain: IdeaChain, config: PipelineConfig, seed: int = 0) -> dict:
    return {
        "schema_version": CHAIN_SCHEMA_VERSION,
        "kind": "chain",
        "topic": chain.topic,
        "query": chain.query,
        "branch_index": chain.branch_index,
        "nodes": [
            {
                "offset": node.offset,
                "stub": node.stub.to_dict(),
                "content_kind": node.content_kind.value,
                "digest": {
                    "entities": [
                        {"name": e.name, "description": e.description}
                        for e in node.digest.entities
                    ],
                    "idea_summary": node.digest.idea_summary,
                    "experiment_summary": node.digest.experiment_summary,
                    "reference_titles": list(node.digest.reference_titles),
                },
            }
            for node in chain.nodes
        ],
        "trends": list(chain.trends),
        "stop_reasons": {
            "backward": chain.stop_reasons.backward.value,
            "forward": chain.stop_reasons.forward.value,
        },
        "config": config.snapshot(),
        "seed": seed,
    }


def chain_from_document(document: dict) -> IdeaChain:
    nodes = []
    for raw in document["nodes"]:
        digest = PaperDigest(
            entities=[
                Entity(name=e["name"], description=e.get("description", ""))
                for e in raw["digest"]["entities"]
            ],
            idea_summary=raw["digest"]["idea_summary"],
            experiment_summary=raw["digest"]["experiment_summary"],
            reference_titles=list(raw["digest"]["reference_titles"]),
        )
        nodes.append(
            ChainNode(
                offset=raw["offset"],
                stub=PaperStub.from_dict(raw["stub"]),
                digest=digest,
                content_kind=SourceKind(raw.get("content_kind", "abstract_only")),
            )
        )
    return IdeaChain(
        topic=document["topic"],
        query=document["query"],
        nodes=nodes,
        trends=list(document.get("trends", [])),
        stop_reasons=StopReasons(
            backward=StopReason(document["stop_reasons"]["backward"]),
            forward=StopReason(document["stop_reasons"]["forward"]),
        ),
        branch_index=document.get("branch_index", 0),
    )

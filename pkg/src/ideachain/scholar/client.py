"""Academic-search client: search, citation lookup, title resolution, and
content fetch, all behind a persistent response cache."""

from __future__ import annotations

import logging
import re

from ..errors import ContentUnavailableError, ValidationError
from .cache import ResponseCache
from .models import PaperContent, PaperStub, SourceKind
from .service import SERVICE_MAX_PAGE, ScholarTransport

logger = logging.getLogger(__name__)

TITLE_MATCH_THRESHOLD = 0.90

_PUNCT = re.compile(r"[^a-z0-9\s]")
_WS = re.compile(r"\s+")


def normalize_title(title: str) -> str:
    """Lowercase, strip punctuation, collapse whitespace. Idempotent."""
    return _WS.sub(" ", _PUNCT.sub(" ", title.lower())).strip()


def levenshtein(a: str, b: str) -> int:
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(
                min(
                    previous[j] + 1,
                    current[j - 1] + 1,
                    previous[j - 1] + (ca != cb),
                )
            )
        previous = current
    return previous[-1]


def title_similarity(a: str, b: str) -> float:
    na, nb = normalize_title(a), normalize_title(b)
    if not na and not nb:
        return 1.0
    longest = max(len(na), len(nb))
    return 1.0 - levenshtein(na, nb) / longest


def truncate_at_paragraph(text: str, budget: int) -> str:
    """Keep the head of the document, cutting at a paragraph boundary."""
    if len(text) <= budget:
        return text
    head = text[:budget]
    cut = head.rfind("\n\n")
    if cut > budget // 2:
        head = head[:cut]
    return head.rstrip()


def _stub_from_raw(raw: dict) -> PaperStub:
    open_access = raw.get("openAccessPdf") or {}
    return PaperStub(
        paper_id=raw.get("paperId") or raw.get("paper_id") or "",
        title=raw.get("title") or "",
        abstract=raw.get("abstract") or "",
        year=raw.get("year"),
        citation_count=int(raw.get("citationCount") or raw.get("citation_count") or 0),
        open_access_url=open_access.get("url") if isinstance(open_access, dict) else None,
    )


class ScholarClient:
    def __init__(
        self,
        transport: ScholarTransport,
        *,
        cache_dir: str | None = None,
        content_char_budget: int = 60_000,
        refresh: bool = False,
    ) -> None:
        self._transport = transport
        self._cache = ResponseCache(cache_dir)
        self._content_char_budget = content_char_budget
        self._refresh = refresh
        self.network_calls = 0

    def _cached(self, endpoint: str, params: dict, fetch):
        if not self._refresh:
            hit = self._cache.get(endpoint, params)
            if hit is not None:
                return hit
        response = fetch()
        self.network_calls += 1
        self._cache.put(endpoint, params, response)
        return response

    def search_papers(self, query: str, limit: int) -> list[PaperStub]:
        """Top `limit` results in service relevance order."""
        if not query:
            raise ValidationError("search query must be non-empty")
        if limit < 1:
            raise ValidationError("search limit must be >= 1")
        if limit > SERVICE_MAX_PAGE:
            raise ValidationError(f"search limit must be <= {SERVICE_MAX_PAGE}")
        params = {"query": query, "limit": limit, "offset": 0}
        response = self._cached(
            "search", params, lambda: self._transport.search(query, limit, 0)
        )
        return [_stub_from_raw(raw) for raw in response.get("data", [])][:limit]

    def fetch_citations(self, paper_id: str) -> list[PaperStub]:
        """Every paper citing `paper_id`, walking all result pages."""
        if not paper_id:
            raise ValidationError("paper_id must be non-empty")
        stubs: list[PaperStub] = []
        offset = 0
        while True:
            params = {"paper_id": paper_id, "limit": SERVICE_MAX_PAGE, "offset": offset}
            response = self._cached(
                "citations",
                params,
                lambda off=offset: self._transport.citations(paper_id, SERVICE_MAX_PAGE, off),
            )
            for envelope in response.get("data", []):
                raw = envelope.get("citingPaper") or {}
                if raw.get("paperId"):
                    stubs.append(_stub_from_raw(raw))
            if "next" not in response:
                break
            offset = int(response["next"])
        return stubs

    def resolve_title(self, title: str) -> PaperStub | None:
        """Best match for a quoted title, or None below the similarity bar."""
        if not title:
            raise ValidationError("title must be non-empty")
        candidates = self.search_papers(title, limit=10)
        best: tuple[float, PaperStub] | None = None
        for stub in candidates:
            score = title_similarity(title, stub.title)
            if best is None or score > best[0]:
                best = (score, stub)
        if best is None or best[0] < TITLE_MATCH_THRESHOLD:
            return None
        return best[1]

    def get_paper(self, paper_id: str) -> PaperStub:
        if not paper_id:
            raise ValidationError("paper_id must be non-empty")
        params = {"paper_id": paper_id}
        response = self._cached("paper", params, lambda: self._transport.paper(paper_id))
        return _stub_from_raw(response)

    def fetch_content(self, paper_id: str) -> PaperContent:
        """Full text when an open-access source yields text, else abstract.

        Missing full text is never an error; missing everything is.
        """
        stub = self.get_paper(paper_id)
        text: str | None = None
        if stub.open_access_url:
            params = {"url": stub.open_access_url}
            text = self._cached(
                "text", params, lambda: self._transport.fetch_text(stub.open_access_url)
            )
        if text:
            body = truncate_at_paragraph(text, self._content_char_budget)
            return PaperContent(
                paper_id=paper_id,
                text=body,
                source_kind=SourceKind.FULLTEXT,
                char_count=len(body),
            )
        if stub.abstract:
            body = f"{stub.title}\n\n{stub.abstract}"
            return PaperContent(
                paper_id=paper_id,
                text=body,
                source_kind=SourceKind.ABSTRACT_ONLY,
                char_count=len(body),
            )
        raise ContentUnavailableError(
            f"paper {paper_id!r} has neither fetchable text nor an abstract"
        )

    @property
    def cache_hits(self) -> int:
        return self._cache.hits

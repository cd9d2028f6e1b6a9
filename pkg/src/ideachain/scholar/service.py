"""Transports that speak the academic-search wire shape.

`HttpScholarTransport` talks to a Semantic Scholar Graph-style HTTP API.
`FixtureTransport` serves a frozen in-memory corpus with the same response
shapes plus call counters, and is the replayable service used by tests.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Protocol

from ..errors import RateLimitExhaustedError, TransportError, UnknownPaperError

PAPER_FIELDS = "title,abstract,year,citationCount,isOpenAccess,openAccessPdf"
SERVICE_MAX_PAGE = 100


class ScholarTransport(Protocol):
    def search(self, query: str, limit: int, offset: int) -> dict: ...

    def citations(self, paper_id: str, limit: int, offset: int) -> dict: ...

    def paper(self, paper_id: str) -> dict: ...

    def fetch_text(self, url: str) -> str | None: ...


class HttpScholarTransport:
    def __init__(
        self,
        base_url: str,
        api_key: str = "",
        *,
        timeout: float = 30.0,
        retries: int = 3,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        import httpx

        headers = {"x-api-key": api_key} if api_key else {}
        self._client = httpx.Client(
            base_url=base_url.rstrip("/"), headers=headers, timeout=timeout
        )
        self._retries = retries
        self._sleep = sleep

    def _get(self, path: str, params: dict) -> dict:
        import httpx

        last: Exception | None = None
        for attempt in range(self._retries):
            try:
                response = self._client.get(path, params=params)
            except httpx.HTTPError as exc:
                last = exc
                self._sleep(min(2.0**attempt, 8.0))
                continue
            if response.status_code == 429:
                retry_after = float(response.headers.get("Retry-After", 2 ** (attempt + 1)))
                self._sleep(retry_after)
                last = RateLimitExhaustedError("search service kept throttling")
                continue
            if response.status_code == 404:
                raise UnknownPaperError(f"service does not know {path}")
            if response.status_code >= 400:
                last = TransportError(f"service returned {response.status_code} for {path}")
                self._sleep(min(2.0**attempt, 8.0))
                continue
            return response.json()
        if isinstance(last, RateLimitExhaustedError):
            raise last
        raise TransportError(f"request to {path} failed after {self._retries} attempts: {last}")

    def search(self, query: str, limit: int, offset: int) -> dict:
        return self._get(
            "/paper/search",
            {"query": query, "limit": limit, "offset": offset, "fields": PAPER_FIELDS},
        )

    def citations(self, paper_id: str, limit: int, offset: int) -> dict:
        return self._get(
            f"/paper/{paper_id}/citations",
            {"limit": limit, "offset": offset, "fields": PAPER_FIELDS},
        )

    def paper(self, paper_id: str) -> dict:
        return self._get(f"/paper/{paper_id}", {"fields": PAPER_FIELDS})

    def fetch_text(self, url: str) -> str | None:
        import httpx

        try:
            response = self._client.get(url, follow_redirects=True)
        except httpx.HTTPError:
            return None
        if response.status_code >= 400:
            return None
        content_type = response.headers.get("content-type", "")
        if "text/plain" not in content_type and "text/html" not in content_type:
            return None  # binary sources (PDF etc.) are out of scope
        text = response.text
        if "text/html" in content_type:
            import re

            text = re.sub(r"<[^>]+>", " ", text)
        return text.strip() or None


@dataclass
class FixturePaper:
    """One paper in a frozen corpus, with its local citation graph."""

    paper_id: str
    title: str
    abstract: str = ""
    year: int | None = None
    citation_count: int = 0
    fulltext: str | None = None
    cited_by: list[str] = field(default_factory=list)
    references: list[str] = field(default_factory=list)

    def raw(self) -> dict:
        url = f"fixture://{self.paper_id}" if self.fulltext is not None else None
        return {
            "paperId": self.paper_id,
            "title": self.title,
            "abstract": self.abstract,
            "year": self.year,
            "citationCount": self.citation_count,
            "isOpenAccess": self.fulltext is not None,
            "openAccessPdf": {"url": url} if url else None,
        }


class FixtureTransport:
    """Deterministic in-memory service with the production response shapes.

    `query_results` pins exact query strings to ranked id lists; anything
    else falls back to token-overlap matching so loosely-phrased fixture
    queries still resolve. Every endpoint call increments a counter.
    """

    def __init__(
        self,
        papers: list[FixturePaper],
        query_results: dict[str, list[str]] | None = None,
        *,
        page_size: int = SERVICE_MAX_PAGE,
    ) -> None:
        self.papers = {p.paper_id: p for p in papers}
        self.query_results = dict(query_results or {})
        self.page_size = page_size
        self.calls = {"search": 0, "citations": 0, "paper": 0, "text": 0}

    def _match(self, query: str) -> list[str]:
        if query in self.query_results:
            return list(self.query_results[query])
        tokens = {t for t in query.lower().split() if t}
        scored = []
        for paper in self.papers.values():
            haystack = f"{paper.title} {paper.abstract}".lower()
            score = sum(1 for t in tokens if t in haystack)
            if score > 0:
                scored.append((-score, paper.paper_id))
        scored.sort()
        return [pid for _, pid in scored]

    def search(self, query: str, limit: int, offset: int) -> dict:
        self.calls["search"] += 1
        ids = self._match(query)
        page = ids[offset : offset + min(limit, self.page_size)]
        return {
            "total": len(ids),
            "offset": offset,
            "data": [self.papers[pid].raw() for pid in page],
        }

    def citations(self, paper_id: str, limit: int, offset: int) -> dict:
        self.calls["citations"] += 1
        if paper_id not in self.papers:
            raise UnknownPaperError(f"fixture has no paper {paper_id!r}")
        citers = self.papers[paper_id].cited_by
        page = citers[offset : offset + min(limit, self.page_size)]
        payload = {
            "offset": offset,
            "data": [{"citingPaper": self.papers[pid].raw()} for pid in page],
        }
        if offset + len(page) < len(citers):
            payload["next"] = offset + len(page)
        return payload

    def paper(self, paper_id: str) -> dict:
        self.calls["paper"] += 1
        if paper_id not in self.papers:
            raise UnknownPaperError(f"fixture has no paper {paper_id!r}")
        return self.papers[paper_id].raw()

    def fetch_text(self, url: str) -> str | None:
        self.calls["text"] += 1
        if not url.startswith("fixture://"):
            return None
        paper = self.papers.get(url.removeprefix("fixture://"))
        return paper.fulltext if paper else None

    @property
    def total_calls(self) -> int:
        return sum(self.calls.values())

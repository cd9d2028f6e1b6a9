"""Literature records returned by the search service."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from ..errors import ValidationError


@dataclass(frozen=True)
class PaperStub:
    """Search-result metadata for one paper."""

    paper_id: str
    title: str
    abstract: str = ""
    year: int | None = None
    citation_count: int = 0
    open_access_url: str | None = None

    def __post_init__(self) -> None:
        if not self.paper_id:
            raise ValidationError("PaperStub.paper_id must be non-empty")
        if self.citation_count < 0:
            raise ValidationError("PaperStub.citation_count must be >= 0")

    def ranking_text(self) -> str:
        """Title plus abstract, the text embedded for similarity ranking."""
        return f"{self.title}\n{self.abstract}".strip()

    def to_dict(self) -> dict:
        return {
            "paper_id": self.paper_id,
            "title": self.title,
            "abstract": self.abstract,
            "year": self.year,
            "citation_count": self.citation_count,
            "open_access_url": self.open_access_url,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PaperStub":
        return cls(
            paper_id=data["paper_id"],
            title=data.get("title", ""),
            abstract=data.get("abstract") or "",
            year=data.get("year"),
            citation_count=int(data.get("citation_count") or 0),
            open_access_url=data.get("open_access_url"),
        )


class SourceKind(str, Enum):
    FULLTEXT = "fulltext"
    ABSTRACT_ONLY = "abstract_only"


@dataclass(frozen=True)
class PaperContent:
    """Resolved text of a paper, full text or abstract fallback."""

    paper_id: str
    text: str
    source_kind: SourceKind
    char_count: int

    def __post_init__(self) -> None:
        if not self.text:
            raise ValidationError("PaperContent.text must be non-empty")
        if self.char_count < 0:
            raise ValidationError("PaperContent.char_count must be >= 0")

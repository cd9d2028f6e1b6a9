"""Academic search client with a persistent local cache."""

from .cache import ResponseCache, cache_key
from .client import (
    TITLE_MATCH_THRESHOLD,
    ScholarClient,
    levenshtein,
    normalize_title,
    title_similarity,
    truncate_at_paragraph,
)
from .models import PaperContent, PaperStub, SourceKind
from .service import (
    SERVICE_MAX_PAGE,
    FixturePaper,
    FixtureTransport,
    HttpScholarTransport,
    ScholarTransport,
)

__all__ = [
    "ResponseCache",
    "cache_key",
    "TITLE_MATCH_THRESHOLD",
    "ScholarClient",
    "levenshtein",
    "normalize_title",
    "title_similarity",
    "truncate_at_paragraph",
    "PaperContent",
    "PaperStub",
    "SourceKind",
    "SERVICE_MAX_PAGE",
    "FixturePaper",
    "FixtureTransport",
    "HttpScholarTransport",
    "ScholarTransport",
]

"""Exception hierarchy shared across the pipeline.

Exit-code mapping for the CLI: 0 success, 1 validation, 2 upstream-service
failure, 3 parse failure that survived the retry policy.
"""

from __future__ import annotations

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_UPSTREAM = 2
EXIT_PARSE = 3


class IdeaChainError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(IdeaChainError):
    """A caller violated a precondition or supplied malformed input."""


class UpstreamServiceError(IdeaChainError):
    """A remote service failed after the configured retries."""


class TransportError(UpstreamServiceError):
    """Network-level failure talking to a provider or search service."""


class RateLimitExhaustedError(UpstreamServiceError):
    """Backoff ran out of attempts while the service kept throttling."""


class ProviderRefusalError(UpstreamServiceError):
    """The model provider declined to produce a completion."""


class TokenLimitError(UpstreamServiceError):
    """The request exceeded the provider's context or output limit."""


class ParseError(IdeaChainError):
    """A model response did not match its declared output schema."""

    def __init__(self, message: str, *, code: str = "malformed") -> None:
        super().__init__(message)
        self.code = code


class MissingBindingError(ValidationError):
    """A prompt template was rendered without one of its placeholders."""


class UnknownTemplateError(ValidationError):
    """No prompt template or parse schema registered under that id."""


class UnknownPaperError(UpstreamServiceError):
    """The search service does not know the requested paper id."""


class ContentUnavailableError(UpstreamServiceError):
    """Neither full text nor an abstract could be fetched for a paper."""


class StorageError(IdeaChainError):
    """Artifact persistence or retrieval failed."""


class ArtifactNotFoundError(StorageError):
    """A load was attempted against a reference that does not resolve."""


class SchemaVersionError(StorageError):
    """A stored document carries a schema version this build cannot read."""

    def __init__(self, kind: str, found: int, expected: int) -> None:
        super().__init__(
            f"{kind} document has schema_version {found}, expected {expected}"
        )
        self.kind = kind
        self.found = found
        self.expected = expected


def exit_code_for(error: Exception) -> int:
    """Map an exception to the CLI exit-code contract."""
    if isinstance(error, ParseError):
        return EXIT_PARSE
    if isinstance(error, UpstreamServiceError):
        return EXIT_UPSTREAM
    if isinstance(error, IdeaChainError):
        return EXIT_VALIDATION
    return EXIT_VALIDATION

"""Exception types shared across the engine."""

from __future__ import annotations


class CoperError(Exception):
    """Base class for all engine errors."""


class InputError(CoperError):
    """Invalid caller-supplied data (bad text, bad vector shape, bad domain)."""


class ConfigError(CoperError):
    """Missing or malformed configuration / data file."""


class ParseError(CoperError):
    """A structured file failed to parse; carries the offending line number."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        where = f"{path or '<input>'}:{line}" if line is not None else (path or "<input>")
        super().__init__(f"{where}: {message}")


class IngestError(CoperError):
    """Corpus ingestion rejected the input (duplicate ids, invalid records)."""


class BuildError(CoperError):
    """An engine build stage failed; names the stage and the document."""

    def __init__(self, stage: str, doc_id: str | None, cause: Exception):
        self.stage = stage
        self.doc_id = doc_id
        self.cause = cause
        at = f" (doc {doc_id!r})" if doc_id else ""
        super().__init__(f"build stage {stage!r} failed{at}: {cause}")


class ConsistencyError(CoperError):
    """Index artifacts disagree on the corpus snapshot they were built from."""


class UnknownDocumentError(CoperError):
    """A document id is not present in the index / corpus."""


class EmptyIndexError(CoperError):
    """An operation requires a non-empty index."""


class TaggingError(CoperError):
    """POS tagging failed; carries the offending token surface."""

    def __init__(self, surface: str, cause: Exception | str):
        self.surface = surface
        super().__init__(f"failed to tag token {surface!r}: {cause}")


class EmbeddingError(CoperError):
    """An embedding provider failed; carries the document id when known."""

    def __init__(self, message: str, doc_id: str | None = None):
        self.doc_id = doc_id
        at = f" (doc {doc_id!r})" if doc_id else ""
        super().__init__(f"{message}{at}")

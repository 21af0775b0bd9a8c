"""Document ingestion and the normalized corpus store.

Documents arrive as JSON lines with id, title, and body (url and
published_at optional). Text is normalized once at ingestion; everything
downstream sees only the normalized form. The store's snapshot hash is
a SHA-256 over the normalized documents in id order, so any content
change, addition, or removal changes the hash, while ingestion order
does not.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Iterable

from .errors import IngestError, InputError, ParseError
from .textproc import RawDocument, TextPipeline


def _doc_payload(doc: RawDocument) -> dict:
    return {
        "id": doc.id,
        "title": doc.title,
        "body": doc.body,
        "url": doc.url,
        "published_at": doc.published_at,
    }


def snapshot_hash(docs: Iterable[RawDocument]) -> str:
    """SHA-256 over the documents serialized in id order."""
    hasher = hashlib.sha256()
    for doc in sorted(docs, key=lambda d: d.id):
        line = json.dumps(
            _doc_payload(doc), ensure_ascii=False, sort_keys=True, separators=(",", ":")
        )
        hasher.update(line.encode("utf-8"))
        hasher.update(b"\n")
    return hasher.hexdigest()


@dataclass
class CorpusStore:
    """Normalized documents in ingestion order, addressable by id."""

    docs: list[RawDocument] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.by_id: dict[str, RawDocument] = {}
        duplicates: list[str] = []
        for doc in self.docs:
            if doc.id in self.by_id:
                duplicates.append(doc.id)
            self.by_id[doc.id] = doc
        if duplicates:
            raise IngestError(
                "duplicate document ids: " + ", ".join(sorted(set(duplicates)))
            )

    def __len__(self) -> int:
        return len(self.docs)

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self.by_id

    def get(self, doc_id: str) -> RawDocument | None:
        return self.by_id.get(doc_id)

    @property
    def hash(self) -> str:
        return snapshot_hash(self.docs)


def _parse_record(record: object, lineno: int, path: str) -> dict:
    if not isinstance(record, dict):
        raise ParseError("document must be a JSON object", path=path, line=lineno)
    for key in ("id", "title", "body"):
        value = record.get(key)
        if not isinstance(value, str):
            raise ParseError(
                f"field {key!r} must be a string", path=path, line=lineno
            )
    if record["id"] == "":
        raise ParseError("field 'id' must be non-empty", path=path, line=lineno)
    url = record.get("url")
    if url is not None and not isinstance(url, str):
        raise ParseError("field 'url' must be a string", path=path, line=lineno)
    published_at = record.get("published_at")
    if published_at is not None:
        if not isinstance(published_at, str):
            raise ParseError(
                "field 'published_at' must be a string", path=path, line=lineno
            )
        try:
            date.fromisoformat(published_at)
        except ValueError:
            raise ParseError(
                f"field 'published_at' is not an ISO date: {published_at!r}",
                path=path,
                line=lineno,
            )
    return record


def ingest(path: str | Path, pipeline: TextPipeline) -> CorpusStore:
    """Read a JSONL file into a normalized store.

    Malformed lines fail with their line number; duplicate ids are
    collected across the whole file and reported together.
    """
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise InputError(f"cannot read corpus {path}: {exc}") from exc

    docs: list[RawDocument] = []
    seen: dict[str, int] = {}
    duplicates: set[str] = set()
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", path=str(path), line=lineno)
        record = _parse_record(record, lineno, str(path))
        doc_id = record["id"]
        if doc_id in seen:
            duplicates.add(doc_id)
        seen[doc_id] = lineno
        docs.append(
            RawDocument(
                id=doc_id,
                title=pipeline.normalize(record["title"]),
                body=pipeline.normalize(record["body"]),
                url=record.get("url"),
                published_at=record.get("published_at"),
            )
        )
    if duplicates:
        raise IngestError("duplicate document ids: " + ", ".join(sorted(duplicates)))
    return CorpusStore(docs=docs)


def save_store(store: CorpusStore, path: str | Path) -> None:
    """Write the normalized corpus as JSONL, sorted by id, one document
    per line; equal stores produce equal bytes."""
    lines = [
        json.dumps(
            _doc_payload(doc), ensure_ascii=False, sort_keys=True, separators=(",", ":")
        )
        for doc in sorted(store.docs, key=lambda d: d.id)
    ]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def load_store(path: str | Path) -> CorpusStore:
    """Read a store written by save_store (already normalized)."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise InputError(f"cannot read store {path}: {exc}") from exc
    docs = []
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", path=str(path), line=lineno)
        record = _parse_record(record, lineno, str(path))
        docs.append(
            RawDocument(
                id=record["id"],
                title=record["title"],
                body=record["body"],
                url=record.get("url"),
                published_at=record.get("published_at"),
            )
        )
    return CorpusStore(docs=docs)

"""Inverted index, BM25 scoring, and sparse TF-IDF vectors.

IDF is the plain ln(N/df) ratio, so a term present in every document
contributes exactly zero and a term absent from the corpus has no IDF at
all (callers receive None and skip it). Scores therefore never go
negative. A single-document corpus gives every term df == N and thus
IDF 0; ranking degenerates to ties broken by doc id.
"""

from __future__ import annotations

import math
import struct
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import (
    ConfigError,
    EmptyIndexError,
    IngestError,
    InputError,
    UnknownDocumentError,
)
from .textproc import Token

Terms = Sequence[str]


@dataclass(frozen=True)
class Bm25Params:
    k1: float = 1.5
    b: float = 0.75
    pool: int = 800

    def __post_init__(self) -> None:
        if self.k1 <= 0:
            raise InputError(f"k1 must be > 0, got {self.k1}")
        if not 0.0 <= self.b <= 1.0:
            raise InputError(f"b must be within [0, 1], got {self.b}")
        if self.pool < 1:
            raise InputError(f"pool must be >= 1, got {self.pool}")


@dataclass
class InvertedIndex:
    """Postings plus the per-document lengths BM25 needs.

    postings[term] is sorted by doc id; doc_len counts all indexed term
    occurrences of a document.
    """

    postings: dict[str, tuple[tuple[str, int], ...]]
    doc_len: dict[str, int]
    n_docs: int
    avgdl: float
    _tf: dict[str, dict[str, int]] = field(repr=False, default_factory=dict)

    def __post_init__(self) -> None:
        if not self._tf:
            self._tf = {t: dict(ps) for t, ps in self.postings.items()}

    def df(self, term: str) -> int:
        return len(self.postings.get(term, ()))

    def tf(self, term: str, doc_id: str) -> int:
        return self._tf.get(term, {}).get(doc_id, 0)


def _surfaces(terms: Sequence[Token | str]) -> list[str]:
    return [t.surface if isinstance(t, Token) else t for t in terms]


def build_index(docs: Iterable[tuple[str, Terms]]) -> InvertedIndex:
    """Build the index from (doc_id, terms) pairs.

    Terms are expected preprocessed (normalized, stopwords dropped).
    Duplicate ids are refused; an empty input yields an empty index.
    """
    doc_terms: dict[str, Terms] = {}
    for doc_id, terms in docs:
        if doc_id in doc_terms:
            raise IngestError(f"duplicate document id: {doc_id!r}")
        doc_terms[doc_id] = terms

    postings_acc: dict[str, dict[str, int]] = {}
    doc_len: dict[str, int] = {}
    for doc_id in sorted(doc_terms):
        terms = doc_terms[doc_id]
        doc_len[doc_id] = len(terms)
        for term, freq in Counter(terms).items():
            postings_acc.setdefault(term, {})[doc_id] = freq

    postings = {
        term: tuple(sorted(by_doc.items()))
        for term, by_doc in sorted(postings_acc.items())
    }
    n_docs = len(doc_len)
    avgdl = sum(doc_len.values()) / n_docs if n_docs else 0.0
    return InvertedIndex(postings=postings, doc_len=doc_len, n_docs=n_docs, avgdl=avgdl)


def tf_weight(freq: int) -> float:
    """Sub-linear term-frequency weight ln(1 + freq)."""
    if freq < 0:
        raise InputError(f"term frequency must be >= 0, got {freq}")
    return math.log1p(freq)


def idf(term: str, index: InvertedIndex) -> float | None:
    """ln(N / df), or None when the term is absent from the corpus."""
    if index.n_docs == 0:
        raise EmptyIndexError("idf undefined on an empty index")
    df = index.df(term)
    if df == 0:
        return None
    return math.log(index.n_docs / df)


def bm25_score(
    query: Sequence[Token | str],
    doc_id: str,
    index: InvertedIndex,
    params: Bm25Params = Bm25Params(),
) -> float:
    """BM25 of one document for the query, summed over query occurrences."""
    if doc_id not in index.doc_len:
        raise UnknownDocumentError(f"unknown document id: {doc_id!r}")
    dl = index.doc_len[doc_id]
    score = 0.0
    for term in _surfaces(query):
        term_idf = idf(term, index)
        if term_idf is None:
            continue
        f = index.tf(term, doc_id)
        if f == 0:
            continue
        denom = f + params.k1 * (1.0 - params.b + params.b * dl / index.avgdl)
        score += term_idf * f * (params.k1 + 1.0) / denom
    return score


def bm25_topk(
    query: Sequence[Token | str],
    index: InvertedIndex,
    params: Bm25Params = Bm25Params(),
) -> list[tuple[str, float]]:
    """Top candidates by BM25: every document sharing at least one query
    term, scored, sorted by (-score, doc_id), truncated to params.pool."""
    if index.n_docs == 0:
        raise EmptyIndexError("cannot search an empty index")
    counts = Counter(_surfaces(query))
    scores: dict[str, float] = {}
    for term, q_count in counts.items():
        postings = index.postings.get(term)
        if postings is None:
            continue
        term_idf = idf(term, index)
        for doc_id, f in postings:
            dl = index.doc_len[doc_id]
            denom = f + params.k1 * (1.0 - params.b + params.b * dl / index.avgdl)
            contribution = term_idf * f * (params.k1 + 1.0) / denom
            scores[doc_id] = scores.get(doc_id, 0.0) + q_count * contribution
    ranked = sorted(scores.items(), key=lambda item: (-item[1], item[0]))
    return ranked[: params.pool]


def tfidf_vector(
    text: Sequence[Token | str], index: InvertedIndex
) -> dict[str, float]:
    """Sparse ln(1+tf) * ln(N/df) vector; zero-weight terms are omitted."""
    vec: dict[str, float] = {}
    for term, freq in Counter(_surfaces(text)).items():
        term_idf = idf(term, index)
        if term_idf is None:
            continue
        weight = tf_weight(freq) * term_idf
        if weight != 0.0:
            vec[term] = weight
    return vec


def sparse_cosine(a: Mapping[str, float], b: Mapping[str, float]) -> float:
    """Cosine of two sparse vectors; 0.0 when either has zero norm."""
    if len(a) > len(b):
        a, b = b, a
    dot = sum(w * b[t] for t, w in a.items() if t in b)
    norm_a = math.sqrt(sum(w * w for w in a.values()))
    norm_b = math.sqrt(sum(w * w for w in b.values()))
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    return dot / (norm_a * norm_b)


_MAGIC = b"CPIX"
_VERSION = 1


def _pack_str(s: str) -> bytes:
    raw = s.encode("utf-8")
    return struct.pack("<I", len(raw)) + raw


class _Reader:
    def __init__(self, blob: bytes):
        self.blob = blob
        self.pos = 0

    def take(self, fmt: str):
        size = struct.calcsize(fmt)
        if self.pos + size > len(self.blob):
            raise ConfigError("truncated index file")
        values = struct.unpack_from(fmt, self.blob, self.pos)
        self.pos += size
        return values

    def take_str(self) -> str:
        (length,) = self.take("<I")
        if self.pos + length > len(self.blob):
            raise ConfigError("truncated index file")
        raw = self.blob[self.pos : self.pos + length]
        self.pos += length
        return raw.decode("utf-8")


def save_index(index: InvertedIndex, path: str | Path, snapshot_hash: str) -> None:
    """Serialize the index with the corpus snapshot hash it was built from.

    The layout is fixed little-endian: magic, format version, snapshot
    hash, document table (sorted by id), then postings (terms sorted,
    docs referenced by table position). Equal inputs produce equal bytes.
    """
    doc_ids = sorted(index.doc_len)
    doc_pos = {doc_id: i for i, doc_id in enumerate(doc_ids)}
    parts = [
        _MAGIC,
        struct.pack("<I", _VERSION),
        _pack_str(snapshot_hash),
        struct.pack("<Id", index.n_docs, index.avgdl),
        struct.pack("<I", len(doc_ids)),
    ]
    for doc_id in doc_ids:
        parts.append(_pack_str(doc_id))
        parts.append(struct.pack("<I", index.doc_len[doc_id]))
    terms = sorted(index.postings)
    parts.append(struct.pack("<I", len(terms)))
    for term in terms:
        postings = index.postings[term]
        parts.append(_pack_str(term))
        parts.append(struct.pack("<I", len(postings)))
        for doc_id, freq in postings:
            parts.append(struct.pack("<II", doc_pos[doc_id], freq))
    Path(path).write_bytes(b"".join(parts))


def load_index(path: str | Path) -> tuple[InvertedIndex, str]:
    """Load an index file; returns (index, snapshot_hash)."""
    blob = Path(path).read_bytes()
    if blob[:4] != _MAGIC:
        raise ConfigError(f"not an index file: {path}")
    reader = _Reader(blob)
    reader.pos = 4
    (version,) = reader.take("<I")
    if version != _VERSION:
        raise ConfigError(f"unsupported index format version {version}")
    snapshot_hash = reader.take_str()
    n_docs, avgdl = reader.take("<Id")
    (table_size,) = reader.take("<I")
    doc_ids: list[str] = []
    doc_len: dict[str, int] = {}
    for _ in range(table_size):
        doc_id = reader.take_str()
        (length,) = reader.take("<I")
        doc_ids.append(doc_id)
        doc_len[doc_id] = length
    (n_terms,) = reader.take("<I")
    postings: dict[str, tuple[tuple[str, int], ...]] = {}
    for _ in range(n_terms):
        term = reader.take_str()
        (n_postings,) = reader.take("<I")
        entries = []
        for _ in range(n_postings):
            pos, freq = reader.take("<II")
            if pos >= len(doc_ids):
                raise ConfigError("corrupt index file: bad document reference")
            entries.append((doc_ids[pos], freq))
        postings[term] = tuple(entries)
    index = InvertedIndex(
        postings=postings, doc_len=doc_len, n_docs=n_docs, avgdl=avgdl
    )
    return index, snapshot_hash

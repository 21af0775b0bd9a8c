"""Dense document representations and exact nearest-neighbor search.

A document's semantic vector concatenates its unit-normalized title
embedding, scaled by the title weight, with the unit-normalized mean
direction of its noun-phrase embeddings:

    v = [w * T_hat ; N_hat]

With the default weight 1.1 every such vector (when both halves are
non-zero) has norm sqrt(1.1^2 + 1) = sqrt(2.21). A query embeds once and
occupies both halves, [q_hat ; q_hat], so one cosine compares it against
title and noun-phrase senses simultaneously.
"""

from __future__ import annotations

import hashlib
import json
import math
import struct
import subprocess
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np

from .errors import ConfigError, EmbeddingError, IngestError, InputError

_SEGMENT_SEP = "\x1f"
_TEXT_START = "\x02"
_TEXT_END = "\x03"


class EmbeddingProvider(Protocol):
    """Maps a list of text segments to one fixed-width vector.

    Implementations must be deterministic and safe to call from several
    threads (or serialize internally).
    """

    @property
    def dim(self) -> int: ...

    def embed(self, segments: Sequence[str]) -> np.ndarray: ...


class HashEmbedder:
    """Deterministic feature-hashing embedder over character n-grams.

    Character 2- to 4-grams of the joined segments are hashed with
    keyed blake2b into signed buckets; the bucket vector is then L2
    normalized. Start and end sentinels guarantee even a single-character
    text produces at least one n-gram. No corpus statistics are involved,
    so equal (segments, dim, seed) always embed identically.
    """

    def __init__(self, dim: int = 256, seed: int = 0):
        if dim < 1:
            raise InputError(f"dim must be >= 1, got {dim}")
        self._dim = dim
        self._key = struct.pack("<q", seed)

    @property
    def dim(self) -> int:
        return self._dim

    def embed(self, segments: Sequence[str]) -> np.ndarray:
        text = _SEGMENT_SEP.join(segments)
        if not text:
            return np.zeros(self._dim, dtype=np.float64)
        wrapped = _TEXT_START + text + _TEXT_END
        vec = np.zeros(self._dim, dtype=np.float64)
        for n in (2, 3, 4):
            for i in range(len(wrapped) - n + 1):
                gram = wrapped[i : i + n].encode("utf-8")
                digest = hashlib.blake2b(gram, key=self._key, digest_size=8).digest()
                h = int.from_bytes(digest, "little")
                sign = 1.0 if h & 1 else -1.0
                vec[(h >> 1) % self._dim] += sign
        norm = float(np.linalg.norm(vec))
        if norm > 0.0:
            vec /= norm
        return vec


class SubprocessEmbedder:
    """Bridge to an external embedding process over line-delimited JSON.

    Each request is one line {"segments": [...]}; the reply is one line
    {"vector": [...]} of exactly `dim` floats. The child is spawned
    lazily and calls are serialized with a lock.
    """

    def __init__(self, command: Sequence[str], dim: int):
        if dim < 1:
            raise InputError(f"dim must be >= 1, got {dim}")
        self._command = list(command)
        self._dim = dim
        self._proc: subprocess.Popen | None = None
        self._lock = threading.Lock()

    @property
    def dim(self) -> int:
        return self._dim

    def _ensure_proc(self) -> subprocess.Popen:
        if self._proc is None or self._proc.poll() is not None:
            try:
                self._proc = subprocess.Popen(
                    self._command,
                    stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE,
                    text=True,
                )
            except OSError as exc:
                raise EmbeddingError(f"cannot start embedder {self._command}: {exc}")
        return self._proc

    def embed(self, segments: Sequence[str]) -> np.ndarray:
        with self._lock:
            proc = self._ensure_proc()
            try:
                assert proc.stdin is not None and proc.stdout is not None
                proc.stdin.write(json.dumps({"segments": list(segments)}) + "\n")
                proc.stdin.flush()
                line = proc.stdout.readline()
            except (OSError, ValueError) as exc:
                raise EmbeddingError(f"embedder transport failure: {exc}")
        if not line:
            raise EmbeddingError("embedder closed its output stream")
        try:
            payload = json.loads(line)
            vector = payload["vector"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise EmbeddingError(f"malformed embedder reply: {exc}")
        vec = np.asarray(vector, dtype=np.float64)
        if vec.shape != (self._dim,):
            raise EmbeddingError(
                f"embedder returned shape {vec.shape}, expected ({self._dim},)"
            )
        return vec

    def close(self) -> None:
        with self._lock:
            if self._proc is not None and self._proc.poll() is None:
                if self._proc.stdin is not None:
                    self._proc.stdin.close()
                self._proc.terminate()
                self._proc.wait(timeout=5)
            self._proc = None


def _checked(vec: np.ndarray, dim: int, what: str) -> np.ndarray:
    arr = np.asarray(vec, dtype=np.float64)
    if arr.shape != (dim,):
        raise EmbeddingError(f"{what}: provider returned shape {arr.shape}, expected ({dim},)")
    if not np.all(np.isfinite(arr)):
        raise EmbeddingError(f"{what}: provider returned non-finite values")
    return arr


def _unit(vec: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        return np.zeros_like(vec)
    return vec / norm


def embed_title(title: str, provider: EmbeddingProvider) -> np.ndarray:
    """Unit-normalized title embedding; empty title embeds to zero."""
    if title == "":
        return np.zeros(provider.dim, dtype=np.float64)
    return _unit(_checked(provider.embed([title]), provider.dim, "title"))


def embed_noun_phrases(
    phrases: Sequence[str], provider: EmbeddingProvider
) -> np.ndarray:
    """Unit-normalized embedding of the document's noun phrases as one
    segment list; no phrases embed to zero."""
    if not phrases:
        return np.zeros(provider.dim, dtype=np.float64)
    return _unit(_checked(provider.embed(list(phrases)), provider.dim, "noun phrases"))


def build_doc_vector(
    title_vec: np.ndarray, np_vec: np.ndarray, title_weight: float = 1.1
) -> np.ndarray:
    """Concatenate [title_weight * title_vec ; np_vec]."""
    t = np.asarray(title_vec, dtype=np.float64)
    p = np.asarray(np_vec, dtype=np.float64)
    if t.shape != p.shape or t.ndim != 1:
        raise InputError(f"vector halves disagree: {t.shape} vs {p.shape}")
    return np.concatenate([title_weight * t, p])


def query_vector(query: str, provider: EmbeddingProvider) -> np.ndarray:
    """[q_hat ; q_hat]: the query's unit embedding repeated in both halves."""
    if query == "":
        return np.zeros(2 * provider.dim, dtype=np.float64)
    q = _unit(_checked(provider.embed([query]), provider.dim, "query"))
    return np.concatenate([q, q])


@dataclass(frozen=True)
class DocSemanticVector:
    doc_id: str
    vec: np.ndarray


def dense_cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine of two dense vectors; 0.0 when either has zero norm."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise InputError(f"shape mismatch: {a.shape} vs {b.shape}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


class VectorIndex:
    """Exact brute-force cosine search over document vectors."""

    def __init__(self, vectors: Sequence[DocSemanticVector]):
        seen: set[str] = set()
        for v in vectors:
            if v.doc_id in seen:
                raise IngestError(f"duplicate document id: {v.doc_id!r}")
            seen.add(v.doc_id)
        dims = {v.vec.shape for v in vectors}
        if len(dims) > 1:
            raise InputError(f"inconsistent vector shapes: {sorted(dims)}")
        self.ids = [v.doc_id for v in vectors]
        self._row = {doc_id: i for i, doc_id in enumerate(self.ids)}
        if vectors:
            self.matrix = np.stack([np.asarray(v.vec, dtype=np.float64) for v in vectors])
            self.dim = int(self.matrix.shape[1])
        else:
            self.matrix = np.zeros((0, 0), dtype=np.float64)
            self.dim = 0

    def __len__(self) -> int:
        return len(self.ids)

    def vector(self, doc_id: str) -> np.ndarray:
        row = self._row.get(doc_id)
        if row is None:
            raise InputError(f"unknown document id: {doc_id!r}")
        return self.matrix[row]

    def cosine(self, query_vec: np.ndarray, doc_id: str) -> float:
        return dense_cosine(query_vec, self.vector(doc_id))

    def search(self, query_vec: np.ndarray, k: int) -> list[tuple[str, float]]:
        """Top-k by cosine, ties broken by doc id ascending; k beyond the
        index size returns everything."""
        if k < 1:
            raise InputError(f"k must be >= 1, got {k}")
        if not self.ids:
            return []
        q = np.asarray(query_vec, dtype=np.float64)
        if q.shape != (self.dim,):
            raise InputError(f"query shape {q.shape}, index dim ({self.dim},)")
        qn = float(np.linalg.norm(q))
        row_norms = np.linalg.norm(self.matrix, axis=1)
        if qn == 0.0:
            sims = np.zeros(len(self.ids))
        else:
            dots = self.matrix @ q
            with np.errstate(divide="ignore", invalid="ignore"):
                sims = np.where(row_norms > 0.0, dots / (row_norms * qn), 0.0)
        ranked = sorted(
            zip(self.ids, (float(s) for s in sims)),
            key=lambda item: (-item[1], item[0]),
        )
        return ranked[:k]


_MAGIC = b"CPVX"
_VERSION = 1


def save_vectors(vectors: Sequence[DocSemanticVector], path: str | Path) -> None:
    """Write vectors as: magic, version, dim, count, then per document the
    id length, UTF-8 id bytes, and the full vector as little-endian f32.

    Documents are written sorted by id so equal inputs give equal bytes.
    """
    ordered = sorted(vectors, key=lambda v: v.doc_id)
    dim = int(ordered[0].vec.shape[0]) if ordered else 0
    parts = [_MAGIC, struct.pack("<III", _VERSION, dim, len(ordered))]
    for v in ordered:
        arr = np.asarray(v.vec, dtype=np.float64)
        if arr.shape != (dim,):
            raise InputError(
                f"vector for {v.doc_id!r} has shape {arr.shape}, expected ({dim},)"
            )
        raw_id = v.doc_id.encode("utf-8")
        parts.append(struct.pack("<I", len(raw_id)))
        parts.append(raw_id)
        parts.append(arr.astype("<f4").tobytes())
    Path(path).write_bytes(b"".join(parts))


def load_vectors(path: str | Path) -> list[DocSemanticVector]:
    """Read a vector file written by save_vectors."""
    blob = Path(path).read_bytes()
    if blob[:4] != _MAGIC:
        raise ConfigError(f"not a vector file: {path}")
    offset = 4
    try:
        version, dim, count = struct.unpack_from("<III", blob, offset)
        offset += 12
        out: list[DocSemanticVector] = []
        if version != _VERSION:
            raise ConfigError(f"unsupported vector format version {version}")
        for _ in range(count):
            (id_len,) = struct.unpack_from("<I", blob, offset)
            offset += 4
            doc_id = blob[offset : offset + id_len].decode("utf-8")
            offset += id_len
            arr = np.frombuffer(blob, dtype="<f4", count=dim, offset=offset)
            if arr.shape != (dim,):
                raise ConfigError("truncated vector file")
            offset += 4 * dim
            out.append(
                DocSemanticVector(doc_id=doc_id, vec=arr.astype(np.float64))
            )
    except (struct.error, ValueError) as exc:
        raise ConfigError(f"truncated vector file: {exc}")
    return out


def expected_doc_norm(title_weight: float = 1.1) -> float:
    """Norm of a full document vector with non-zero halves:
    sqrt(title_weight^2 + 1)."""
    return math.sqrt(title_weight * title_weight + 1.0)

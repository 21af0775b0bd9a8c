"""Query-adaptive fusion of lexical and semantic rankings.

A query's wordiness omega estimates how much of it is fluent sentence
material rather than bare keywords. POS-shape patterns are matched over
the query's tag sequence; the more tokens they cover, the lower omega:

    omega = clamp(1 - coverage, omega_min, omega_max)

The fused score of a candidate is then

    jss = omega * tfidf_sim + (1 - omega) * sem_sim

so keyword-like queries lean on exact term overlap and sentence-like
queries lean on the semantic representation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Protocol, Sequence

from .errors import ConfigError, InputError
from .lexical import Bm25Params, InvertedIndex, bm25_topk, sparse_cosine, tfidf_vector
from .semantic import EmbeddingProvider, VectorIndex, query_vector
from .textproc import PosTag, TextPipeline, Token

TAG_CHARS: dict[PosTag, str] = {
    PosTag.NOUN: "N",
    PosTag.VERB: "V",
    PosTag.ADJ: "J",
    PosTag.ADV: "D",
    PosTag.NUM: "M",
    PosTag.PRON: "R",
    PosTag.PREP: "P",
    PosTag.CONJ: "C",
    PosTag.PUNC: "U",
    PosTag.OTHER: "O",
}

_TAG_NAMES = {tag.name: ch for tag, ch in TAG_CHARS.items()}
_PATTERN_TOKEN = re.compile(r"[A-Z]+|[()|+*?]")


def _translate_pattern(line: str, lineno: int, path: str) -> str:
    """Rewrite one pattern line into a char-level regex."""
    out: list[str] = []
    pos = 0
    stripped = line
    while pos < len(stripped):
        ch = stripped[pos]
        if ch.isspace():
            pos += 1
            continue
        m = _PATTERN_TOKEN.match(stripped, pos)
        if m is None:
            raise ConfigError(
                f"{path}:{lineno}: unexpected character {ch!r} in pattern"
            )
        token = m.group(0)
        if token in "()|+*?":
            out.append(token)
        elif token in _TAG_NAMES:
            out.append(_TAG_NAMES[token])
        else:
            raise ConfigError(f"{path}:{lineno}: unknown tag {token!r} in pattern")
        pos = m.end()
    if not out:
        raise ConfigError(f"{path}:{lineno}: empty pattern")
    return "".join(out)


class PatternSet:
    """Compiled POS-shape patterns, one per non-comment line of the file."""

    def __init__(self, compiled: Sequence[re.Pattern[str]], sources: Sequence[str]):
        if not compiled:
            raise ConfigError("pattern set must contain at least one pattern")
        self.compiled = list(compiled)
        self.sources = list(sources)

    @classmethod
    def from_file(cls, path: str | Path) -> "PatternSet":
        path = Path(path)
        try:
            lines = path.read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            raise ConfigError(f"cannot read patterns {path}: {exc}") from exc
        compiled: list[re.Pattern[str]] = []
        sources: list[str] = []
        for lineno, line in enumerate(lines, 1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            translated = _translate_pattern(body, lineno, str(path))
            try:
                compiled.append(re.compile(translated))
            except re.error as exc:
                raise ConfigError(f"{path}:{lineno}: bad pattern: {exc}") from exc
            sources.append(body)
        return cls(compiled, sources)

    def match_spans(self, tag_string: str) -> list[tuple[int, int]]:
        """Non-overlapping [start, end) spans, scanning left to right and
        taking the longest match over all patterns at each position."""
        spans: list[tuple[int, int]] = []
        pos = 0
        n = len(tag_string)
        while pos < n:
            matched_end = 0
            for end in range(n, pos, -1):
                segment = tag_string[pos:end]
                if any(p.fullmatch(segment) for p in self.compiled):
                    matched_end = end
                    break
            if matched_end:
                spans.append((pos, matched_end))
                pos = matched_end
            else:
                pos += 1
        return spans


@dataclass(frozen=True)
class QueryAnalysis:
    tokens: tuple[Token, ...]
    tag_string: str
    spans: tuple[tuple[int, int], ...]
    covered: int
    total: int
    omega: float

    @property
    def coverage(self) -> float:
        return self.covered / self.total if self.total else 0.0


def tag_string(tokens: Sequence[Token]) -> str:
    """One char per token from the fixed tag alphabet."""
    chars = []
    for t in tokens:
        if t.pos is None:
            raise InputError(f"token {t.surface!r} is untagged")
        chars.append(TAG_CHARS[t.pos])
    return "".join(chars)


def compute_wordiness(
    query: str,
    patterns: PatternSet,
    *,
    pipeline: TextPipeline,
    omega_min: float = 0.1,
    omega_max: float = 0.9,
) -> QueryAnalysis:
    """Analyze a query and derive its omega weight.

    Stopwords stay in: they are exactly the function words the sentence
    patterns need to see. Punctuation counts toward neither covered nor
    total. An empty or all-punctuation query has coverage 0 and so maps
    to omega_max.
    """
    if not 0.0 <= omega_min <= omega_max <= 1.0:
        raise InputError(
            f"need 0 <= omega_min <= omega_max <= 1, got {omega_min}, {omega_max}"
        )
    processed = pipeline.process("query", query)
    tokens = processed.tokens
    tags = tag_string(tokens)
    spans = patterns.match_spans(tags)
    non_punc = [i for i, t in enumerate(tokens) if t.pos is not PosTag.PUNC]
    total = len(non_punc)
    in_span = set()
    for start, end in spans:
        in_span.update(range(start, end))
    covered = sum(1 for i in non_punc if i in in_span)
    coverage = covered / total if total else 0.0
    omega = min(max(1.0 - coverage, omega_min), omega_max)
    return QueryAnalysis(
        tokens=tokens,
        tag_string=tags,
        spans=tuple(spans),
        covered=covered,
        total=total,
        omega=omega,
    )


def jss(omega: float, tfidf_sim: float, sem_sim: float) -> float:
    """omega-weighted fusion of the two similarities."""
    if not 0.0 <= omega <= 1.0:
        raise InputError(f"omega must be within [0, 1], got {omega}")
    return omega * tfidf_sim + (1.0 - omega) * sem_sim


@dataclass(frozen=True)
class RankedResult:
    doc_id: str
    rank: int
    jss: float
    bm25: float
    tfidf_sim: float
    sem_sim: float
    omega: float


class SearchState(Protocol):
    """Everything a search needs, as one loaded, consistency-checked unit."""

    pipeline: TextPipeline
    params: Bm25Params
    index: InvertedIndex
    doc_tfidf: Mapping[str, Mapping[str, float]]
    vectors: VectorIndex
    provider: EmbeddingProvider
    patterns: PatternSet
    omega_min: float
    omega_max: float

    def check_consistency(self) -> None: ...


def search(
    query: str,
    k: int,
    state: SearchState,
    omega_override: float | None = None,
) -> list[RankedResult]:
    """Two-stage search: BM25 candidate pool, then re-rank by jss.

    With omega_override 1.0 the order equals the pure TF-IDF ranking of
    the pool, with 0.0 the pure semantic one (ties broken by doc id in
    all cases). Results carry every score component for inspection.
    """
    if k < 1:
        raise InputError(f"k must be >= 1, got {k}")
    if omega_override is not None and not 0.0 <= omega_override <= 1.0:
        raise InputError(f"omega must be within [0, 1], got {omega_override}")
    state.check_consistency()
    if state.index.n_docs == 0:
        return []

    query_terms = state.pipeline.index_terms(query)
    candidates = bm25_topk(query_terms, state.index, state.params)
    if not candidates:
        return []

    if omega_override is not None:
        omega = omega_override
    else:
        omega = compute_wordiness(
            query,
            state.patterns,
            pipeline=state.pipeline,
            omega_min=state.omega_min,
            omega_max=state.omega_max,
        ).omega

    query_sparse = tfidf_vector(query_terms, state.index)
    query_dense = query_vector(state.pipeline.normalize(query), state.provider)

    rescored = []
    for doc_id, bm25 in candidates:
        tfidf_sim = sparse_cosine(query_sparse, state.doc_tfidf[doc_id])
        sem_sim = state.vectors.cosine(query_dense, doc_id)
        fused = jss(omega, tfidf_sim, sem_sim)
        rescored.append((doc_id, bm25, tfidf_sim, sem_sim, fused))
    rescored.sort(key=lambda row: (-row[4], row[0]))

    return [
        RankedResult(
            doc_id=doc_id,
            rank=i,
            jss=fused,
            bm25=bm25,
            tfidf_sim=tfidf_sim,
            sem_sim=sem_sim,
            omega=omega,
        )
        for i, (doc_id, bm25, tfidf_sim, sem_sim, fused) in enumerate(
            rescored[:k], start=1
        )
    ]

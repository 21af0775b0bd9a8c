"""Unsupervised keyword scoring and noun-phrase expansion.

Per-term scores follow the YAKE convention: lower means more important.
A phrase score aggregates its terms' scores as

    S(kw) = prod(S(w)) / (TF(kw) * (1 + sum(S(w))))

so frequent phrases made of important terms rank first. Extracted
keywords are widened to the noun chunk that contains them before use as
a document's semantic representation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Protocol, Sequence

from .errors import ConfigError, InputError
from .textproc import PosTag, ProcessedDocument, RawDocument, TextPipeline, Token


@dataclass(frozen=True)
class CandidatePhrase:
    """A contiguous 1..n-gram candidate with its exact-match count."""

    tokens: tuple[Token, ...]
    text: str
    tf: int
    n: int
    first_index: int  # token index of the first occurrence


@dataclass(frozen=True)
class TermScore:
    term: str
    score: float  # strictly positive; lower = more important


@dataclass(frozen=True)
class NounPhrase:
    tokens: tuple[Token, ...]
    text: str


class NerFilter(Protocol):
    def matches(self, surface: str) -> bool: ...


class Gazetteer:
    """Entity lists loaded from one-entry-per-line files."""

    def __init__(self, surfaces: frozenset[str]):
        self.surfaces = surfaces

    @classmethod
    def from_files(cls, *paths: str | Path, normalizer=None) -> "Gazetteer":
        entries: set[str] = set()
        for path in paths:
            path = Path(path)
            try:
                lines = path.read_text(encoding="utf-8").splitlines()
            except OSError as exc:
                raise ConfigError(f"cannot read gazetteer {path}: {exc}") from exc
            for line in lines:
                entry = line.strip()
                if entry:
                    entries.add(normalizer(entry) if normalizer else entry)
        return cls(frozenset(entries))

    def matches(self, surface: str) -> bool:
        return surface in self.surfaces


def filter_named_entities(tokens: Iterable[Token], ner: NerFilter) -> list[Token]:
    """Drop tokens the NER component recognizes (places, persons, ...)."""
    return [t for t in tokens if not ner.matches(t.surface)]


def score_terms(
    doc: ProcessedDocument, stopwords: frozenset[str] = frozenset()
) -> dict[str, TermScore]:
    """Score every non-stopword term of the document (lower = better).

    Features, combined multiplicatively the way the YAKE family does:

      position    = ln(2 + first_occurrence_index)   earlier is better
      freq_norm   = tf / (1 + mean_tf)               frequent is better
      dispersion  = 1 + (DL + DR) * tf / max_tf      promiscuous context
                    is worse; DL/DR are the distinct-neighbor ratios on
                    each side (0 when a side has no neighbors)
      case        = 1                                 neutral: no letter
                    case in Persian script

      S(w) = (dispersion * position) / (case + freq_norm / dispersion)

    Stopwords and punctuation get no score of their own but do count as
    context (neighbors), which is why they must still be present in the
    input document.
    """
    words = [t.surface for t in doc.tokens if t.pos is not PosTag.PUNC]
    if not words:
        return {}

    first_index: dict[str, int] = {}
    tf: dict[str, int] = {}
    left: dict[str, list[str]] = {}
    right: dict[str, list[str]] = {}
    for i, w in enumerate(words):
        first_index.setdefault(w, i)
        tf[w] = tf.get(w, 0) + 1
        if i > 0:
            left.setdefault(w, []).append(words[i - 1])
        if i + 1 < len(words):
            right.setdefault(w, []).append(words[i + 1])

    scored_terms = [w for w in tf if w not in stopwords]
    if not scored_terms:
        return {}
    mean_tf = sum(tf[w] for w in scored_terms) / len(scored_terms)
    max_tf = max(tf[w] for w in scored_terms)

    out: dict[str, TermScore] = {}
    for w in scored_terms:
        lefts, rights = left.get(w, []), right.get(w, [])
        dl = len(set(lefts)) / len(lefts) if lefts else 0.0
        dr = len(set(rights)) / len(rights) if rights else 0.0
        position = math.log(2 + first_index[w])
        freq_norm = tf[w] / (1.0 + mean_tf)
        dispersion = 1.0 + (dl + dr) * (tf[w] / max_tf)
        case = 1.0
        score = (dispersion * position) / (case + freq_norm / dispersion)
        out[w] = TermScore(term=w, score=score)
    return out


def score_keyword(
    kw: CandidatePhrase,
    terms: Mapping[str, TermScore],
    stopwords: frozenset[str] = frozenset(),
) -> float:
    """Aggregate phrase score: prod(S(w)) / (TF(kw) * (1 + sum(S(w)))).

    Interior stopwords carry no term score and are skipped; a missing
    score for any other token is a caller bug.
    """
    if kw.tf < 1:
        raise InputError(f"phrase {kw.text!r} has tf={kw.tf}; tf >= 1 required")
    prod, total = 1.0, 0.0
    for tok in kw.tokens:
        ts = terms.get(tok.surface)
        if ts is None:
            if tok.surface in stopwords:
                continue
            raise InputError(f"no term score for {tok.surface!r} in phrase {kw.text!r}")
        prod *= ts.score
        total += ts.score
    return prod / (kw.tf * (1.0 + total))


def generate_candidates(
    tokens: Sequence[Token],
    stopwords: frozenset[str] = frozenset(),
    max_n: int = 3,
) -> list[CandidatePhrase]:
    """All contiguous 1..max_n-grams that neither start nor end with a
    stopword and contain no punctuation; exact duplicates merge with
    their occurrence count."""
    found: dict[str, dict] = {}
    order: list[str] = []
    n_tokens = len(tokens)
    for start in range(n_tokens):
        for n in range(1, max_n + 1):
            end = start + n
            if end > n_tokens:
                break
            window = tokens[start:end]
            if any(t.pos is PosTag.PUNC for t in window):
                break  # longer windows from this start also contain it
            if window[0].surface in stopwords or window[-1].surface in stopwords:
                continue
            text = " ".join(t.surface for t in window)
            slot = found.get(text)
            if slot is None:
                found[text] = {"tokens": tuple(window), "tf": 1, "n": n, "first": start}
                order.append(text)
            else:
                slot["tf"] += 1
    return [
        CandidatePhrase(
            tokens=found[text]["tokens"],
            text=text,
            tf=found[text]["tf"],
            n=found[text]["n"],
            first_index=found[text]["first"],
        )
        for text in order
    ]


_CHUNK_TAGS = frozenset({PosTag.ADJ, PosTag.NOUN, PosTag.NUM})


def expand_to_noun_phrase(kw: CandidatePhrase, doc: ProcessedDocument) -> NounPhrase:
    """Widen a keyword to the noun chunk around its first occurrence.

    The span grows over (ADJ|NOUN|NUM)* neighbors on both sides, then the
    right edge retreats until the chunk ends in its NOUN head (never into
    the keyword itself). A keyword with no reachable noun head comes back
    unchanged.
    """
    tokens = doc.tokens
    surfaces = [t.surface for t in tokens]
    kw_surfaces = [t.surface for t in kw.tokens]
    n = len(kw_surfaces)

    start = None
    if kw.first_index + n <= len(surfaces) and surfaces[kw.first_index : kw.first_index + n] == kw_surfaces:
        start = kw.first_index
    else:
        for i in range(len(surfaces) - n + 1):
            if surfaces[i : i + n] == kw_surfaces:
                start = i
                break
    if start is None:
        raise InputError(f"keyword {kw.text!r} does not occur in document {doc.doc_id!r}")

    lo, hi = start, start + n  # hi exclusive
    while lo > 0 and tokens[lo - 1].pos in _CHUNK_TAGS:
        lo -= 1
    while hi < len(tokens) and tokens[hi].pos in _CHUNK_TAGS:
        hi += 1
    while hi - 1 >= start + n and tokens[hi - 1].pos is not PosTag.NOUN:
        hi -= 1

    span = tuple(tokens[lo:hi])
    return NounPhrase(tokens=span, text=" ".join(t.surface for t in span))


def extract_keywords_scored(
    doc: RawDocument,
    k: int,
    *,
    pipeline: TextPipeline,
    ner: NerFilter,
    max_ngram: int = 3,
) -> list[tuple[NounPhrase, float]]:
    """Keyword pipeline with the winning phrases' scores attached.

    normalize -> tokenize -> pos_tag -> NER filter -> candidates ->
    score -> k best (lowest) -> noun-phrase expansion -> dedup by text.
    """
    if k < 1:
        raise InputError(f"k must be >= 1, got {k}")
    processed = pipeline.process(doc.id, doc.body)
    kept = filter_named_entities(processed.tokens, ner)
    working = ProcessedDocument(doc_id=doc.id, text=processed.text, tokens=tuple(kept))

    terms = score_terms(working, pipeline.stopwords)
    candidates = generate_candidates(working.tokens, pipeline.stopwords, max_ngram)
    if not candidates or not terms:
        return []

    scored = [
        (score_keyword(c, terms, pipeline.stopwords), c)
        for c in candidates
    ]
    scored.sort(key=lambda sc: (sc[0], sc[1].first_index, sc[1].text))

    out: list[tuple[NounPhrase, float]] = []
    seen: set[str] = set()
    for score, cand in scored[:k]:
        phrase = expand_to_noun_phrase(cand, working)
        if phrase.text not in seen:
            seen.add(phrase.text)
            out.append((phrase, score))
    return out


def extract_keywords(
    doc: RawDocument,
    k: int,
    *,
    pipeline: TextPipeline,
    ner: NerFilter,
    max_ngram: int = 3,
) -> list[NounPhrase]:
    """The k best keywords of a document, widened to their noun phrases."""
    return [
        phrase
        for phrase, _ in extract_keywords_scored(
            doc, k, pipeline=pipeline, ner=ner, max_ngram=max_ngram
        )
    ]

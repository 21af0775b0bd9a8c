"""Build and load the complete search engine state.

A build takes the normalized corpus through keyword extraction,
embedding, and indexing, then persists five artifacts into the data
directory:

    corpus.jsonl   normalized documents
    lexical.idx    inverted index (carries the corpus snapshot hash)
    vectors.bin    dense document vectors
    phrases.json   extracted noun phrases per document
    meta.json      snapshot hash plus the build parameters

Every artifact is tied to the corpus snapshot hash; loading verifies the
stamps agree so a stale or mixed set of files is refused instead of
silently producing wrong rankings. Rebuilding from the same corpus and
configuration writes byte-identical artifacts.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from . import fusion
from .config import EngineConfig
from .corpus import CorpusStore, load_store, save_store
from .errors import (
    BuildError,
    ConsistencyError,
    EmbeddingError,
    InputError,
    UnknownDocumentError,
)
from .fusion import PatternSet, RankedResult
from .keywords import Gazetteer, NerFilter, extract_keywords_scored
from .lexical import (
    Bm25Params,
    InvertedIndex,
    build_index,
    load_index,
    save_index,
    tfidf_vector,
)
from .semantic import (
    DocSemanticVector,
    EmbeddingProvider,
    HashEmbedder,
    VectorIndex,
    build_doc_vector,
    embed_noun_phrases,
    embed_title,
    load_vectors,
    save_vectors,
)
from .textproc import PosTag, RawDocument, TextPipeline

CORPUS_FILE = "corpus.jsonl"
INDEX_FILE = "lexical.idx"
VECTORS_FILE = "vectors.bin"
PHRASES_FILE = "phrases.json"
META_FILE = "meta.json"
META_FORMAT = 1


def default_provider(config: EngineConfig) -> EmbeddingProvider:
    return HashEmbedder(dim=config.embed_dim, seed=config.embed_seed)


def make_pipeline(config: EngineConfig) -> TextPipeline:
    return TextPipeline.from_paths(
        charmap_path=config.charmap_path,
        stopwords_path=config.stopwords_path,
        lexicon_path=config.lexicon_path,
    )


def make_ner(config: EngineConfig, pipeline: TextPipeline) -> Gazetteer:
    return Gazetteer.from_files(
        config.gazetteer_place_path,
        config.gazetteer_person_path,
        normalizer=pipeline.normalize,
    )


@dataclass
class Engine:
    """Loaded, consistency-checked search state."""

    config: EngineConfig
    store: CorpusStore
    pipeline: TextPipeline
    patterns: PatternSet
    provider: EmbeddingProvider
    index: InvertedIndex
    doc_tfidf: dict[str, dict[str, float]]
    vectors: VectorIndex
    phrases: dict[str, list[str]]
    snapshot: str
    index_snapshot: str
    meta_snapshot: str
    params: Bm25Params = field(init=False)
    omega_min: float = field(init=False)
    omega_max: float = field(init=False)

    def __post_init__(self) -> None:
        self.params = Bm25Params(
            k1=self.config.k1, b=self.config.b, pool=self.config.pool
        )
        self.omega_min = self.config.omega_min
        self.omega_max = self.config.omega_max
        self.check_consistency()

    def check_consistency(self) -> None:
        stamps = {
            "corpus": self.snapshot,
            "lexical index": self.index_snapshot,
            "metadata": self.meta_snapshot,
        }
        if len(set(stamps.values())) > 1:
            detail = ", ".join(f"{k}={v[:12]}" for k, v in stamps.items())
            raise ConsistencyError(f"artifact snapshot hashes disagree: {detail}")
        missing_vec = set(self.store.by_id) - set(self.vectors.ids)
        missing_phr = set(self.store.by_id) - set(self.phrases)
        if missing_vec or missing_phr:
            raise ConsistencyError(
                f"artifacts incomplete: {len(missing_vec)} documents lack vectors, "
                f"{len(missing_phr)} lack phrases"
            )

    def search(
        self, query: str, k: int | None = None, omega: float | None = None
    ) -> list[RankedResult]:
        return fusion.search(
            query, k if k is not None else self.config.top_k, self, omega
        )

    def analyze_query(self, query: str) -> fusion.QueryAnalysis:
        return fusion.compute_wordiness(
            query,
            self.patterns,
            pipeline=self.pipeline,
            omega_min=self.omega_min,
            omega_max=self.omega_max,
        )

    def doc(self, doc_id: str) -> RawDocument:
        doc = self.store.get(doc_id)
        if doc is None:
            raise UnknownDocumentError(f"unknown document id: {doc_id!r}")
        return doc

    def doc_phrases(self, doc_id: str) -> list[str]:
        if doc_id not in self.store:
            raise UnknownDocumentError(f"unknown document id: {doc_id!r}")
        return list(self.phrases.get(doc_id, []))

    def stats(self) -> "StatsReport":
        return corpus_stats(self.store, self.phrases, self.pipeline)


def _index_terms(doc: RawDocument, pipeline: TextPipeline) -> list[str]:
    return pipeline.index_terms(doc.title + "\n" + doc.body)


def build(
    store: CorpusStore,
    config: EngineConfig,
    provider: EmbeddingProvider | None = None,
) -> Engine:
    """Build the full engine state in memory."""
    provider = provider or default_provider(config)
    pipeline = make_pipeline(config)
    ner = make_ner(config, pipeline)
    patterns = PatternSet.from_file(config.patterns_path)
    snapshot = store.hash

    term_lists: dict[str, list[str]] = {}
    phrases: dict[str, list[str]] = {}
    title_vecs: dict[str, object] = {}
    np_vecs: dict[str, object] = {}
    for doc in store.docs:
        try:
            term_lists[doc.id] = _index_terms(doc, pipeline)
        except Exception as exc:
            raise BuildError("tokenize", doc.id, exc) from exc
        try:
            extracted = extract_keywords_scored(
                doc,
                config.keywords_per_doc,
                pipeline=pipeline,
                ner=ner,
                max_ngram=config.max_ngram,
            )
            phrases[doc.id] = [phrase.text for phrase, _ in extracted]
        except Exception as exc:
            raise BuildError("keywords", doc.id, exc) from exc
        try:
            title_vecs[doc.id] = embed_title(doc.title, provider)
            np_vecs[doc.id] = embed_noun_phrases(phrases[doc.id], provider)
        except EmbeddingError as exc:
            raise BuildError("embed", doc.id, exc) from exc

    index = build_index(sorted(term_lists.items()))
    doc_tfidf = {
        doc_id: tfidf_vector(terms, index) for doc_id, terms in term_lists.items()
    }
    # Vectors are persisted at single precision; scoring against the same
    # precision in memory keeps a fresh build and a reloaded index ranking
    # byte-identically.
    vectors = VectorIndex(
        [
            DocSemanticVector(
                doc_id=doc_id,
                vec=build_doc_vector(
                    title_vecs[doc_id], np_vecs[doc_id], config.title_weight
                )
                .astype("<f4")
                .astype("float64"),
            )
            for doc_id in sorted(term_lists)
        ]
    )
    return Engine(
        config=config,
        store=store,
        pipeline=pipeline,
        patterns=patterns,
        provider=provider,
        index=index,
        doc_tfidf=doc_tfidf,
        vectors=vectors,
        phrases=phrases,
        snapshot=snapshot,
        index_snapshot=snapshot,
        meta_snapshot=snapshot,
    )


def persist(engine: Engine, data_dir: str | Path | None = None) -> Path:
    """Write all engine artifacts; returns the data directory."""
    data_dir = Path(data_dir if data_dir is not None else engine.config.data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)
    save_store(engine.store, data_dir / CORPUS_FILE)
    save_index(engine.index, data_dir / INDEX_FILE, engine.snapshot)
    save_vectors(
        [
            DocSemanticVector(doc_id=doc_id, vec=engine.vectors.vector(doc_id))
            for doc_id in engine.vectors.ids
        ],
        data_dir / VECTORS_FILE,
    )
    (data_dir / PHRASES_FILE).write_text(
        json.dumps(engine.phrases, ensure_ascii=False, sort_keys=True, indent=2)
        + "\n",
        encoding="utf-8",
    )
    meta = {
        "format": META_FORMAT,
        "snapshot_hash": engine.snapshot,
        "build": engine.config.fingerprint(),
    }
    (data_dir / META_FILE).write_text(
        json.dumps(meta, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    return data_dir


def build_all(
    store: CorpusStore,
    config: EngineConfig,
    provider: EmbeddingProvider | None = None,
) -> Engine:
    """Build and persist in one step."""
    engine = build(store, config, provider)
    persist(engine)
    return engine


def is_current(config: EngineConfig, store: CorpusStore | None = None) -> bool:
    """True when the persisted artifacts match this corpus and build
    configuration, meaning a rebuild would be a no-op."""
    data_dir = Path(config.data_dir)
    for name in (CORPUS_FILE, INDEX_FILE, VECTORS_FILE, PHRASES_FILE, META_FILE):
        if not (data_dir / name).is_file():
            return False
    try:
        meta = json.loads((data_dir / META_FILE).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError):
        return False
    if meta.get("format") != META_FORMAT or meta.get("build") != config.fingerprint():
        return False
    if store is None:
        try:
            store = load_store(data_dir / CORPUS_FILE)
        except Exception:
            return False
    return meta.get("snapshot_hash") == store.hash


def load_engine(
    config: EngineConfig, provider: EmbeddingProvider | None = None
) -> Engine:
    """Load persisted artifacts and verify their snapshot stamps agree."""
    data_dir = Path(config.data_dir)
    for name in (CORPUS_FILE, INDEX_FILE, VECTORS_FILE, PHRASES_FILE, META_FILE):
        if not (data_dir / name).is_file():
            raise ConsistencyError(f"missing artifact: {data_dir / name}")

    store = load_store(data_dir / CORPUS_FILE)
    index, index_snapshot = load_index(data_dir / INDEX_FILE)
    vectors = VectorIndex(load_vectors(data_dir / VECTORS_FILE))
    try:
        phrases_raw = json.loads(
            (data_dir / PHRASES_FILE).read_text(encoding="utf-8")
        )
        meta = json.loads((data_dir / META_FILE).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConsistencyError(f"corrupt artifact in {data_dir}: {exc}")
    if meta.get("format") != META_FORMAT:
        raise ConsistencyError(f"unsupported metadata format: {meta.get('format')!r}")
    if meta.get("build") != config.fingerprint():
        raise ConsistencyError(
            "artifacts were built with different parameters; rebuild required"
        )
    phrases = {doc_id: list(texts) for doc_id, texts in phrases_raw.items()}

    pipeline = make_pipeline(config)
    patterns = PatternSet.from_file(config.patterns_path)
    provider = provider or default_provider(config)
    if vectors.dim and vectors.dim != 2 * provider.dim:
        raise ConsistencyError(
            f"vector width {vectors.dim} does not match provider dim "
            f"{provider.dim} (expected {2 * provider.dim})"
        )

    doc_tfidf = {
        doc.id: tfidf_vector(_index_terms(doc, pipeline), index)
        for doc in store.docs
    }
    return Engine(
        config=config,
        store=store,
        pipeline=pipeline,
        patterns=patterns,
        provider=provider,
        index=index,
        doc_tfidf=doc_tfidf,
        vectors=vectors,
        phrases=phrases,
        snapshot=store.hash,
        index_snapshot=index_snapshot,
        meta_snapshot=str(meta.get("snapshot_hash")),
    )


@dataclass(frozen=True)
class StatsReport:
    documents: int
    monthly_top_words: dict[str, list[tuple[str, int]]]
    word_counts: dict[str, tuple[int, int]]  # doc_id -> (body, noun phrase)

    def to_dict(self) -> dict:
        return {
            "documents": self.documents,
            "monthly_top_words": {
                month: [[word, count] for word, count in words]
                for month, words in sorted(self.monthly_top_words.items())
            },
            "word_counts": {
                doc_id: {"body_words": body, "noun_phrase_words": np}
                for doc_id, (body, np) in sorted(self.word_counts.items())
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, sort_keys=True, indent=2)

    def to_tsv(self) -> str:
        lines = ["month\tword\tcount"]
        for month in sorted(self.monthly_top_words):
            for word, count in self.monthly_top_words[month]:
                lines.append(f"{month}\t{word}\t{count}")
        lines.append("")
        lines.append("doc\tbody_words\tnoun_phrase_words")
        for doc_id in sorted(self.word_counts):
            body, np = self.word_counts[doc_id]
            lines.append(f"{doc_id}\t{body}\t{np}")
        return "\n".join(lines) + "\n"


def corpus_stats(
    store: CorpusStore,
    phrases: Mapping[str, Sequence[str]],
    pipeline: TextPipeline,
) -> StatsReport:
    """Monthly top noun-phrase words and per-document word counts.

    Only documents with a publication date join the monthly table; every
    document joins the word-count table. Top words are the three most
    frequent, ties broken alphabetically.
    """
    by_month: dict[str, Counter] = {}
    word_counts: dict[str, tuple[int, int]] = {}
    for doc in store.docs:
        doc_phrases = phrases.get(doc.id, [])
        np_words = [w for text in doc_phrases for w in text.split(" ") if w]
        body_tokens = [
            t
            for t in pipeline.process(doc.id, doc.body).tokens
            if t.pos is not PosTag.PUNC
        ]
        word_counts[doc.id] = (len(body_tokens), len(np_words))
        if doc.published_at:
            month = doc.published_at[:7]
            by_month.setdefault(month, Counter()).update(np_words)
    monthly = {
        month: sorted(counts.items(), key=lambda wc: (-wc[1], wc[0]))[:3]
        for month, counts in by_month.items()
    }
    return StatsReport(
        documents=len(store),
        monthly_top_words=monthly,
        word_counts=word_counts,
    )

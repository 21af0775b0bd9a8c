"""Two-stage document search with query-adaptive score fusion.

BM25 picks a candidate pool; each candidate is then re-scored by a
weighted sum of TF-IDF cosine and semantic cosine similarity, where the
weight follows from how sentence-like the query is. Built for Persian
text but every language resource (character map, stopwords, POS lexicon,
patterns, gazetteers) is a plain data file that can be swapped out.
"""

from .config import EngineConfig, load_config
from .corpus import CorpusStore, ingest, load_store, save_store, snapshot_hash
from .engine import Engine, StatsReport, build, build_all, corpus_stats, load_engine, persist
from .errors import (
    BuildError,
    ConfigError,
    ConsistencyError,
    CoperError,
    EmbeddingError,
    EmptyIndexError,
    IngestError,
    InputError,
    ParseError,
    TaggingError,
    UnknownDocumentError,
)
from .evalkit import (
    FileStsOracle,
    MetricsReport,
    average_precision_at_k,
    asts_at_k,
    evaluate,
    load_qrels,
    load_run,
    ndcg_at_k,
    precision_at_k,
    write_run,
)
from .fusion import (
    PatternSet,
    QueryAnalysis,
    RankedResult,
    compute_wordiness,
    jss,
    search,
)
from .keywords import (
    Gazetteer,
    NounPhrase,
    extract_keywords,
    extract_keywords_scored,
    score_keyword,
    score_terms,
)
from .lexical import (
    Bm25Params,
    InvertedIndex,
    bm25_score,
    bm25_topk,
    build_index,
    idf,
    sparse_cosine,
    tf_weight,
    tfidf_vector,
)
from .semantic import (
    DocSemanticVector,
    HashEmbedder,
    SubprocessEmbedder,
    VectorIndex,
    build_doc_vector,
    dense_cosine,
    embed_noun_phrases,
    embed_title,
    query_vector,
)
from .textproc import (
    PosTag,
    ProcessedDocument,
    RawDocument,
    TextPipeline,
    Token,
    normalize,
    tokenize,
)

__version__ = "0.1.0"

__all__ = [
    "Bm25Params",
    "BuildError",
    "ConfigError",
    "ConsistencyError",
    "CoperError",
    "CorpusStore",
    "DocSemanticVector",
    "EmbeddingError",
    "EmptyIndexError",
    "Engine",
    "EngineConfig",
    "FileStsOracle",
    "Gazetteer",
    "HashEmbedder",
    "IngestError",
    "InputError",
    "InvertedIndex",
    "MetricsReport",
    "NounPhrase",
    "ParseError",
    "PatternSet",
    "PosTag",
    "ProcessedDocument",
    "QueryAnalysis",
    "RankedResult",
    "RawDocument",
    "StatsReport",
    "SubprocessEmbedder",
    "TaggingError",
    "TextPipeline",
    "Token",
    "UnknownDocumentError",
    "VectorIndex",
    "asts_at_k",
    "average_precision_at_k",
    "bm25_score",
    "bm25_topk",
    "build",
    "build_all",
    "build_doc_vector",
    "build_index",
    "compute_wordiness",
    "corpus_stats",
    "dense_cosine",
    "embed_noun_phrases",
    "embed_title",
    "evaluate",
    "extract_keywords",
    "extract_keywords_scored",
    "idf",
    "ingest",
    "jss",
    "load_config",
    "load_engine",
    "load_qrels",
    "load_run",
    "load_store",
    "ndcg_at_k",
    "normalize",
    "persist",
    "precision_at_k",
    "query_vector",
    "save_store",
    "score_keyword",
    "score_terms",
    "search",
    "snapshot_hash",
    "sparse_cosine",
    "tf_weight",
    "tfidf_vector",
    "tokenize",
    "write_run",
    "__version__",
]

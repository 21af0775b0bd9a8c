"""Retrieval metrics and the file plumbing around them.

Metrics are cut off at rank k (default 10). Precision divides by k even
when fewer results exist; average precision normalizes by
min(|relevant|, k); nDCG uses (2^grade - 1) gains with log2(rank + 1)
discounts and counts unjudged documents as grade 0. ASTS averages a
semantic-similarity oracle's [1, 5] judgments over the top k, so it
rewards near-misses that binary relevance ignores.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Collection, Mapping, Protocol, Sequence

from .errors import InputError, ParseError

logger = logging.getLogger(__name__)

Qrels = dict[str, dict[str, int]]
Run = dict[str, list[tuple[str, float]]]


def precision_at_k(ranked: Sequence[str], relevant: Collection[str], k: int) -> float:
    """Fraction of the first k slots holding a relevant document."""
    if k < 1:
        raise InputError(f"k must be >= 1, got {k}")
    rel = set(relevant)
    return sum(1 for doc_id in ranked[:k] if doc_id in rel) / k


def average_precision_at_k(
    ranked: Sequence[str], relevant: Collection[str], k: int
) -> float:
    """Precision averaged over relevant hit positions within the top k,
    normalized by min(|relevant|, k); no relevant documents gives 0."""
    if k < 1:
        raise InputError(f"k must be >= 1, got {k}")
    rel = set(relevant)
    denom = min(len(rel), k)
    if denom == 0:
        return 0.0
    hits = 0
    total = 0.0
    for i, doc_id in enumerate(ranked[:k], start=1):
        if doc_id in rel:
            hits += 1
            total += hits / i
    return total / denom


def ndcg_at_k(ranked: Sequence[str], grades: Mapping[str, int], k: int) -> float:
    """nDCG with exponential gains; a query with no positive grades has
    IDCG 0 and is scored 1.0 (nothing to get wrong)."""
    if k < 1:
        raise InputError(f"k must be >= 1, got {k}")

    def dcg(gains: Sequence[int]) -> float:
        return sum(
            (2.0**g - 1.0) / math.log2(i + 1.0)
            for i, g in enumerate(gains, start=1)
        )

    actual = dcg([grades.get(doc_id, 0) for doc_id in ranked[:k]])
    ideal = dcg(sorted(grades.values(), reverse=True)[:k])
    if ideal == 0.0:
        return 1.0
    return actual / ideal


class StsOracle(Protocol):
    """Judges query/document semantic similarity on a [1, 5] scale."""

    def sts(self, query_id: str, doc_id: str) -> float: ...


class FileStsOracle:
    """Oracle backed by a TSV of query_id, doc_id, similarity lines.

    Pairs missing from the file judge as 1.0 (no similarity).
    """

    def __init__(self, table: Mapping[tuple[str, str], float]):
        self._table = dict(table)

    @classmethod
    def from_file(cls, path: str | Path) -> "FileStsOracle":
        path = Path(path)
        table: dict[tuple[str, str], float] = {}
        try:
            lines = path.read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            raise ParseError(f"cannot read similarity table: {exc}", path=str(path))
        for lineno, line in enumerate(lines, 1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            fields = body.split("\t")
            if len(fields) != 3:
                raise ParseError(
                    f"expected 3 tab-separated fields, got {len(fields)}",
                    path=str(path),
                    line=lineno,
                )
            query_id, doc_id, raw = fields
            try:
                value = float(raw)
            except ValueError:
                raise ParseError(
                    f"bad similarity value {raw!r}", path=str(path), line=lineno
                )
            if not 1.0 <= value <= 5.0:
                raise ParseError(
                    f"similarity {value} outside [1, 5]", path=str(path), line=lineno
                )
            table[(query_id, doc_id)] = value
        return cls(table)

    def sts(self, query_id: str, doc_id: str) -> float:
        return self._table.get((query_id, doc_id), 1.0)


def asts_at_k(
    query_id: str, ranked: Sequence[str], oracle: StsOracle, k: int
) -> float | None:
    """Mean oracle similarity over the top k; None for an empty ranking."""
    if k < 1:
        raise InputError(f"k must be >= 1, got {k}")
    top = ranked[:k]
    if not top:
        return None
    values = []
    for doc_id in top:
        value = oracle.sts(query_id, doc_id)
        if not 1.0 <= value <= 5.0:
            raise InputError(
                f"oracle similarity {value} for ({query_id!r}, {doc_id!r}) "
                "outside [1, 5]"
            )
        values.append(value)
    return sum(values) / len(values)


def load_qrels(path: str | Path) -> Qrels:
    """Parse TREC-style qrels: query_id 0 doc_id grade, whitespace split."""
    path = Path(path)
    qrels: Qrels = {}
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ParseError(f"cannot read qrels: {exc}", path=str(path))
    for lineno, line in enumerate(lines, 1):
        body = line.strip()
        if not body or body.startswith("#"):
            continue
        fields = body.split()
        if len(fields) != 4:
            raise ParseError(
                f"expected 4 fields, got {len(fields)}", path=str(path), line=lineno
            )
        query_id, _, doc_id, raw_grade = fields
        try:
            grade = int(raw_grade)
        except ValueError:
            raise ParseError(
                f"bad grade {raw_grade!r}", path=str(path), line=lineno
            )
        if grade < 0:
            raise ParseError(
                f"grade must be >= 0, got {grade}", path=str(path), line=lineno
            )
        by_doc = qrels.setdefault(query_id, {})
        if doc_id in by_doc:
            raise ParseError(
                f"duplicate judgment for ({query_id!r}, {doc_id!r})",
                path=str(path),
                line=lineno,
            )
        by_doc[doc_id] = grade
    return qrels


def load_run(path: str | Path) -> Run:
    """Parse a TREC run: query_id Q0 doc_id rank score tag.

    Per query, ranks must increase from 1, scores must not increase, and
    a document may appear once.
    """
    path = Path(path)
    run: Run = {}
    last_rank: dict[str, int] = {}
    last_score: dict[str, float] = {}
    seen: dict[str, set[str]] = {}
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ParseError(f"cannot read run: {exc}", path=str(path))
    for lineno, line in enumerate(lines, 1):
        body = line.strip()
        if not body or body.startswith("#"):
            continue
        fields = body.split()
        if len(fields) != 6:
            raise ParseError(
                f"expected 6 fields, got {len(fields)}", path=str(path), line=lineno
            )
        query_id, _, doc_id, raw_rank, raw_score, _tag = fields
        try:
            rank = int(raw_rank)
            score = float(raw_score)
        except ValueError:
            raise ParseError(
                f"bad rank or score: {raw_rank!r}, {raw_score!r}",
                path=str(path),
                line=lineno,
            )
        if not math.isfinite(score):
            raise ParseError(f"non-finite score {raw_score!r}", path=str(path), line=lineno)
        expected = last_rank.get(query_id, 0) + 1
        if rank != expected:
            raise ParseError(
                f"rank {rank} for query {query_id!r}, expected {expected}",
                path=str(path),
                line=lineno,
            )
        if query_id in last_score and score > last_score[query_id]:
            raise ParseError(
                f"score {score} increases over {last_score[query_id]}",
                path=str(path),
                line=lineno,
            )
        if doc_id in seen.setdefault(query_id, set()):
            raise ParseError(
                f"duplicate document {doc_id!r} for query {query_id!r}",
                path=str(path),
                line=lineno,
            )
        seen[query_id].add(doc_id)
        last_rank[query_id] = rank
        last_score[query_id] = score
        run.setdefault(query_id, []).append((doc_id, score))
    return run


def write_run(
    path: str | Path, run: Mapping[str, Sequence[tuple[str, float]]], tag: str = "coper"
) -> None:
    """Write a TREC run file, queries sorted, scores with 6 decimals."""
    lines = []
    for query_id in sorted(run):
        for rank, (doc_id, score) in enumerate(run[query_id], start=1):
            lines.append(f"{query_id} Q0 {doc_id} {rank} {score:.6f} {tag}")
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


@dataclass(frozen=True)
class QueryMetrics:
    precision: float
    average_precision: float
    ndcg: float
    asts: float | None = None


@dataclass
class MetricsReport:
    k: int
    per_query: dict[str, QueryMetrics] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def _mean(self, pick) -> float:
        values = [pick(m) for m in self.per_query.values()]
        return sum(values) / len(values) if values else 0.0

    @property
    def mean_precision(self) -> float:
        return self._mean(lambda m: m.precision)

    @property
    def mean_average_precision(self) -> float:
        return self._mean(lambda m: m.average_precision)

    @property
    def mean_ndcg(self) -> float:
        return self._mean(lambda m: m.ndcg)

    @property
    def mean_asts(self) -> float | None:
        values = [m.asts for m in self.per_query.values() if m.asts is not None]
        if not values:
            return None
        return sum(values) / len(values)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "queries": {
                query_id: {
                    "precision": m.precision,
                    "average_precision": m.average_precision,
                    "ndcg": m.ndcg,
                    "asts": m.asts,
                }
                for query_id, m in sorted(self.per_query.items())
            },
            "mean": {
                "precision": self.mean_precision,
                "average_precision": self.mean_average_precision,
                "ndcg": self.mean_ndcg,
                "asts": self.mean_asts,
            },
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, sort_keys=True, indent=2)

    def to_tsv(self) -> str:
        def fmt(value: float | None) -> str:
            return "-" if value is None else f"{value:.6f}"

        header = ["query", f"P@{self.k}", f"AP@{self.k}", f"nDCG@{self.k}", "ASTS"]
        rows = [header]
        for query_id in sorted(self.per_query):
            m = self.per_query[query_id]
            rows.append(
                [
                    query_id,
                    fmt(m.precision),
                    fmt(m.average_precision),
                    fmt(m.ndcg),
                    fmt(m.asts),
                ]
            )
        rows.append(
            [
                "MEAN",
                fmt(self.mean_precision),
                fmt(self.mean_average_precision),
                fmt(self.mean_ndcg),
                fmt(self.mean_asts),
            ]
        )
        widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
        lines = [
            "\t".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip()
            for row in rows
        ]
        return "\n".join(lines) + "\n"


def evaluate(
    run: Run, qrels: Qrels, oracle: StsOracle | None = None, k: int = 10
) -> MetricsReport:
    """Score a run against judgments; queries without judgments are
    skipped with a warning rather than failing the whole evaluation."""
    if k < 1:
        raise InputError(f"k must be >= 1, got {k}")
    report = MetricsReport(k=k)
    for query_id in sorted(run):
        grades = qrels.get(query_id)
        if grades is None:
            message = f"query {query_id!r} has no judgments; skipped"
            report.warnings.append(message)
            logger.warning(message)
            continue
        ranked = [doc_id for doc_id, _ in run[query_id]]
        relevant = {doc_id for doc_id, grade in grades.items() if grade > 0}
        report.per_query[query_id] = QueryMetrics(
            precision=precision_at_k(ranked, relevant, k),
            average_precision=average_precision_at_k(ranked, relevant, k),
            ndcg=ndcg_at_k(ranked, grades, k),
            asts=asts_at_k(query_id, ranked, oracle, k) if oracle else None,
        )
    if not run:
        report.warnings.append("empty run: no queries to evaluate")
    return report

"""Deterministic synthetic corpus, queries, and judgments for end-to-end
tests.

Everything here is a pure function of a fixed seed: two processes
generate byte-identical files. Five disjoint topic vocabularies keep the
relevance rule honest — a topic noun appears only in its own topic's
documents, so judging by query-term overlap is independent of the search
engine under test.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

SEED = 20240816

TOPICS: dict[str, dict[str, list[str]]] = {
    "tech": {
        "nouns": [
            "هوش",
            "مصنوعی",
            "الگوریتم",
            "داده",
            "رایانه",
            "نرم‌افزار",
            "اینترنت",
            "شبکه",
            "ربات",
            "پردازش",
            "سامانه",
            "فناوری",
        ],
        "extras": ["متن", "زبان", "کاربر"],
    },
    "econ": {
        "nouns": [
            "اقتصاد",
            "بازار",
            "تورم",
            "قیمت",
            "بانک",
            "سرمایه",
            "تولید",
            "صادرات",
            "بودجه",
            "تجارت",
            "شرکت",
            "سهام",
        ],
        "extras": ["پول", "رونق", "رکود"],
    },
    "sport": {
        "nouns": [
            "فوتبال",
            "تیم",
            "بازیکن",
            "مربی",
            "دروازه",
            "مسابقه",
            "لیگ",
            "قهرمانی",
            "تماشاگر",
            "داور",
            "تمرین",
            "باشگاه",
        ],
        "extras": ["توپ", "گل", "نیمکت"],
    },
    "health": {
        "nouns": [
            "سلامت",
            "بیماری",
            "واکسن",
            "درمان",
            "پزشک",
            "بیمار",
            "دارو",
            "ویروس",
            "تغذیه",
            "قلب",
            "بهداشت",
            "عفونت",
        ],
        "extras": ["خواب", "بدن", "آزمایش"],
    },
    "edu": {
        "nouns": [
            "آموزش",
            "دانشگاه",
            "مدرسه",
            "دانشجو",
            "معلم",
            "کلاس",
            "درس",
            "کتاب",
            "آزمون",
            "یادگیری",
            "پژوهش",
            "استاد",
        ],
        "extras": ["نمره", "دانش", "تدریس"],
    },
}

# Words every topic may use; they never appear in queries, so they cannot
# leak relevance across topics.
FILL_WORDS = [
    "مردم",
    "کشور",
    "شهر",
    "سال",
    "روز",
    "گزارش",
    "خبر",
    "برنامه",
    "نتیجه",
    "بخش",
]
ADJECTIVES = ["جدید", "مهم", "بزرگ", "کوچک", "خوب", "موثر"]
VERBS = ["است", "دارد", "می‌شود", "می‌کند", "شد", "کرد", "خواهد شد"]
PREPS = ["در", "از", "با", "برای"]

DOCS_PER_TOPIC = 24
MONTHS = ["2024-01", "2024-02", "2024-03", "2024-04", "2024-05", "2024-06"]


def _sentence(rng: random.Random, words: list[str]) -> str:
    parts = rng.sample(words, k=rng.randint(2, 4))
    if rng.random() < 0.5:
        parts.append(rng.choice(ADJECTIVES))
    if rng.random() < 0.4:
        parts.extend([rng.choice(PREPS), rng.choice(words)])
    if rng.random() < 0.5:
        parts.append(rng.choice(FILL_WORDS))
    parts.append(rng.choice(VERBS))
    return " ".join(parts) + "."


def fixture_docs() -> list[dict]:
    """120 synthetic articles, 24 per topic, deterministic."""
    rng = random.Random(SEED)
    docs: list[dict] = []
    for topic, vocab in TOPICS.items():
        words = vocab["nouns"] + vocab["extras"]
        for i in range(DOCS_PER_TOPIC):
            title_words = rng.sample(vocab["nouns"], k=rng.randint(2, 3))
            if rng.random() < 0.3:
                title_words.append(rng.choice(ADJECTIVES))
            body = " ".join(
                _sentence(rng, words) for _ in range(rng.randint(4, 6))
            )
            doc: dict = {
                "id": f"{topic}-{i:02d}",
                "title": " ".join(title_words),
                "body": body,
            }
            if rng.random() < 0.7:
                month = rng.choice(MONTHS)
                doc["published_at"] = f"{month}-{rng.randint(1, 28):02d}"
            if rng.random() < 0.5:
                doc["url"] = f"https://news.example/{topic}/{i}"
            docs.append(doc)
    return docs


def fixture_queries() -> list[tuple[str, str]]:
    """20 queries: per topic two fluent questions and two keyword bags.

    Fluent questions match the shipped sentence patterns (low omega);
    keyword bags contain no verb, so no pattern matches (high omega).
    """
    rng = random.Random(SEED + 1)
    queries: list[tuple[str, str]] = []
    for index, (topic, vocab) in enumerate(TOPICS.items()):
        nouns = vocab["nouns"]
        a, b, c, d, e, f = rng.sample(nouns, k=6)
        queries.append((f"{topic}-f1", f"{a} {b} چیست؟"))
        queries.append((f"{topic}-f2", f"چرا {c} {d} مهم است؟"))
        queries.append((f"{topic}-k1", f"{a} {c} {e}"))
        queries.append((f"{topic}-k2", f"{b} {f}"))
    return queries


def topic_words() -> set[str]:
    """Union of every topic's vocabulary; disjoint between topics."""
    return {
        word
        for vocab in TOPICS.values()
        for word in vocab["nouns"] + vocab["extras"]
    }


def fixture_qrels(index_terms) -> dict[str, dict[str, int]]:
    """Rule-based judgments: grade by distinct topic-word overlap.

    Only topic vocabulary counts — adjectives, verbs, and fill words are
    shared across topics and would judge unrelated documents as near
    matches. A document sharing at least two distinct topic words with
    the query is highly relevant (2); sharing one is partially relevant
    (1). The rule reads only the corpus text, never the engine's output.
    """
    words = topic_words()
    docs = fixture_docs()
    doc_terms = {
        doc["id"]: set(index_terms(doc["title"] + "\n" + doc["body"])) & words
        for doc in docs
    }
    qrels: dict[str, dict[str, int]] = {}
    for query_id, text in fixture_queries():
        terms = set(index_terms(text)) & words
        grades: dict[str, int] = {}
        for doc_id, terms_of_doc in doc_terms.items():
            hits = len(terms & terms_of_doc)
            if hits >= 2:
                grades[doc_id] = 2
            elif hits == 1:
                grades[doc_id] = 1
        qrels[query_id] = grades
    return qrels


def write_corpus(path: Path) -> Path:
    path.write_text(
        "\n".join(json.dumps(d, ensure_ascii=False) for d in fixture_docs()) + "\n",
        encoding="utf-8",
    )
    return path


def write_queries(path: Path) -> Path:
    path.write_text(
        "\n".join(f"{query_id}\t{text}" for query_id, text in fixture_queries())
        + "\n",
        encoding="utf-8",
    )
    return path


def write_qrels(path: Path, index_terms) -> Path:
    lines = []
    for query_id, grades in sorted(fixture_qrels(index_terms).items()):
        for doc_id, grade in sorted(grades.items()):
            lines.append(f"{query_id} 0 {doc_id} {grade}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path

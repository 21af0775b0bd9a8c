import json
from pathlib import Path

import pytest

from coper.config import load_config
from coper.corpus import CorpusStore, ingest
from coper.engine import make_ner
from coper.textproc import RawDocument, TextPipeline

GOLDEN_DIR = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def pipeline() -> TextPipeline:
    return TextPipeline.default()


@pytest.fixture(scope="session")
def small_docs() -> list[dict]:
    """Five hand-written articles used across golden tests."""
    return [
        {
            "id": "d1",
            "title": "هوش مصنوعی در پزشکی",
            "body": (
                "هوش مصنوعی در پزشکی کاربرد فراوان دارد. "
                "پزشکان با کمک مدل هوشمند بیماری را تشخیص می‌دهند. "
                "تشخیص سریع بیماری جان بیماران را نجات می‌دهد."
            ),
            "url": "https://example.ir/d1",
            "published_at": "2024-01-15",
        },
        {
            "id": "d2",
            "title": "اقتصاد دیجیتال",
            "body": (
                "اقتصاد دیجیتال رشد سریع دارد. "
                "کسب و کار اینترنتی سهم بزرگ از بازار گرفته است. "
                "پرداخت الکترونیکی اعتماد مردم را جلب کرد."
            ),
            "url": "https://example.ir/d2",
            "published_at": "2024-01-20",
        },
        {
            "id": "d3",
            "title": "تیم ملی فوتبال",
            "body": (
                "تیم ملی فوتبال در مسابقات قهرمانی پیروز شد. "
                "بازیکنان جوان نمایش درخشان داشتند. "
                "هواداران از نتیجه بازی خوشحال شدند."
            ),
            "url": "https://example.ir/d3",
            "published_at": "2024-02-03",
        },
        {
            "id": "d4",
            "title": "آموزش برخط",
            "body": (
                "آموزش برخط در مدرسه گسترش یافت. "
                "دانش‌آموزان با تلفن همراه درس می‌خوانند. "
                "معلمان محتوای درسی تازه تولید کردند."
            ),
            "published_at": "2024-02-10",
        },
        {
            "id": "d5",
            "title": "آلودگی هوا",
            "body": (
                "آلودگی هوا سلامت شهروندان را تهدید می‌کند. "
                "خودرو فرسوده سهم بزرگ در آلودگی دارد. "
                "کارشناسان کاهش تردد خودرو را پیشنهاد دادند."
            ),
        },
    ]


@pytest.fixture()
def small_corpus(tmp_path, small_docs, pipeline) -> CorpusStore:
    path = tmp_path / "corpus.jsonl"
    path.write_text(
        "\n".join(json.dumps(d, ensure_ascii=False) for d in small_docs),
        encoding="utf-8",
    )
    return ingest(path, pipeline)


@pytest.fixture()
def small_config(tmp_path):
    return load_config(data_dir=tmp_path / "data", embed_dim=48, env={})


@pytest.fixture(scope="session")
def ner(pipeline):
    cfg = load_config(env={})
    return make_ner(cfg, pipeline)


def write_jsonl(path: Path, docs: list[dict]) -> Path:
    path.write_text(
        "\n".join(json.dumps(d, ensure_ascii=False) for d in docs), encoding="utf-8"
    )
    return path


def make_doc(doc_id: str, title: str, body: str, **kw) -> RawDocument:
    pipe = TextPipeline.default()
    return RawDocument(
        id=doc_id, title=pipe.normalize(title), body=pipe.normalize(body), **kw
    )

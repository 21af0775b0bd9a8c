"""Command-line interface.

Local commands operate directly on the data directory; `search` can also
run as a thin client against a running service with --server, printing
the same output either way. All score output uses six decimals, matching
the HTTP serialization.
"""

from __future__ import annotations

import json
from pathlib import Path

import click

from . import evalkit
from .config import EngineConfig, load_config
from .corpus import ingest as ingest_corpus
from .corpus import load_store, save_store
from .engine import (
    CORPUS_FILE,
    Engine,
    build_all,
    corpus_stats,
    is_current,
    load_engine,
    make_ner,
    make_pipeline,
)
from .errors import CoperError, InputError, ParseError
from .keywords import extract_keywords_scored
from .textproc import RawDocument


def _fail(exc: Exception) -> "click.ClickException":
    return click.ClickException(str(exc))


def _config(ctx: click.Context) -> EngineConfig:
    try:
        return load_config(ctx.obj.get("config_path"), data_dir=ctx.obj.get("data_dir"))
    except CoperError as exc:
        raise _fail(exc)


def _engine(ctx: click.Context) -> Engine:
    try:
        return load_engine(_config(ctx))
    except CoperError as exc:
        raise _fail(exc)


@click.group()
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Configuration file (key=value lines).",
)
@click.option(
    "--data-dir",
    type=click.Path(file_okay=False, path_type=Path),
    default=None,
    help="Directory for corpus and index artifacts.",
)
@click.pass_context
def main(ctx: click.Context, config_path: Path | None, data_dir: Path | None) -> None:
    """Two-stage document search: BM25 candidates, query-adaptive fusion."""
    ctx.ensure_object(dict)
    ctx.obj["config_path"] = config_path
    ctx.obj["data_dir"] = data_dir


@main.command()
@click.argument("jsonl", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.pass_context
def ingest(ctx: click.Context, jsonl: Path) -> None:
    """Normalize a JSONL corpus into the data directory."""
    config = _config(ctx)
    try:
        pipeline = make_pipeline(config)
        store = ingest_corpus(jsonl, pipeline)
        Path(config.data_dir).mkdir(parents=True, exist_ok=True)
        save_store(store, Path(config.data_dir) / CORPUS_FILE)
    except CoperError as exc:
        raise _fail(exc)
    click.echo(f"ingested {len(store)} documents")
    click.echo(f"snapshot {store.hash}")


@main.command()
@click.option("--rebuild", is_flag=True, help="Rebuild even if artifacts are current.")
@click.pass_context
def build(ctx: click.Context, rebuild: bool) -> None:
    """Build the lexical index, noun phrases, and document vectors."""
    config = _config(ctx)
    corpus_path = Path(config.data_dir) / CORPUS_FILE
    if not corpus_path.is_file():
        raise click.ClickException(f"no corpus at {corpus_path}; run ingest first")
    try:
        store = load_store(corpus_path)
        if not rebuild and is_current(config, store):
            click.echo("artifacts are current; use --rebuild to force")
            return
        built = build_all(store, config)
    except CoperError as exc:
        raise _fail(exc)
    click.echo(f"built {len(store)} documents into {config.data_dir}")
    click.echo(f"snapshot {built.snapshot}")


def _print_results(omega: float, rows: list[dict]) -> None:
    click.echo(f"# omega {omega:.6f}")
    for row in rows:
        click.echo(
            "\t".join(
                [
                    str(row["rank"]),
                    row["doc_id"],
                    f"{row['jss']:.6f}",
                    f"{row['bm25']:.6f}",
                    f"{row['tfidf_sim']:.6f}",
                    f"{row['sem_sim']:.6f}",
                    row["title"],
                ]
            )
        )


@main.command()
@click.argument("query")
@click.option("--k", type=int, default=None, help="Results to return.")
@click.option("--omega", type=float, default=None, help="Fusion weight override.")
@click.option("--server", default=None, help="Query a running service instead.")
@click.pass_context
def search(
    ctx: click.Context,
    query: str,
    k: int | None,
    omega: float | None,
    server: str | None,
) -> None:
    """Search the corpus; print rank, id, scores, and title per line."""
    if omega is not None and not 0.0 <= omega <= 1.0:
        raise click.ClickException(f"omega must be within [0, 1], got {omega}")
    if server is not None:
        import httpx

        payload: dict = {"query": query}
        if k is not None:
            payload["k"] = k
        if omega is not None:
            payload["omega"] = omega
        try:
            response = httpx.post(
                server.rstrip("/") + "/api/search", json=payload, timeout=30.0
            )
        except httpx.HTTPError as exc:
            raise click.ClickException(f"cannot reach {server}: {exc}")
        if response.status_code != 200:
            raise click.ClickException(
                f"server answered {response.status_code}: {response.text}"
            )
        body = response.json()
        _print_results(body["omega"], body["results"])
        return

    loaded = _engine(ctx)
    try:
        results = loaded.search(query, k=k, omega=omega)
        shown_omega = (
            results[0].omega
            if results
            else (omega if omega is not None else loaded.analyze_query(query).omega)
        )
    except CoperError as exc:
        raise _fail(exc)
    _print_results(
        shown_omega,
        [
            {
                "rank": r.rank,
                "doc_id": r.doc_id,
                "jss": r.jss,
                "bm25": r.bm25,
                "tfidf_sim": r.tfidf_sim,
                "sem_sim": r.sem_sim,
                "title": loaded.doc(r.doc_id).title,
            }
            for r in results
        ],
    )


@main.command()
@click.option(
    "--doc",
    "doc_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    required=True,
    help="JSON file with id, title, and body fields.",
)
@click.option("--k", type=int, default=10, help="Keywords to extract.")
@click.pass_context
def keywords(ctx: click.Context, doc_path: Path, k: int) -> None:
    """Extract the top keywords of one document."""
    config = _config(ctx)
    try:
        record = json.loads(doc_path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise click.ClickException(f"cannot read document: {exc}")
    if not isinstance(record, dict) or not all(
        isinstance(record.get(key), str) for key in ("id", "title", "body")
    ):
        raise click.ClickException("document needs string fields id, title, body")
    try:
        pipeline = make_pipeline(config)
        ner = make_ner(config, pipeline)
        doc = RawDocument(
            id=record["id"],
            title=pipeline.normalize(record["title"]),
            body=pipeline.normalize(record["body"]),
        )
        extracted = extract_keywords_scored(
            doc, k, pipeline=pipeline, ner=ner, max_ngram=config.max_ngram
        )
    except CoperError as exc:
        raise _fail(exc)
    for rank, (phrase, score) in enumerate(extracted, start=1):
        click.echo(f"{rank}\t{phrase.text}\t{score:.6f}")


@main.command(name="eval")
@click.option(
    "--run",
    "run_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    required=True,
)
@click.option(
    "--qrels",
    "qrels_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    required=True,
)
@click.option(
    "--sts",
    "sts_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Similarity table enabling the ASTS column.",
)
@click.option("--k", type=int, default=10)
@click.option("--json", "as_json", is_flag=True, help="Emit the JSON report.")
def eval_cmd(
    run_path: Path,
    qrels_path: Path,
    sts_path: Path | None,
    k: int,
    as_json: bool,
) -> None:
    """Score a run file against judgments."""
    try:
        run = evalkit.load_run(run_path)
        qrels = evalkit.load_qrels(qrels_path)
        oracle = evalkit.FileStsOracle.from_file(sts_path) if sts_path else None
        report = evalkit.evaluate(run, qrels, oracle=oracle, k=k)
    except (ParseError, InputError) as exc:
        raise _fail(exc)
    click.echo(report.to_json() if as_json else report.to_tsv(), nl=False)
    if not as_json:
        for warning in report.warnings:
            click.echo(f"warning: {warning}", err=True)


@main.command()
@click.option("--json", "as_json", is_flag=True, help="Emit the JSON report.")
@click.pass_context
def stats(ctx: click.Context, as_json: bool) -> None:
    """Corpus statistics: monthly top noun-phrase words, word counts."""
    config = _config(ctx)
    corpus_path = Path(config.data_dir) / CORPUS_FILE
    if not corpus_path.is_file():
        raise click.ClickException(f"no corpus at {corpus_path}; run ingest first")
    try:
        if is_current(config):
            report = load_engine(config).stats()
        else:
            store = load_store(corpus_path)
            pipeline = make_pipeline(config)
            ner = make_ner(config, pipeline)
            phrases = {
                doc.id: [
                    phrase.text
                    for phrase, _ in extract_keywords_scored(
                        doc,
                        config.keywords_per_doc,
                        pipeline=pipeline,
                        ner=ner,
                        max_ngram=config.max_ngram,
                    )
                ]
                for doc in store.docs
            }
            report = corpus_stats(store, phrases, pipeline)
    except CoperError as exc:
        raise _fail(exc)
    click.echo(report.to_json() if as_json else report.to_tsv(), nl=False)


@main.command(name="run")
@click.option(
    "--queries",
    "queries_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    required=True,
    help="TSV of query_id and query text.",
)
@click.option(
    "--out",
    "out_path",
    type=click.Path(dir_okay=False, path_type=Path),
    required=True,
)
@click.option("--k", type=int, default=None, help="Results per query.")
@click.option("--tag", default="coper", help="Run tag for the output file.")
@click.pass_context
def run_cmd(
    ctx: click.Context,
    queries_path: Path,
    out_path: Path,
    k: int | None,
    tag: str,
) -> None:
    """Search a batch of queries and write a scoreable run file."""
    loaded = _engine(ctx)
    queries: list[tuple[str, str]] = []
    seen: set[str] = set()
    for lineno, line in enumerate(
        queries_path.read_text(encoding="utf-8").splitlines(), 1
    ):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise _fail(
                ParseError(
                    f"expected 2 tab-separated fields, got {len(fields)}",
                    path=str(queries_path),
                    line=lineno,
                )
            )
        query_id, text = fields[0].strip(), fields[1]
        if not query_id or query_id in seen:
            raise _fail(
                ParseError(
                    f"missing or duplicate query id {query_id!r}",
                    path=str(queries_path),
                    line=lineno,
                )
            )
        seen.add(query_id)
        queries.append((query_id, text))
    try:
        run = {
            query_id: [(r.doc_id, r.jss) for r in loaded.search(text, k=k)]
            for query_id, text in queries
        }
        evalkit.write_run(out_path, run, tag=tag)
    except CoperError as exc:
        raise _fail(exc)
    click.echo(f"wrote {sum(len(v) for v in run.values())} lines to {out_path}")


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
@click.option(
    "--static",
    "static_dir",
    type=click.Path(file_okay=False, path_type=Path),
    default=None,
    help="Directory of UI files to serve at /.",
)
@click.pass_context
def serve(ctx: click.Context, host: str, port: int, static_dir: Path | None) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    config = _config(ctx)
    if static_dir is None:
        candidate = Path("frontend") / "dist"
        if candidate.is_dir():
            static_dir = candidate
    app = create_app(config, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()

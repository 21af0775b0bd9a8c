import json

import pytest
from click.testing import CliRunner

from coper.cli import main
from coper.engine import CORPUS_FILE, INDEX_FILE, META_FILE, PHRASES_FILE, VECTORS_FILE


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def corpus_file(tmp_path, small_docs):
    path = tmp_path / "docs.jsonl"
    path.write_text(
        "\n".join(json.dumps(d, ensure_ascii=False) for d in small_docs),
        encoding="utf-8",
    )
    return path


@pytest.fixture()
def conf_file(tmp_path):
    # keep CLI builds small and fast
    path = tmp_path / "coper.conf"
    path.write_text("embed_dim = 48\n", encoding="utf-8")
    return path


def cli(runner, conf_file, data_dir, *args):
    result = runner.invoke(
        main,
        ["--config", str(conf_file), "--data-dir", str(data_dir), *args],
        catch_exceptions=False,
    )
    return result


@pytest.fixture()
def built_dir(runner, corpus_file, conf_file, tmp_path):
    data_dir = tmp_path / "data"
    assert cli(runner, conf_file, data_dir, "ingest", str(corpus_file)).exit_code == 0
    assert cli(runner, conf_file, data_dir, "build").exit_code == 0
    return data_dir


class TestIngest:
    def test_reports_count_and_snapshot(self, runner, corpus_file, conf_file, tmp_path):
        data_dir = tmp_path / "data"
        result = cli(runner, conf_file, data_dir, "ingest", str(corpus_file))
        assert result.exit_code == 0
        assert "ingested 5 documents" in result.output
        assert "snapshot " in result.output
        assert (data_dir / CORPUS_FILE).is_file()

    def test_rejects_duplicate_ids(self, runner, conf_file, tmp_path):
        bad = tmp_path / "docs.jsonl"
        record = {"id": "d1", "title": "آ", "body": "ب"}
        bad.write_text(
            "\n".join(json.dumps(record, ensure_ascii=False) for _ in range(2)),
            encoding="utf-8",
        )
        result = cli(runner, conf_file, tmp_path / "data", "ingest", str(bad))
        assert result.exit_code != 0
        assert "duplicate" in result.output

    def test_missing_file_fails(self, runner, conf_file, tmp_path):
        result = runner.invoke(
            main,
            [
                "--config",
                str(conf_file),
                "--data-dir",
                str(tmp_path / "data"),
                "ingest",
                str(tmp_path / "nope.jsonl"),
            ],
        )
        assert result.exit_code != 0


class TestBuild:
    def test_builds_artifacts(self, runner, corpus_file, conf_file, tmp_path):
        data_dir = tmp_path / "data"
        cli(runner, conf_file, data_dir, "ingest", str(corpus_file))
        result = cli(runner, conf_file, data_dir, "build")
        assert result.exit_code == 0
        assert "built 5 documents" in result.output
        for name in (CORPUS_FILE, INDEX_FILE, VECTORS_FILE, PHRASES_FILE, META_FILE):
            assert (data_dir / name).is_file()

    def test_skips_when_current(self, runner, built_dir, conf_file):
        result = cli(runner, conf_file, built_dir, "build")
        assert result.exit_code == 0
        assert "current" in result.output

    def test_rebuild_flag_forces(self, runner, built_dir, conf_file):
        result = cli(runner, conf_file, built_dir, "build", "--rebuild")
        assert result.exit_code == 0
        assert "built 5 documents" in result.output

    def test_requires_ingest_first(self, runner, conf_file, tmp_path):
        result = cli(runner, conf_file, tmp_path / "data", "build")
        assert result.exit_code != 0
        assert "ingest first" in result.output


class TestSearch:
    def test_prints_ranked_rows(self, runner, built_dir, conf_file):
        result = cli(runner, conf_file, built_dir, "search", "هوش مصنوعی چیست؟")
        assert result.exit_code == 0
        lines = result.output.splitlines()
        assert lines[0].startswith("# omega ")
        first = lines[1].split("\t")
        assert first[0] == "1"
        assert first[1] == "d1"
        # four score columns, six decimals each
        for cell in first[2:6]:
            assert len(cell.split(".")[1]) == 6
        assert first[6] == "هوش مصنوعی در پزشکی"

    def test_k_option(self, runner, built_dir, conf_file):
        result = cli(
            runner, conf_file, built_dir, "search", "هوش اقتصاد فوتبال", "--k", "1"
        )
        rows = [l for l in result.output.splitlines() if not l.startswith("#")]
        assert len(rows) == 1

    def test_omega_option_changes_header(self, runner, built_dir, conf_file):
        result = cli(
            runner, conf_file, built_dir, "search", "هوش", "--omega", "1.0"
        )
        assert result.output.splitlines()[0] == "# omega 1.000000"

    def test_bad_omega_rejected(self, runner, built_dir, conf_file):
        result = runner.invoke(
            main,
            [
                "--config",
                str(conf_file),
                "--data-dir",
                str(built_dir),
                "search",
                "هوش",
                "--omega",
                "1.5",
            ],
        )
        assert result.exit_code != 0
        assert "omega" in result.output

    def test_no_hits_prints_header_only(self, runner, built_dir, conf_file):
        result = cli(runner, conf_file, built_dir, "search", "zzz")
        assert result.exit_code == 0
        lines = result.output.splitlines()
        assert len(lines) == 1
        assert lines[0].startswith("# omega ")

    def test_search_without_build_fails(self, runner, conf_file, tmp_path):
        result = runner.invoke(
            main,
            [
                "--config",
                str(conf_file),
                "--data-dir",
                str(tmp_path / "data"),
                "search",
                "هوش",
            ],
        )
        assert result.exit_code != 0

    def test_server_mode_matches_local_output(
        self, runner, built_dir, conf_file, monkeypatch
    ):
        """--server must print byte-identical output to local mode."""
        from fastapi.testclient import TestClient

        import coper.cli as cli_mod
        from coper.config import load_config
        from coper.service import create_app

        local = cli(runner, conf_file, built_dir, "search", "هوش مصنوعی چیست؟")

        config = load_config(conf_file, env={}, data_dir=built_dir)
        app = create_app(config)
        client = TestClient(app)
        client.__enter__()

        class FakeHttpx:
            HTTPError = Exception

            @staticmethod
            def post(url, json=None, timeout=None):
                assert url == "http://fake/api/search"
                return client.post("/api/search", json=json)

        monkeypatch.setitem(__import__("sys").modules, "httpx", FakeHttpx)
        try:
            remote = cli(
                runner,
                conf_file,
                built_dir,
                "search",
                "هوش مصنوعی چیست؟",
                "--server",
                "http://fake",
            )
        finally:
            client.__exit__(None, None, None)
        assert remote.exit_code == 0
        assert remote.output == local.output


class TestKeywords:
    def test_extracts_from_file(self, runner, conf_file, tmp_path, small_docs):
        doc_file = tmp_path / "doc.json"
        doc_file.write_text(
            json.dumps(small_docs[0], ensure_ascii=False), encoding="utf-8"
        )
        result = cli(
            runner, conf_file, tmp_path / "data", "keywords", "--doc", str(doc_file)
        )
        assert result.exit_code == 0
        lines = result.output.splitlines()
        assert lines
        first = lines[0].split("\t")
        assert first[0] == "1"
        assert len(first) == 3
        assert len(first[2].split(".")[1]) == 6

    def test_k_limits(self, runner, conf_file, tmp_path, small_docs):
        doc_file = tmp_path / "doc.json"
        doc_file.write_text(
            json.dumps(small_docs[0], ensure_ascii=False), encoding="utf-8"
        )
        result = cli(
            runner,
            conf_file,
            tmp_path / "data",
            "keywords",
            "--doc",
            str(doc_file),
            "--k",
            "2",
        )
        assert len(result.output.splitlines()) <= 2

    def test_rejects_malformed_doc(self, runner, conf_file, tmp_path):
        doc_file = tmp_path / "doc.json"
        doc_file.write_text('{"id": "d1"}', encoding="utf-8")
        result = runner.invoke(
            main,
            [
                "--config",
                str(conf_file),
                "--data-dir",
                str(tmp_path / "data"),
                "keywords",
                "--doc",
                str(doc_file),
            ],
        )
        assert result.exit_code != 0
        assert "string fields" in result.output


class TestEval:
    @pytest.fixture()
    def files(self, tmp_path):
        run = tmp_path / "run.txt"
        run.write_text(
            "q1 Q0 d1 1 0.900000 t\nq1 Q0 d2 2 0.500000 t\n", encoding="utf-8"
        )
        qrels = tmp_path / "qrels.txt"
        qrels.write_text("q1 0 d1 2\nq1 0 d2 0\n", encoding="utf-8")
        sts = tmp_path / "sts.tsv"
        sts.write_text("q1\td1\t5.0\nq1\td2\t3.0\n", encoding="utf-8")
        return run, qrels, sts

    def test_tsv_report(self, runner, files):
        run, qrels, _ = files
        result = runner.invoke(
            main, ["eval", "--run", str(run), "--qrels", str(qrels), "--k", "2"]
        )
        assert result.exit_code == 0
        assert "P@2" in result.output
        assert "MEAN" in result.output

    def test_json_report_with_sts(self, runner, files):
        run, qrels, sts = files
        result = runner.invoke(
            main,
            [
                "eval",
                "--run",
                str(run),
                "--qrels",
                str(qrels),
                "--sts",
                str(sts),
                "--k",
                "2",
                "--json",
            ],
        )
        assert result.exit_code == 0
        data = json.loads(result.output)
        assert data["queries"]["q1"]["precision"] == 0.5
        assert data["queries"]["q1"]["asts"] == 4.0

    def test_parse_error_surfaces(self, runner, files, tmp_path):
        _, qrels, _ = files
        bad = tmp_path / "bad_run.txt"
        bad.write_text("q1 Q0 d1 2 0.9 t\n", encoding="utf-8")
        result = runner.invoke(
            main, ["eval", "--run", str(bad), "--qrels", str(qrels)]
        )
        assert result.exit_code != 0
        assert "rank" in result.output


class TestStats:
    def test_tsv_from_built_artifacts(self, runner, built_dir, conf_file):
        result = cli(runner, conf_file, built_dir, "stats")
        assert result.exit_code == 0
        assert result.output.startswith("month\tword\tcount")
        assert "d1\t" in result.output

    def test_json_without_build(self, runner, corpus_file, conf_file, tmp_path):
        data_dir = tmp_path / "data"
        cli(runner, conf_file, data_dir, "ingest", str(corpus_file))
        result = cli(runner, conf_file, data_dir, "stats", "--json")
        assert result.exit_code == 0
        data = json.loads(result.output)
        assert data["documents"] == 5

    def test_stats_same_built_or_not(self, runner, built_dir, conf_file, tmp_path):
        built = cli(runner, conf_file, built_dir, "stats", "--json")
        # fresh directory: ingest only, stats recomputes phrases
        import shutil

        fresh = tmp_path / "fresh"
        fresh.mkdir()
        shutil.copy(built_dir / CORPUS_FILE, fresh / CORPUS_FILE)
        unbuilt = cli(runner, conf_file, fresh, "stats", "--json")
        assert json.loads(built.output) == json.loads(unbuilt.output)

    def test_requires_corpus(self, runner, conf_file, tmp_path):
        result = cli(runner, conf_file, tmp_path / "data", "stats")
        assert result.exit_code != 0
        assert "ingest first" in result.output


class TestRunCommand:
    @pytest.fixture()
    def queries_file(self, tmp_path):
        path = tmp_path / "queries.tsv"
        path.write_text(
            "q1\tهوش مصنوعی چیست؟\nq2\tاقتصاد دیجیتال\n# comment\n", encoding="utf-8"
        )
        return path

    def test_writes_scoreable_run(
        self, runner, built_dir, conf_file, queries_file, tmp_path
    ):
        out = tmp_path / "out.run"
        result = cli(
            runner,
            conf_file,
            built_dir,
            "run",
            "--queries",
            str(queries_file),
            "--out",
            str(out),
            "--k",
            "3",
        )
        assert result.exit_code == 0
        from coper.evalkit import load_run

        run = load_run(out)
        assert set(run) == {"q1", "q2"}
        assert run["q1"][0][0] == "d1"

    def test_custom_tag(self, runner, built_dir, conf_file, queries_file, tmp_path):
        out = tmp_path / "out.run"
        cli(
            runner,
            conf_file,
            built_dir,
            "run",
            "--queries",
            str(queries_file),
            "--out",
            str(out),
            "--tag",
            "trial7",
        )
        assert out.read_text(encoding="utf-8").splitlines()[0].endswith(" trial7")

    def test_duplicate_query_id_rejected(
        self, runner, built_dir, conf_file, tmp_path
    ):
        bad = tmp_path / "queries.tsv"
        bad.write_text("q1\tالف\nq1\tب\n", encoding="utf-8")
        result = runner.invoke(
            main,
            [
                "--config",
                str(conf_file),
                "--data-dir",
                str(built_dir),
                "run",
                "--queries",
                str(bad),
                "--out",
                str(tmp_path / "out.run"),
            ],
        )
        assert result.exit_code != 0
        assert "duplicate" in result.output

    def test_bad_field_count_rejected(self, runner, built_dir, conf_file, tmp_path):
        bad = tmp_path / "queries.tsv"
        bad.write_text("q1 missing tab\n", encoding="utf-8")
        result = runner.invoke(
            main,
            [
                "--config",
                str(conf_file),
                "--data-dir",
                str(built_dir),
                "run",
                "--queries",
                str(bad),
                "--out",
                str(tmp_path / "out.run"),
            ],
        )
        assert result.exit_code != 0


class TestTopLevel:
    def test_help(self, runner):
        result = runner.invoke(main, ["--help"])
        assert result.exit_code == 0
        for command in ("ingest", "build", "search", "keywords", "eval", "stats", "run", "serve"):
            assert command in result.output

    def test_missing_config_file(self, runner, tmp_path):
        result = runner.invoke(
            main, ["--config", str(tmp_path / "nope.conf"), "stats"]
        )
        assert result.exit_code != 0

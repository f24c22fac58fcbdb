from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from storykg.cli import main


@pytest.fixture()
def runner():
    return CliRunner()


def base_args(tmp_path, fixtures_dir, *, cassette=True):
    args = [
        "--workspace", str(tmp_path / "ws"),
        "--config", str(fixtures_dir / "fixture_config.yaml"),
    ]
    if cassette:
        args += ["--cassette", str(fixtures_dir / "cassettes" / "demo.jsonl")]
    return args


def run_ok(runner, args):
    result = runner.invoke(main, args)
    assert result.exit_code == 0, result.output
    return result


class TestHappyPath:
    def test_ingest_build_export_dot(self, runner, tmp_path, fixtures_dir):
        base = base_args(tmp_path, fixtures_dir, cassette=False)
        result = run_ok(
            runner, base + ["ingest", "--input", str(fixtures_dir / "transcript.csv")]
        )
        body = json.loads(result.output)
        assert body["rows_retained"] == 111

        run_ok(runner, base + ["build", "traditional"])
        result = run_ok(runner, base + ["export", "graph", "--format", "dot"])
        out = json.loads(result.output)
        assert out["path"].endswith("traditional.dot")
        assert (tmp_path / "ws" / "exports" / "traditional.dot").exists()

    def test_query_local_replay(self, runner, tmp_path, fixtures_dir):
        base = base_args(tmp_path, fixtures_dir)
        run_ok(runner, base + ["ingest", "--input", str(fixtures_dir / "transcript.csv")])
        run_ok(runner, base + ["--replay", "build", "graphrag"])
        result = run_ok(
            runner, base + ["--replay", "query", "--mode", "local", "Who found the body?"]
        )
        answer = json.loads(result.output)
        assert answer["mode"] == "local"
        assert answer["declined"] is False
        assert "Mr.S" in answer["text"]

    def test_analyze_sentiment_no_llm_needed(self, runner, tmp_path, fixtures_dir):
        base = base_args(tmp_path, fixtures_dir, cassette=False)
        run_ok(runner, base + ["ingest", "--input", str(fixtures_dir / "transcript.csv")])
        result = run_ok(runner, base + ["analyze", "sentiment"])
        body = json.loads(result.output)
        assert body["segments"] == 111


class TestFailures:
    def test_build_graphrag_without_ingest_names_artifact(self, runner, tmp_path, fixtures_dir):
        base = base_args(tmp_path, fixtures_dir)
        result = runner.invoke(main, base + ["build", "graphrag"])
        assert result.exit_code == 1
        assert "chunks.jsonl" in result.output
        assert "ingest" in result.output

    def test_unknown_flag_exits_2(self, runner):
        result = runner.invoke(main, ["ingest", "--frobnicate"])
        assert result.exit_code == 2

    def test_conflicting_mode_flags_exit_2(self, runner, tmp_path):
        result = runner.invoke(
            main, ["--replay", "--live", "--workspace", str(tmp_path), "build", "traditional"]
        )
        assert result.exit_code == 2

    def test_query_without_question_exits_2(self, runner, tmp_path):
        result = runner.invoke(main, ["--workspace", str(tmp_path), "query"])
        assert result.exit_code == 2

    def test_missing_input_file_exits_1(self, runner, tmp_path):
        result = runner.invoke(
            main, ["--workspace", str(tmp_path / "ws"), "ingest", "--input", "/nope.csv"]
        )
        assert result.exit_code == 1
        assert "not found" in result.output


class TestDeterminism:
    def test_replay_outputs_byte_identical(self, runner, tmp_path, fixtures_dir):
        outputs = []
        for attempt in range(2):
            ws = tmp_path / f"ws{attempt}"
            base = [
                "--workspace", str(ws),
                "--config", str(fixtures_dir / "fixture_config.yaml"),
                "--cassette", str(fixtures_dir / "cassettes" / "demo.jsonl"),
                "--seed", "42",
            ]
            run_ok(runner, base + ["ingest", "--input", str(fixtures_dir / "transcript.csv")])
            run_ok(runner, base + ["--replay", "build", "graphrag"])
            run_ok(runner, base + ["analyze", "sentiment"])
            outputs.append(
                {
                    "preprocessed": (ws / "preprocessed.csv").read_bytes(),
                    "chunks": (ws / "chunks.jsonl").read_bytes(),
                    "graph": (ws / "graphrag" / "graph.json").read_bytes(),
                    "reports": (ws / "graphrag" / "community_reports.jsonl").read_bytes(),
                    "sentiment": (ws / "analysis" / "sentiment.csv").read_bytes(),
                    "manifest": (ws / "manifest.json").read_bytes(),
                }
            )
        assert outputs[0] == outputs[1]


def test_batch_query_file(runner, tmp_path, fixtures_dir):
    base = base_args(tmp_path, fixtures_dir)
    run_ok(runner, base + ["ingest", "--input", str(fixtures_dir / "transcript.csv")])
    run_ok(runner, base + ["--replay", "build", "graphrag"])
    questions_file = tmp_path / "questions.json"
    questions_file.write_text(json.dumps(["Who found the body?", "Where was the body found?"]))
    result = run_ok(
        runner,
        base + ["--replay", "query", "--mode", "local", "--questions-file", str(questions_file)],
    )
    lines = [json.loads(l) for l in result.output.strip().splitlines()]
    assert len(lines) == 2
    assert all(l["mode"] == "local" for l in lines)

from __future__ import annotations

import warnings

import pytest

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    from fastapi.testclient import TestClient

from storykg.service.app import create_app


@pytest.fixture()
def client():
    return TestClient(create_app())


@pytest.fixture()
def ingested(client, tmp_path, fixtures_dir):
    workspace = tmp_path / "ws"
    response = client.post(
        "/ingest",
        json={
            "workspace": str(workspace),
            "config": str(fixtures_dir / "fixture_config.yaml"),
            "input_csv": str(fixtures_dir / "transcript.csv"),
        },
    )
    assert response.status_code == 200, response.text
    return workspace, response.json()


def test_health(client):
    body = client.get("/health").json()
    assert body["status"] == "ok"


def test_ingest_counts(ingested):
    workspace, body = ingested
    assert body["rows_parsed"] == 114
    assert body["rows_retained"] == 111
    assert body["rows_dropped"] == 3
    assert (workspace / "preprocessed.csv").exists()
    assert (workspace / "chunks.jsonl").exists()
    assert (workspace / "manifest.json").exists()


def test_build_traditional_and_export(client, ingested, tmp_path):
    workspace, _ = ingested
    response = client.post("/build/traditional", json={"workspace": str(workspace)})
    assert response.status_code == 200, response.text
    body = response.json()
    assert body["nodes"] > 10
    assert body["edges"] > 10

    response = client.post(
        "/export/graph",
        json={"workspace": str(workspace), "graph": "auto", "format": "dot"},
    )
    assert response.status_code == 200
    out = response.json()
    assert out["graph"] == "traditional"
    assert out["path"].endswith(".dot")


def test_missing_artifact_is_409_with_path(client, tmp_path):
    response = client.post("/build/graphrag", json={"workspace": str(tmp_path / "empty")})
    assert response.status_code == 409
    body = response.json()
    assert body["error"] == "ArtifactMissingError"
    assert "chunks.jsonl" in body["detail"]
    assert "ingest" in body["detail"]


def test_validation_error_is_422(client, tmp_path):
    response = client.post(
        "/ingest",
        json={"workspace": str(tmp_path / "ws"), "input_csv": "/nonexistent.csv"},
    )
    assert response.status_code == 422
    assert "not found" in response.json()["detail"]


def test_unknown_query_mode_is_422(client, ingested):
    workspace, _ = ingested
    response = client.post(
        "/query",
        json={"workspace": str(workspace), "question": "q", "mode": "psychic"},
    )
    assert response.status_code == 422


def test_replay_cassette_miss_is_409(client, ingested, tmp_path, fixtures_dir):
    workspace, _ = ingested
    empty_cassette = tmp_path / "empty.jsonl"
    empty_cassette.write_text("")
    response = client.post(
        "/build/graphrag",
        json={
            "workspace": str(workspace),
            "config": str(fixtures_dir / "fixture_config.yaml"),
            "llm": {"mode": "replay", "cassette": str(empty_cassette)},
        },
    )
    assert response.status_code == 409
    assert response.json()["error"] == "CassetteMissError"


def test_analyze_sentiment_endpoint(client, ingested):
    workspace, _ = ingested
    response = client.post(
        "/analyze/sentiment", json={"workspace": str(workspace), "window": 5}
    )
    assert response.status_code == 200, response.text
    body = response.json()
    assert body["segments"] == 111
    assert body["window"] == 5
    assert body["penalty"] > 0
    assert (workspace / "analysis" / "sentiment.csv").exists()
    assert (workspace / "analysis" / "sentiment.svg").exists()


def test_full_replay_flow_via_service(client, ingested, fixtures_dir):
    workspace, _ = ingested
    llm = {"mode": "replay", "cassette": str(fixtures_dir / "cassettes" / "demo.jsonl")}
    config = str(fixtures_dir / "fixture_config.yaml")

    response = client.post(
        "/build/graphrag",
        json={"workspace": str(workspace), "config": config, "llm": llm},
    )
    assert response.status_code == 200, response.text
    body = response.json()
    assert body["nodes"] == 16
    assert body["edges"] == 15
    assert body["levels"] == 2

    response = client.post(
        "/query",
        json={
            "workspace": str(workspace),
            "config": config,
            "question": "Who found the body?",
            "mode": "local",
            "llm": llm,
        },
    )
    assert response.status_code == 200, response.text
    answer = response.json()
    assert answer["mode"] == "local"
    assert "Mr.S" in answer["text"]
    assert answer["declined"] is False
    assert answer["context_refs"]["entities"]

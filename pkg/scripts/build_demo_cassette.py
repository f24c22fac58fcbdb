"""Record the demo cassette by driving the service with the scripted provider.

Runs the full pipeline (ingest, graphrag build, the showcase queries, the
analytics, the evaluation suites) against the demo fixtures in record mode,
writing fixtures/cassettes/demo.jsonl and the golden preprocessed CSV. The
exact same requests replayed against the shipped cassette must then succeed
with no live provider.

Regenerate with:  python3 scripts/build_demo_cassette.py
"""

from __future__ import annotations

import json
import shutil
import sys
import tempfile
import warnings
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "scripts"))

from demo_provider import DemoTransport  # noqa: E402

import storykg.pipeline as pipeline  # noqa: E402

ROOT_FIXTURES = ROOT / "fixtures"
CASSETTE = ROOT_FIXTURES / "cassettes" / "demo.jsonl"

SHOWCASE_QUESTIONS = [
    "Who found the body?",
    "Who found Hae Min Lee's body?",
    "Where was the body found?",
]


def patched_gateway_factory():
    transport = DemoTransport()
    original = pipeline.make_gateway

    def factory(config, mode, cassette, transport_arg=None):
        return original(config, mode, cassette, transport=transport)

    return factory


def main() -> None:
    warnings.filterwarnings("ignore")
    from fastapi.testclient import TestClient

    from storykg.service.app import create_app

    pipeline.make_gateway = patched_gateway_factory()

    if CASSETTE.exists():
        CASSETTE.unlink()
    CASSETTE.parent.mkdir(parents=True, exist_ok=True)

    workdir = Path(tempfile.mkdtemp(prefix="storykg-demo-"))
    client = TestClient(create_app())

    def post(endpoint: str, payload: dict) -> dict:
        response = client.post(endpoint, json=payload)
        if response.status_code >= 400:
            raise SystemExit(f"{endpoint} failed: {response.status_code} {response.text}")
        return response.json()

    base = {
        "workspace": str(workdir),
        "config": str(ROOT_FIXTURES / "fixture_config.yaml"),
    }
    llm = {"mode": "record", "cassette": str(CASSETTE)}

    r = post("/ingest", {**base, "input_csv": str(ROOT_FIXTURES / "transcript.csv")})
    print(f"ingest: {r['rows_parsed']} rows -> {r['rows_retained']} retained, {r['chunks']} chunks")

    r = post("/build/graphrag", {**base, "llm": llm})
    print(f"graphrag: {r['nodes']} nodes, {r['edges']} edges, {r['communities']} communities")

    # sanity: the mosque and the park must land in different level-1 communities
    graph = json.loads((workdir / "graphrag" / "graph.json").read_text())
    level1 = graph["hierarchy"]["levels"][0]
    mosque = next(b for b in level1 if "islamicsocietyofbaltimore" in b)
    park = next(b for b in level1 if "leakinpark" in b)
    if mosque == park:
        raise SystemExit("fixture clustering failed: mosque and park share a community")
    print(f"clusters ok: mosque block {len(mosque)} nodes, park block {len(park)} nodes")

    for question in SHOWCASE_QUESTIONS:
        for mode in ("local", "global", "naive_rag", "naive_llm"):
            post("/query", {**base, "question": question, "mode": mode, "llm": llm})
    print(f"queries recorded for {len(SHOWCASE_QUESTIONS)} questions x 4 modes")

    post("/analyze/sentiment", base)
    r = post("/analyze/hearsay", {**base, "llm": llm})
    print(f"hearsay: {r['hearsay_count']}/{r['chunks']} chunks flagged")
    r = post("/analyze/keywords", {**base, "llm": llm})
    print(f"keywords: {r['communities']} communities")

    r = post(
        "/eval/corpus",
        {**base, "corpus": str(ROOT_FIXTURES / "question_corpus.json"), "llm": llm},
    )
    print(f"eval corpus: {r['verdicts']} verdicts, totals {r['totals']}")

    r = post(
        "/eval/adversarial",
        {
            **base,
            "cases": str(ROOT_FIXTURES / "adversarial_cases.json"),
            "grades": str(ROOT_FIXTURES / "adversarial_grades.json"),
            "llm": llm,
        },
    )
    print(f"eval adversarial: {r['outcome_cells']} cells, {r['pending']} pending")

    shutil.copy(workdir / "preprocessed.csv", ROOT_FIXTURES / "expected_preprocessed.csv")
    entries = sum(1 for _ in CASSETTE.open())
    print(f"cassette: {entries} entries at {CASSETTE}")
    print(f"golden preprocessed CSV refreshed; scratch workspace: {workdir}")


if __name__ == "__main__":
    main()

"""Command-line client for the pipeline service.

The CLI is a thin HTTP client. By default it mounts the service in-process
(no sockets, replay-friendly); pass --server to talk to a running instance
instead. Exit codes: 0 success, 1 pipeline failure, 2 usage error.
"""

from __future__ import annotations

import json
import sys
import warnings
from pathlib import Path
from typing import Optional

import click
import httpx

DEFAULT_MODES = ["local", "global", "naive_rag", "naive_llm"]


class ClientSettings:
    def __init__(
        self,
        server: Optional[str],
        workspace: str,
        config: Optional[str],
        llm_mode: str,
        cassette: Optional[str],
        seed: Optional[int],
    ) -> None:
        self.server = server
        self.workspace = workspace
        self.config = config
        self.llm_mode = llm_mode
        self.cassette = cassette
        self.seed = seed
        self._client: Optional[httpx.Client] = None

    def client(self) -> httpx.Client:
        if self._client is None:
            if self.server:
                self._client = httpx.Client(base_url=self.server, timeout=600.0)
            else:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    from fastapi.testclient import TestClient

                    from .service.app import create_app
                self._client = TestClient(create_app())
        return self._client

    def base_payload(self) -> dict:
        payload: dict = {"workspace": self.workspace}
        if self.config:
            payload["config"] = self.config
        if self.seed is not None:
            payload["seed"] = self.seed
        return payload

    def llm_payload(self) -> dict:
        return {"mode": self.llm_mode, "cassette": self.cassette}

    def post(self, endpoint: str, payload: dict) -> dict:
        response = self.client().post(endpoint, json=payload)
        body = _json_body(response)
        if response.status_code >= 400:
            detail = body.get("detail", body) if isinstance(body, dict) else body
            raise click.ClickException(str(detail))
        return body


def _json_body(response: httpx.Response):
    try:
        return response.json()
    except ValueError:
        return {"detail": response.text}


def _emit(data: dict) -> None:
    click.echo(json.dumps(data, indent=2, ensure_ascii=False))


def _mode_from_flags(replay: bool, record: bool, live: bool) -> str:
    chosen = [name for name, flag in (("replay", replay), ("record", record), ("live", live)) if flag]
    if len(chosen) > 1:
        raise click.UsageError("choose at most one of --replay / --record / --live")
    return chosen[0] if chosen else "replay"


@click.group()
@click.option("--server", default=None, help="Service URL; default runs the service in-process.")
@click.option("--workspace", default="workspace", show_default=True, help="Run directory.")
@click.option("--config", "config_path", default=None, type=click.Path(), help="Config file (YAML).")
@click.option("--replay", is_flag=True, help="Serve LLM calls from the cassette only (default).")
@click.option("--record", is_flag=True, help="Call the provider and record to the cassette.")
@click.option("--live", is_flag=True, help="Call the provider without recording.")
@click.option("--cassette", default=None, type=click.Path(), help="Cassette file for record/replay.")
@click.option("--seed", default=None, type=int, help="Override the configured seed.")
@click.pass_context
def main(ctx, server, workspace, config_path, replay, record, live, cassette, seed):
    """Transcript ingest, knowledge-graph builds, queries, analytics, evaluation."""
    ctx.obj = ClientSettings(
        server=server,
        workspace=workspace,
        config=config_path,
        llm_mode=_mode_from_flags(replay, record, live),
        cassette=cassette,
        seed=seed,
    )


@main.command()
@click.option("--input", "input_csv", required=True, type=click.Path(), help="Transcript CSV.")
@click.pass_obj
def ingest(settings: ClientSettings, input_csv: str):
    """Parse, preprocess, label, filter, and chunk a transcript."""
    payload = settings.base_payload()
    payload["input_csv"] = input_csv
    _emit(settings.post("/ingest", payload))


@main.group()
def build():
    """Build a knowledge graph from the ingested chunks."""


@build.command("traditional")
@click.pass_obj
def build_traditional(settings: ClientSettings):
    """Rule-based triple extraction into a count-weighted graph."""
    _emit(settings.post("/build/traditional", settings.base_payload()))


@build.command("graphrag")
@click.pass_obj
def build_graphrag(settings: ClientSettings):
    """LLM extraction with gleaning, hierarchy clustering, summary reports."""
    payload = settings.base_payload()
    payload["llm"] = settings.llm_payload()
    _emit(settings.post("/build/graphrag", payload))


@main.command()
@click.argument("question", required=False)
@click.option(
    "--mode",
    type=click.Choice(["local", "global", "naive-rag", "naive-llm"]),
    default="local",
    show_default=True,
)
@click.option("--k", default=None, type=int, help="Entities/chunks to retrieve.")
@click.option("--level", default=None, type=int, help="Hierarchy level for global search.")
@click.option("--budget", default=None, type=int, help="Context token budget.")
@click.option(
    "--questions-file",
    default=None,
    type=click.Path(),
    help="Batch mode: JSON array of question strings; outputs one record per line.",
)
@click.pass_obj
def query(settings: ClientSettings, question, mode, k, level, budget, questions_file):
    """Ask one question (or a batch file) in one of the four query modes."""
    if question is None and questions_file is None:
        raise click.UsageError("provide a QUESTION or --questions-file")
    questions = [question] if question is not None else json.loads(
        Path(questions_file).read_text("utf-8")
    )
    for q in questions:
        payload = settings.base_payload()
        payload.update(
            {
                "question": q,
                "mode": mode.replace("-", "_"),
                "k": k,
                "level": level,
                "budget": budget,
                "llm": settings.llm_payload(),
            }
        )
        answer = settings.post("/query", payload)
        if len(questions) == 1:
            _emit(answer)
        else:
            click.echo(json.dumps(answer, ensure_ascii=False))


@main.group()
def analyze():
    """Narrative analytics over the ingested corpus."""


@analyze.command("sentiment")
@click.option("--window", default=None, type=int, help="Rolling-average window.")
@click.option("--penalty", default=None, type=float, help="Change-point penalty.")
@click.pass_obj
def analyze_sentiment(settings: ClientSettings, window, penalty):
    """Per-segment sentiment, smoothing, and change-point detection."""
    payload = settings.base_payload()
    payload.update({"window": window, "penalty": penalty})
    _emit(settings.post("/analyze/sentiment", payload))


@analyze.command("hearsay")
@click.pass_obj
def analyze_hearsay(settings: ClientSettings):
    """Classify each chunk as hearsay or not, plus 5-class sentiment."""
    payload = settings.base_payload()
    payload["llm"] = settings.llm_payload()
    _emit(settings.post("/analyze/hearsay", payload))


@analyze.command("keywords")
@click.option("--level", default=None, type=int, help="Only communities at this level.")
@click.pass_obj
def analyze_keywords(settings: ClientSettings, level):
    """Top-10 keyword reports for each community."""
    payload = settings.base_payload()
    payload.update({"level": level, "llm": settings.llm_payload()})
    _emit(settings.post("/analyze/keywords", payload))


@main.group("eval")
def eval_group():
    """Evaluation harness: question corpus and adversarial suite."""


@eval_group.command("corpus")
@click.option("--questions", "corpus_path", required=True, type=click.Path())
@click.option(
    "--modes",
    default=",".join(DEFAULT_MODES),
    show_default=True,
    help="Comma-separated query modes to compare.",
)
@click.pass_obj
def eval_corpus(settings: ClientSettings, corpus_path, modes):
    """Answer every question in every mode, judge pairwise, tally wins."""
    payload = settings.base_payload()
    payload.update(
        {
            "corpus": corpus_path,
            "modes": [m.strip().replace("-", "_") for m in modes.split(",") if m.strip()],
            "llm": settings.llm_payload(),
        }
    )
    _emit(settings.post("/eval/corpus", payload))


@eval_group.command("adversarial")
@click.option("--cases", "cases_path", required=True, type=click.Path())
@click.option("--grades", "grades_path", default=None, type=click.Path())
@click.option("--modes", default=",".join(DEFAULT_MODES), show_default=True)
@click.pass_obj
def eval_adversarial(settings: ClientSettings, cases_path, grades_path, modes):
    """Run trap prompts against every mode; outcomes come from the grades file."""
    payload = settings.base_payload()
    payload.update(
        {
            "cases": cases_path,
            "grades": grades_path,
            "modes": [m.strip().replace("-", "_") for m in modes.split(",") if m.strip()],
            "llm": settings.llm_payload(),
        }
    )
    _emit(settings.post("/eval/adversarial", payload))


@main.group("export")
def export_group():
    """Export build artifacts."""


@export_group.command("graph")
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["graphml", "dot", "csv"]),
    default="graphml",
    show_default=True,
)
@click.option(
    "--graph",
    "graph_name",
    type=click.Choice(["traditional", "graphrag", "auto"]),
    default="auto",
    show_default=True,
)
@click.option("--output", default=None, type=click.Path())
@click.pass_obj
def export_graph_cmd(settings: ClientSettings, fmt, graph_name, output):
    """Write a built graph as GraphML, DOT, or triples CSV."""
    payload = settings.base_payload()
    payload.update({"graph": graph_name, "format": fmt, "output": output})
    _emit(settings.post("/export/graph", payload))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    sys.exit(main())

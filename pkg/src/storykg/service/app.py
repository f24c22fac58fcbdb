"""FastAPI application wrapping the pipeline.

Each endpoint is a thin adapter: validate the request model, build the
effective config (flags > file > defaults), run the pipeline function, and
return its dict through the response model. Pipeline errors map onto HTTP
statuses; the CLI turns non-2xx responses into exit code 1.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__, pipeline
from ..config import PipelineConfig, load_config
from ..errors import (
    ArtifactMissingError,
    CassetteMissError,
    ConfigError,
    NotFoundError,
    StorykgError,
    StructuredOutputError,
    TemplateError,
    TransportError,
    ValidationError,
)
from ..workspace import Workspace
from . import schemas

_STATUS_BY_ERROR = (
    (ValidationError, 422),
    (TemplateError, 422),
    (ConfigError, 422),
    (NotFoundError, 404),
    (ArtifactMissingError, 409),
    (CassetteMissError, 409),
    (TransportError, 502),
    (StructuredOutputError, 502),
)


def _status_for(exc: StorykgError) -> int:
    for klass, status in _STATUS_BY_ERROR:
        if isinstance(exc, klass):
            return status
    return 500


def _effective_config(request: schemas.BaseRequest) -> PipelineConfig:
    overrides = dict(request.overrides)
    if request.seed is not None:
        overrides["seed"] = request.seed
    return load_config(request.config, overrides)


def _gateway(request, config: PipelineConfig):
    return pipeline.make_gateway(config, request.llm.mode, request.llm.cassette)


def _require_chunks(ws: Workspace) -> None:
    ws.require(ws.chunks_path, "ingest")


def _require_graphrag(ws: Workspace) -> None:
    ws.require(ws.graphrag_graph_path, "build graphrag")


def create_app() -> FastAPI:
    app = FastAPI(
        title="storykg",
        version=__version__,
        description=(
            "Knowledge-graph construction, retrieval, and narrative analytics "
            "over transcript corpora."
        ),
    )

    @app.exception_handler(StorykgError)
    async def pipeline_error_handler(_: Request, exc: StorykgError) -> JSONResponse:
        return JSONResponse(
            status_code=_status_for(exc),
            content=schemas.ErrorResponse(
                error=type(exc).__name__, detail=str(exc)
            ).model_dump(),
        )

    @app.get("/health", response_model=schemas.HealthResponse)
    def health() -> schemas.HealthResponse:
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/ingest", response_model=schemas.IngestResponse)
    def ingest(request: schemas.IngestRequest) -> dict:
        config = _effective_config(request)
        return pipeline.run_ingest(request.input_csv, Workspace(request.workspace), config)

    @app.post("/build/traditional", response_model=schemas.BuildTraditionalResponse)
    def build_traditional(request: schemas.BuildTraditionalRequest) -> dict:
        config = _effective_config(request)
        return pipeline.run_build_traditional(Workspace(request.workspace), config)

    @app.post("/build/graphrag", response_model=schemas.BuildGraphragResponse)
    def build_graphrag(request: schemas.BuildGraphragRequest) -> dict:
        config = _effective_config(request)
        ws = Workspace(request.workspace)
        _require_chunks(ws)
        return pipeline.run_build_graphrag(ws, config, _gateway(request, config))

    @app.post("/query", response_model=schemas.AnswerResponse)
    def query(request: schemas.QueryRequest) -> dict:
        config = _effective_config(request)
        if request.mode not in schemas.QUERY_MODES:
            raise ValidationError(
                f"unknown query mode {request.mode!r}; expected one of {schemas.QUERY_MODES}"
            )
        if request.mode != "naive_llm":
            _require_graphrag(Workspace(request.workspace))
        return pipeline.run_query(
            Workspace(request.workspace),
            config,
            _gateway(request, config),
            request.question,
            request.mode,
            k=request.k,
            level=request.level,
            budget=request.budget,
        )

    @app.post("/analyze/sentiment", response_model=schemas.AnalyzeSentimentResponse)
    def analyze_sentiment(request: schemas.AnalyzeSentimentRequest) -> dict:
        overrides = dict(request.overrides)
        if request.window is not None:
            overrides["analytics.rolling_window"] = request.window
        if request.penalty is not None:
            overrides["analytics.pelt_penalty"] = request.penalty
        request = request.model_copy(update={"overrides": overrides})
        config = _effective_config(request)
        return pipeline.run_analyze_sentiment(Workspace(request.workspace), config)

    @app.post("/analyze/hearsay", response_model=schemas.AnalyzeHearsayResponse)
    def analyze_hearsay(request: schemas.AnalyzeHearsayRequest) -> dict:
        config = _effective_config(request)
        ws = Workspace(request.workspace)
        _require_chunks(ws)
        return pipeline.run_analyze_hearsay(ws, config, _gateway(request, config))

    @app.post("/analyze/keywords", response_model=schemas.AnalyzeKeywordsResponse)
    def analyze_keywords(request: schemas.AnalyzeKeywordsRequest) -> dict:
        config = _effective_config(request)
        ws = Workspace(request.workspace)
        ws.require(ws.community_reports_path, "build graphrag")
        return pipeline.run_analyze_keywords(
            ws, config, _gateway(request, config), level=request.level
        )

    @app.post("/eval/corpus", response_model=schemas.EvalCorpusResponse)
    def eval_corpus(request: schemas.EvalCorpusRequest) -> dict:
        config = _effective_config(request)
        if any(m != "naive_llm" for m in request.modes):
            _require_graphrag(Workspace(request.workspace))
        return pipeline.run_eval_corpus(
            Workspace(request.workspace),
            config,
            _gateway(request, config),
            request.corpus,
            request.modes,
        )

    @app.post("/eval/adversarial", response_model=schemas.EvalAdversarialResponse)
    def eval_adversarial(request: schemas.EvalAdversarialRequest) -> dict:
        config = _effective_config(request)
        if any(m != "naive_llm" for m in request.modes):
            _require_graphrag(Workspace(request.workspace))
        return pipeline.run_eval_adversarial(
            Workspace(request.workspace),
            config,
            _gateway(request, config),
            request.cases,
            request.modes,
            grades_path=request.grades,
        )

    @app.post("/export/graph", response_model=schemas.ExportResponse)
    def export(request: schemas.ExportRequest) -> dict:
        return pipeline.run_export(
            Workspace(request.workspace),
            request.graph,
            request.format,
            output=request.output,
        )

    return app


app = create_app()

"""Request/response models for the HTTP service.

Requests name a workspace directory plus the knobs for one pipeline step;
LLM-backed steps also carry the gateway settings (mode + cassette path).
"""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field

from ..retrieval import MODES as QUERY_MODES  # noqa: F401  (re-exported for clients)


class LlmRunSettings(BaseModel):
    mode: str = "replay"  # live | record | replay
    cassette: Optional[str] = None


class BaseRequest(BaseModel):
    workspace: str
    config: Optional[str] = None  # path to a user config file
    seed: Optional[int] = None
    overrides: dict[str, object] = Field(default_factory=dict)


class HealthResponse(BaseModel):
    status: str
    version: str


class IngestRequest(BaseRequest):
    input_csv: str


class IngestResponse(BaseModel):
    rows_parsed: int
    rows_retained: int
    rows_dropped: int
    chunks: int
    chunk_size: int
    preprocessed_csv: str
    chunk_store: str


class BuildTraditionalRequest(BaseRequest):
    pass


class BuildTraditionalResponse(BaseModel):
    graph: str
    nodes: int
    edges: int
    top_by_degree: list[list]
    graph_path: str


class BuildGraphragRequest(BaseRequest):
    llm: LlmRunSettings = Field(default_factory=LlmRunSettings)


class BuildGraphragResponse(BaseModel):
    graph: str
    nodes: int
    edges: int
    levels: int
    communities: int
    extraction_records: int
    graph_path: str


class QueryRequest(BaseRequest):
    question: str
    mode: str = "local"
    k: Optional[int] = None
    level: Optional[int] = None
    budget: Optional[int] = None
    llm: LlmRunSettings = Field(default_factory=LlmRunSettings)


class ContextRefsModel(BaseModel):
    entities: list[str] = Field(default_factory=list)
    communities: list[str] = Field(default_factory=list)
    chunks: list[str] = Field(default_factory=list)


class AnswerResponse(BaseModel):
    question: str
    mode: str
    text: str
    context_refs: ContextRefsModel
    declined: bool


class AnalyzeSentimentRequest(BaseRequest):
    window: Optional[int] = None
    penalty: Optional[float] = None


class AnalyzeSentimentResponse(BaseModel):
    segments: int
    window: int
    penalty: float
    changepoint_indices: list[int]
    changepoint_labels: list[str]
    csv_path: str
    svg_path: str


class AnalyzeHearsayRequest(BaseRequest):
    llm: LlmRunSettings = Field(default_factory=LlmRunSettings)


class AnalyzeHearsayResponse(BaseModel):
    chunks: int
    hearsay_count: int
    hearsay_rate: float
    crosstab: dict[str, dict[str, float]]
    records_path: str
    crosstab_csv: str
    crosstab_txt: str


class AnalyzeKeywordsRequest(BaseRequest):
    level: Optional[int] = None
    llm: LlmRunSettings = Field(default_factory=LlmRunSettings)


class KeywordReportModel(BaseModel):
    community_id: str
    keywords: list[str]
    uniqueness_note: str


class AnalyzeKeywordsResponse(BaseModel):
    communities: int
    reports: list[KeywordReportModel]
    keywords_path: str


class EvalCorpusRequest(BaseRequest):
    corpus: str
    modes: list[str] = Field(
        default_factory=lambda: ["local", "global", "naive_rag", "naive_llm"]
    )
    llm: LlmRunSettings = Field(default_factory=LlmRunSettings)


class EvalCorpusResponse(BaseModel):
    questions: int
    modes: list[str]
    cells: int
    failed_cells: int
    verdicts: int
    excluded_questions: list[str]
    wins: dict[str, dict[str, int]]
    totals: dict[str, int]
    win_table_text: str
    answers_path: str
    verdicts_path: str


class EvalAdversarialRequest(BaseRequest):
    cases: str
    grades: Optional[str] = None
    modes: list[str] = Field(
        default_factory=lambda: ["local", "global", "naive_rag", "naive_llm"]
    )
    llm: LlmRunSettings = Field(default_factory=LlmRunSettings)


class AdversarialOutcomeModel(BaseModel):
    case_id: str
    mode: str
    answer_text: str
    declined: bool
    outcome: Optional[str]


class EvalAdversarialResponse(BaseModel):
    cases: int
    modes: list[str]
    outcome_cells: int
    pending: int
    report_text: str
    outcomes: list[AdversarialOutcomeModel]
    outcomes_path: str


class ExportRequest(BaseRequest):
    graph: str = "auto"  # traditional | graphrag | auto
    format: str = "graphml"
    output: Optional[str] = None


class ExportResponse(BaseModel):
    graph: str
    format: str
    path: str


class ErrorResponse(BaseModel):
    error: str
    detail: str

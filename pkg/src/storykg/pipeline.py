"""Pipeline orchestration: one function per service operation.

These are the operations the HTTP layer exposes and the CLI drives. Each
one loads what it needs from the workspace, runs the core modules, persists
results, and returns a plain dict ready for a response model.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional, Sequence

from . import analytics, builder, evaluation, extraction, ingest, retrieval
from .changepoint import default_penalty, pelt_changepoints
from .config import PipelineConfig
from .errors import ValidationError
from .gateway import LlmGateway, Transport
from .kg import export_graph, graph_stats
from .workspace import Workspace


def make_gateway(
    config: PipelineConfig,
    mode: str,
    cassette: str | Path | None,
    transport: Transport | None = None,
) -> LlmGateway:
    return LlmGateway(
        config.llm, mode=mode, cassette_path=cassette, transport=transport
    )


def run_ingest(input_csv: str | Path, ws: Workspace, config: PipelineConfig) -> dict:
    """Parse, preprocess, label/filter, and chunk a transcript CSV."""
    segments = ingest.parse_transcript(input_csv, config.ingest.columns)
    preprocessed = [
        ingest.preprocess_segment(s, config.preprocess) for s in segments
    ]
    labeled = ingest.label_and_filter(preprocessed, config.preprocess)
    chunks = ingest.chunk_segments(labeled, config.ingest.chunk_size)
    ws.ensure_root()
    ingest.write_preprocessed_csv(labeled, ws.preprocessed_path)
    ws.save_chunks(chunks)
    ws.write_config(config)
    ws.write_manifest(config)
    return {
        "rows_parsed": len(segments),
        "rows_retained": len(labeled),
        "rows_dropped": len(segments) - len(labeled),
        "chunks": len(chunks),
        "chunk_size": config.ingest.chunk_size,
        "preprocessed_csv": str(ws.preprocessed_path),
        "chunk_store": str(ws.chunks_path),
    }


def run_build_traditional(ws: Workspace, config: PipelineConfig) -> dict:
    """Rule-based triple extraction over the chunk store."""
    chunks = ws.load_chunks()
    graph = extraction.build_traditional_kg(chunks)
    ws.save_graph(graph, ws.traditional_graph_path)
    stats = graph_stats(graph)
    return {
        "graph": "traditional",
        "nodes": stats["node_count"],
        "edges": stats["edge_count"],
        "top_by_degree": [[eid, deg] for eid, deg in stats["top_by_degree"][:5]],
        "graph_path": str(ws.traditional_graph_path),
    }


def run_build_graphrag(
    ws: Workspace, config: PipelineConfig, gateway: LlmGateway
) -> dict:
    """Gleaning extraction, assembly, hierarchy, and summary reports."""
    chunks = ws.load_chunks()
    records: list[builder.ExtractionRecord] = []
    for chunk in chunks:
        records.extend(
            builder.extract_with_gleaning(
                chunk, gateway, max_gleanings=config.build.max_gleanings
            )
        )
    state = builder.assemble_graph(
        records, prune_min_mentions=config.build.prune_min_mentions
    )
    hierarchy = builder.cluster_hierarchy(
        state.graph,
        max_levels=config.build.max_levels,
        resolution_schedule=config.build.resolution_schedule,
        seed=config.seed,
    )
    state.graph.set_hierarchy(hierarchy)
    reports = builder.generate_reports(state, hierarchy, gateway)
    ws.save_graph(state.graph, ws.graphrag_graph_path)
    ws.save_reports(reports)
    meta = {
        "seed": config.seed,
        "max_gleanings": config.build.max_gleanings,
        "resolution_schedule": config.build.resolution_schedule,
        "prune_min_mentions": config.build.prune_min_mentions,
        "levels": hierarchy.h,
        "communities": len(reports.community_reports),
    }
    ws.build_meta_path.write_text(
        json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    stats = graph_stats(state.graph)
    return {
        "graph": "graphrag",
        "nodes": stats["node_count"],
        "edges": stats["edge_count"],
        "levels": hierarchy.h,
        "communities": len(reports.community_reports),
        "extraction_records": len(records),
        "graph_path": str(ws.graphrag_graph_path),
    }


def load_artifacts(ws: Workspace) -> retrieval.Artifacts:
    graph = ws.load_graph(ws.graphrag_graph_path, "build graphrag")
    reports = ws.load_reports()
    chunks = ws.load_chunks()
    return retrieval.Artifacts(graph=graph, reports=reports, chunks=chunks)


def run_query(
    ws: Workspace,
    config: PipelineConfig,
    gateway: LlmGateway,
    question: str,
    mode: str,
    *,
    k: Optional[int] = None,
    level: Optional[int] = None,
    budget: Optional[int] = None,
) -> dict:
    artifacts = load_artifacts(ws) if mode != "naive_llm" else None
    if k is None:
        k = (
            config.retrieval.top_k_chunks
            if mode == "naive_rag"
            else config.retrieval.top_k_entities
        )
    answer = retrieval.run_query(
        question,
        mode,
        artifacts,
        gateway,
        k=k,
        level=level if level is not None else config.retrieval.global_level,
        budget=budget if budget is not None else config.retrieval.context_budget,
        top_chunks=config.retrieval.top_k_chunks,
    )
    return answer.to_dict()


def run_analyze_sentiment(ws: Workspace, config: PipelineConfig) -> dict:
    """Per-segment scores, rolling smoothing, and change-point detection."""
    labeled = ingest.read_preprocessed_csv(
        ws.require(ws.preprocessed_path, "ingest")
    )
    lexicon = analytics.load_lexicon(config.analytics.lexicon_path)
    series = analytics.score_segments(
        [(label, segment.text) for label, segment in labeled],
        lexicon,
        alpha=config.analytics.sentiment_alpha,
    )
    series = analytics.smooth_series(series, window=config.analytics.rolling_window)
    penalty = (
        config.analytics.pelt_penalty
        if config.analytics.pelt_penalty is not None
        else default_penalty(series.scores)
    )
    changepoints = pelt_changepoints(series.scores, penalty)
    ws.analysis_dir.mkdir(parents=True, exist_ok=True)
    csv_path = ws.analysis_dir / "sentiment.csv"
    svg_path = ws.analysis_dir / "sentiment.svg"
    analytics.write_sentiment_csv(series, changepoints, csv_path)
    analytics.write_sentiment_svg(series, changepoints, svg_path)
    labels = [label.rendered for label, _ in series.points]
    return {
        "segments": len(series.points),
        "window": config.analytics.rolling_window,
        "penalty": changepoints.penalty,
        "changepoint_indices": list(changepoints.indices),
        "changepoint_labels": [labels[i] for i in changepoints.indices],
        "csv_path": str(csv_path),
        "svg_path": str(svg_path),
    }


def run_analyze_hearsay(
    ws: Workspace, config: PipelineConfig, gateway: LlmGateway
) -> dict:
    """Hearsay + 5-class sentiment per chunk, cross-tabulated."""
    chunks = ws.load_chunks()
    records = analytics.classify_chunks(chunks, gateway)
    table = analytics.crosstab_hearsay_sentiment(records)
    ws.analysis_dir.mkdir(parents=True, exist_ok=True)
    records_path = ws.analysis_dir / "hearsay.jsonl"
    with records_path.open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(
                json.dumps(
                    {
                        "chunk_id": record.chunk_id,
                        "is_hearsay": record.is_hearsay,
                        "explanation": record.explanation,
                        "sentiment_class": record.sentiment_class,
                    },
                    ensure_ascii=False,
                    sort_keys=True,
                )
                + "\n"
            )
    crosstab_csv = ws.analysis_dir / "crosstab.csv"
    crosstab_txt = ws.analysis_dir / "crosstab.txt"
    table.to_csv(crosstab_csv)
    crosstab_txt.write_text(table.render_text() + "\n", encoding="utf-8")
    hearsay_count = sum(1 for r in records if r.is_hearsay)
    return {
        "chunks": len(records),
        "hearsay_count": hearsay_count,
        "hearsay_rate": (hearsay_count / len(records)) if records else 0.0,
        "crosstab": {
            row: table.percentages(row) for row in analytics.CROSSTAB_ROWS
        },
        "records_path": str(records_path),
        "crosstab_csv": str(crosstab_csv),
        "crosstab_txt": str(crosstab_txt),
    }


def run_analyze_keywords(
    ws: Workspace, config: PipelineConfig, gateway: LlmGateway, level: Optional[int] = None
) -> dict:
    """Top-10 keyword reports for each community summary."""
    reports = ws.load_reports()
    chosen = [
        r
        for r in reports.community_reports
        if level is None or r.level == level
    ]
    if not chosen:
        raise ValidationError(
            f"no community reports at level {level}; run 'build graphrag' first"
        )
    keyword_reports = [analytics.extract_keywords(r, gateway) for r in chosen]
    ws.analysis_dir.mkdir(parents=True, exist_ok=True)
    path = ws.analysis_dir / "keywords.jsonl"
    with path.open("w", encoding="utf-8") as fh:
        for report in keyword_reports:
            fh.write(
                json.dumps(
                    {
                        "community_id": report.community_id,
                        "keywords": list(report.keywords),
                        "uniqueness_note": report.uniqueness_note,
                    },
                    ensure_ascii=False,
                    sort_keys=True,
                )
                + "\n"
            )
    return {
        "communities": len(keyword_reports),
        "reports": [
            {
                "community_id": r.community_id,
                "keywords": list(r.keywords),
                "uniqueness_note": r.uniqueness_note,
            }
            for r in keyword_reports
        ],
        "keywords_path": str(path),
    }


def run_eval_corpus(
    ws: Workspace,
    config: PipelineConfig,
    gateway: LlmGateway,
    corpus_path: str | Path,
    modes: Sequence[str],
) -> dict:
    """Answer matrix + judge verdicts + win tally, all persisted."""
    corpus = evaluation.load_corpus(corpus_path)
    needs_artifacts = any(m != "naive_llm" for m in modes)
    artifacts = load_artifacts(ws) if needs_artifacts else None
    cells = evaluation.run_corpus(
        corpus,
        modes,
        artifacts,
        gateway,
        k=config.retrieval.top_k_entities,
        level=config.retrieval.global_level,
        budget=config.retrieval.context_budget,
        top_chunks=config.retrieval.top_k_chunks,
    )
    verdicts, excluded = evaluation.judge_all(
        corpus, cells, gateway, seed=config.seed
    )
    table = evaluation.tally(verdicts, modes=modes)
    ws.eval_dir.mkdir(parents=True, exist_ok=True)
    answers_path = ws.eval_dir / "answers.jsonl"
    with answers_path.open("w", encoding="utf-8") as fh:
        for cell in cells:
            row = {
                "question_id": cell.question_id,
                "mode": cell.mode,
                "error": cell.error,
                "answer": cell.answer.to_dict() if cell.answer else None,
                "fingerprints": list(cell.fingerprints),
            }
            fh.write(json.dumps(row, ensure_ascii=False, sort_keys=True) + "\n")
    verdicts_path = ws.eval_dir / "verdicts.jsonl"
    with verdicts_path.open("w", encoding="utf-8") as fh:
        for verdict in verdicts:
            fh.write(
                json.dumps(
                    {
                        "question_id": verdict.question_id,
                        "metric": verdict.metric,
                        "winner": verdict.winner,
                        "rationale": verdict.rationale,
                    },
                    ensure_ascii=False,
                    sort_keys=True,
                )
                + "\n"
            )
    (ws.eval_dir / "win_table.csv").write_text(table.to_csv_text(), encoding="utf-8")
    (ws.eval_dir / "win_table.txt").write_text(
        table.render_text() + "\n", encoding="utf-8"
    )
    return {
        "questions": len(corpus),
        "modes": list(modes),
        "cells": len(cells),
        "failed_cells": sum(1 for c in cells if c.error),
        "verdicts": len(verdicts),
        "excluded_questions": excluded,
        "wins": {mode: table.wins[mode] for mode in table.modes},
        "totals": {mode: table.total(mode) for mode in table.modes},
        "win_table_text": table.render_text(),
        "answers_path": str(answers_path),
        "verdicts_path": str(verdicts_path),
    }


def run_eval_adversarial(
    ws: Workspace,
    config: PipelineConfig,
    gateway: LlmGateway,
    cases_path: str | Path,
    modes: Sequence[str],
    grades_path: str | Path | None = None,
) -> dict:
    """Trap prompts against every mode; outcomes come from the grading file."""
    cases = evaluation.load_adversarial_cases(cases_path)
    grades = evaluation.load_grades(grades_path)
    needs_artifacts = any(m != "naive_llm" for m in modes)
    artifacts = load_artifacts(ws) if needs_artifacts else None
    outcomes = evaluation.run_adversarial(
        cases,
        modes,
        artifacts,
        gateway,
        grades,
        k=config.retrieval.top_k_entities,
        level=config.retrieval.global_level,
        budget=config.retrieval.context_budget,
        top_chunks=config.retrieval.top_k_chunks,
    )
    report = evaluation.summarize_adversarial(outcomes)
    ws.eval_dir.mkdir(parents=True, exist_ok=True)
    outcomes_path = ws.eval_dir / "adversarial.jsonl"
    with outcomes_path.open("w", encoding="utf-8") as fh:
        for outcome in outcomes:
            fh.write(
                json.dumps(
                    {
                        "case_id": outcome.case_id,
                        "mode": outcome.mode,
                        "answer_text": outcome.answer_text,
                        "declined": outcome.declined,
                        "outcome": outcome.outcome,
                    },
                    ensure_ascii=False,
                    sort_keys=True,
                )
                + "\n"
            )
    (ws.eval_dir / "adversarial_report.txt").write_text(
        report + "\n", encoding="utf-8"
    )
    return {
        "cases": len(cases),
        "modes": list(modes),
        "outcome_cells": len(outcomes),
        "pending": sum(1 for o in outcomes if o.outcome is None),
        "report_text": report,
        "outcomes": [
            {
                "case_id": o.case_id,
                "mode": o.mode,
                "answer_text": o.answer_text,
                "declined": o.declined,
                "outcome": o.outcome,
            }
            for o in outcomes
        ],
        "outcomes_path": str(outcomes_path),
    }


def run_export(
    ws: Workspace,
    graph_name: str,
    fmt: str,
    output: str | Path | None = None,
) -> dict:
    """Export a built graph to graphml / dot / triples CSV."""
    if graph_name == "auto":
        graph_name = "graphrag" if ws.graphrag_graph_path.exists() else "traditional"
    if graph_name == "traditional":
        graph = ws.load_graph(ws.traditional_graph_path, "build traditional")
    elif graph_name == "graphrag":
        graph = ws.load_graph(ws.graphrag_graph_path, "build graphrag")
    else:
        raise ValidationError(
            f"unknown graph {graph_name!r}; expected 'traditional', 'graphrag', or 'auto'"
        )
    suffix = {"graphml": ".graphml", "dot": ".dot", "csv": ".csv", "triples-csv": ".csv"}
    if output is None:
        output = ws.root / "exports" / f"{graph_name}{suffix.get(fmt, '.out')}"
    path = export_graph(graph, fmt, output)
    return {"graph": graph_name, "format": fmt, "path": str(path)}

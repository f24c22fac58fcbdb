"""The four query modes over the build artifacts.

- local: entity-anchored search for specific facts (similar entities, their
  1-hop relations, matching source chunks, covering community reports).
- global: map-reduce over the community reports of one hierarchy level.
- naive_rag: plain top-k chunk retrieval.
- naive_llm: the bare question, no corpus context.

All grounded modes carry a mandatory refusal instruction in the prompt, and
every context item that reaches the model is recorded in `context_refs`.
Budgets are counted in whitespace tokens; items are added whole or not at
all, in priority order entities > relations > chunks > reports.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .builder import BuildReports, CommunityReport, relation_summary_key
from .errors import ValidationError
from .ingest import Chunk, token_count
from .kg import KnowledgeGraph

logger = logging.getLogger(__name__)

MODES = ("local", "global", "naive_rag", "naive_llm")

REFUSAL_MARKERS = (
    "does not specify",
    "unable to answer",
    "cannot provide an answer",
    "cannot answer",
    "no information",
    "not included in the records",
    "insufficient",
)

_MAP_POINT_RE = re.compile(r"SCORE\s+(\d{1,3})\s*:\s*(.+)$")


def is_refusal(text: str) -> bool:
    low = text.lower()
    return any(marker in low for marker in REFUSAL_MARKERS)


@dataclass(frozen=True)
class ContextRefs:
    entities: tuple[str, ...] = ()
    communities: tuple[str, ...] = ()
    chunks: tuple[str, ...] = ()


@dataclass(frozen=True)
class Answer:
    question: str
    mode: str
    text: str
    context_refs: ContextRefs = field(default_factory=ContextRefs)
    declined: bool = False

    def to_dict(self) -> dict:
        return {
            "question": self.question,
            "mode": self.mode,
            "text": self.text,
            "context_refs": {
                "entities": list(self.context_refs.entities),
                "communities": list(self.context_refs.communities),
                "chunks": list(self.context_refs.chunks),
            },
            "declined": self.declined,
        }

    @staticmethod
    def from_dict(data: dict) -> "Answer":
        refs = data.get("context_refs", {})
        return Answer(
            question=data["question"],
            mode=data["mode"],
            text=data["text"],
            context_refs=ContextRefs(
                entities=tuple(refs.get("entities", ())),
                communities=tuple(refs.get("communities", ())),
                chunks=tuple(refs.get("chunks", ())),
            ),
            declined=bool(data.get("declined", False)),
        )


class Artifacts:
    """Frozen build outputs plus lazily computed embedding indexes."""

    def __init__(
        self,
        graph: KnowledgeGraph,
        reports: BuildReports,
        chunks: Sequence[Chunk],
    ) -> None:
        self.graph = graph
        self.reports = reports
        self.chunks = list(chunks)
        self._entity_matrix: Optional[np.ndarray] = None
        self._entity_ids: list[str] = []
        self._chunk_matrix: Optional[np.ndarray] = None

    def reports_at(self, level: int) -> list[CommunityReport]:
        return [r for r in self.reports.community_reports if r.level == level]

    @property
    def max_level(self) -> int:
        levels = [r.level for r in self.reports.community_reports]
        return max(levels) if levels else 0

    def entity_summary_text(self, entity_id: str) -> str:
        entity = self.graph.entities[entity_id]
        summary = self.reports.entity_summaries.get(entity_id, "")
        if not summary:
            summary = entity.description or entity.display_name
        return f"{entity.display_name}: {summary}"

    def entity_index(self, gateway) -> tuple[list[str], np.ndarray]:
        if self._entity_matrix is None:
            self._entity_ids = sorted(self.graph.entities)
            rows = [
                gateway.embed(self.entity_summary_text(eid)).values
                for eid in self._entity_ids
            ]
            self._entity_matrix = np.asarray(rows, dtype=float)
        return self._entity_ids, self._entity_matrix

    def chunk_index(self, gateway) -> np.ndarray:
        if self._chunk_matrix is None:
            rows = [gateway.embed(chunk.text).values for chunk in self.chunks]
            self._chunk_matrix = np.asarray(rows, dtype=float)
        return self._chunk_matrix


def _similarities(matrix: np.ndarray, query: np.ndarray) -> np.ndarray:
    if matrix.size == 0:
        return np.zeros(0)
    norms = np.linalg.norm(matrix, axis=1) * (np.linalg.norm(query) or 1.0)
    norms[norms == 0] = 1.0
    return matrix @ query / norms


class _ContextBudget:
    """Whole-item packing under a token budget; items never get cut mid-way."""

    def __init__(self, budget: int) -> None:
        if budget <= 0:
            raise ValidationError(f"context budget must be > 0, got {budget}")
        self.remaining = budget
        self.lines: list[str] = []

    def try_add(self, line: str) -> bool:
        cost = token_count(line)
        if cost > self.remaining:
            return False
        self.remaining -= cost
        self.lines.append(line)
        return True

    def text(self) -> str:
        return "\n".join(self.lines)


def query_local(
    question: str,
    artifacts: Artifacts,
    gateway,
    k: int = 5,
    budget: int = 8000,
    top_chunks: int = 3,
) -> Answer:
    """Entity-anchored retrieval plus grounded answer generation."""
    if k <= 0:
        raise ValidationError(f"k must be >= 1, got {k}")
    if not artifacts.graph.entities:
        raise ValidationError("cannot run local search on an empty graph")
    query_vec = np.asarray(gateway.embed(question).values)
    entity_ids, matrix = artifacts.entity_index(gateway)
    sims = _similarities(matrix, query_vec)
    ranked = sorted(zip(entity_ids, sims), key=lambda pair: (-pair[1], pair[0]))
    selected = [eid for eid, _ in ranked[:k]]

    ctx = _ContextBudget(budget)
    used_entities: list[str] = []
    used_chunks: list[str] = []
    used_communities: list[str] = []

    ctx.try_add("ENTITIES:")
    for eid in selected:
        if ctx.try_add(f"- {artifacts.entity_summary_text(eid)}"):
            used_entities.append(eid)

    ctx.try_add("RELATIONS:")
    selected_set = set(selected)
    neighbor_triples = sorted(
        (
            t
            for key, t in artifacts.graph.triples.items()
            if key[0] in selected_set or key[2] in selected_set
        ),
        key=lambda t: (-t.weight, t.key),
    )
    for triple in neighbor_triples:
        summary = artifacts.reports.relation_summaries.get(
            relation_summary_key(*triple.key), ""
        )
        line = (
            f"- {artifacts.graph.entities[triple.head].display_name} -> "
            f"{artifacts.graph.entities[triple.tail].display_name}: {triple.relation} "
            f"(weight {triple.weight:g})"
        )
        if summary:
            line += f" | {summary}"
        if ctx.try_add(line):
            for endpoint in (triple.head, triple.tail):
                if endpoint not in used_entities:
                    used_entities.append(endpoint)

    if artifacts.chunks:
        ctx.try_add("SOURCE CHUNKS:")
        chunk_sims = _similarities(artifacts.chunk_index(gateway), query_vec)
        chunk_ranked = sorted(
            zip(artifacts.chunks, chunk_sims), key=lambda pair: (-pair[1], pair[0].id)
        )
        for chunk, _ in chunk_ranked[: max(top_chunks, 0)]:
            if ctx.try_add(f"[{chunk.id}] {chunk.text}"):
                used_chunks.append(chunk.id)

    ctx.try_add("COMMUNITY REPORTS:")
    covering = [
        r
        for r in artifacts.reports.community_reports
        if selected_set & set(r.member_entities)
    ]
    for report in sorted(covering, key=lambda r: (r.level, r.community_id)):
        if ctx.try_add(f"- (community {report.community_id}) {report.summary}"):
            used_communities.append(report.community_id)

    text = gateway.complete(
        "local_answer", {"context": ctx.text(), "question": question}
    )
    return Answer(
        question=question,
        mode="local",
        text=text,
        context_refs=ContextRefs(
            entities=tuple(used_entities),
            communities=tuple(used_communities),
            chunks=tuple(used_chunks),
        ),
        declined=is_refusal(text),
    )


GLOBAL_REFUSAL = "I am unable to answer this question given the provided data."


def query_global(
    question: str,
    artifacts: Artifacts,
    gateway,
    level: Optional[int] = None,
    budget: int = 8000,
) -> Answer:
    """Map relevant points out of each community report, then reduce to an answer."""
    chosen = artifacts.max_level if level is None else level
    reports = artifacts.reports_at(chosen)
    if not reports:
        raise ValidationError(f"no community reports at hierarchy level {chosen}")
    points: list[tuple[int, str, str]] = []  # (score, community_id, point)
    for report in sorted(reports, key=lambda r: r.community_id):
        body = report.summary
        if report.key_findings:
            body += "\n" + "\n".join(f"- {f}" for f in report.key_findings)
        response = gateway.complete(
            "global_map", {"report": body, "question": question}
        )
        for line in response.splitlines():
            m = _MAP_POINT_RE.match(line.strip())
            if m:
                score = max(0, min(100, int(m.group(1))))
                if score > 0:
                    points.append((score, report.community_id, m.group(2).strip()))
    if not points:
        return Answer(
            question=question,
            mode="global",
            text=GLOBAL_REFUSAL,
            context_refs=ContextRefs(),
            declined=True,
        )
    points.sort(key=lambda p: (-p[0], p[1], p[2]))
    ctx = _ContextBudget(budget)
    used_communities: list[str] = []
    for score, community_id, point in points:
        if ctx.try_add(f"- [{score}] {point} (community {community_id})"):
            if community_id not in used_communities:
                used_communities.append(community_id)
    text = gateway.complete(
        "global_reduce", {"points": ctx.text(), "question": question}
    )
    return Answer(
        question=question,
        mode="global",
        text=text,
        context_refs=ContextRefs(communities=tuple(used_communities)),
        declined=is_refusal(text),
    )


def query_naive_rag(
    question: str, artifacts: Artifacts, gateway, k: int = 3
) -> Answer:
    """Top-k chunks by embedding similarity as flat context."""
    if k <= 0:
        raise ValidationError(f"k must be >= 1, got {k}")
    if not artifacts.chunks:
        raise ValidationError("cannot run naive RAG without a chunk store")
    if k > len(artifacts.chunks):
        logger.warning(
            "k=%d exceeds chunk count %d; clamping", k, len(artifacts.chunks)
        )
        k = len(artifacts.chunks)
    query_vec = np.asarray(gateway.embed(question).values)
    sims = _similarities(artifacts.chunk_index(gateway), query_vec)
    ranked = sorted(
        zip(artifacts.chunks, sims), key=lambda pair: (-pair[1], pair[0].id)
    )
    chosen = [chunk for chunk, _ in ranked[:k]]
    context = "\n".join(f"[{chunk.id}] {chunk.text}" for chunk in chosen)
    text = gateway.complete(
        "naive_rag_answer", {"context": context, "question": question}
    )
    return Answer(
        question=question,
        mode="naive_rag",
        text=text,
        context_refs=ContextRefs(chunks=tuple(chunk.id for chunk in chosen)),
        declined=is_refusal(text),
    )


def query_naive_llm(question: str, gateway) -> Answer:
    """The bare question: no corpus context at all."""
    text = gateway.complete("naive_llm_answer", {"question": question})
    return Answer(
        question=question,
        mode="naive_llm",
        text=text,
        context_refs=ContextRefs(),
        declined=is_refusal(text),
    )


def run_query(
    question: str,
    mode: str,
    artifacts: Optional[Artifacts],
    gateway,
    *,
    k: int = 5,
    level: Optional[int] = None,
    budget: int = 8000,
    top_chunks: int = 3,
    rag_k: Optional[int] = None,
) -> Answer:
    """Dispatch one question to the requested mode."""
    if mode not in MODES:
        raise ValidationError(f"unknown query mode {mode!r}; expected one of {MODES}")
    if mode == "naive_llm":
        return query_naive_llm(question, gateway)
    if artifacts is None:
        raise ValidationError(f"mode {mode!r} needs build artifacts")
    if mode == "local":
        return query_local(
            question, artifacts, gateway, k=k, budget=budget, top_chunks=top_chunks
        )
    if mode == "global":
        return query_global(question, artifacts, gateway, level=level, budget=budget)
    return query_naive_rag(question, artifacts, gateway, k=rag_k if rag_k is not None else k)

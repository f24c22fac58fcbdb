"""LLM-driven hierarchical graph construction.

Per chunk: an initial extraction pass plus gleaning follow-ups that ask the
model what it missed, stopping as soon as a pass adds nothing new. Records
are merged order-independently into a graph, clustered into a refinement
hierarchy, and summarized into entity/relation/community reports.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import StorykgError, StructuredOutputError, ValidationError
from .ingest import Chunk
from .kg import Hierarchy, KnowledgeGraph, Triple, canonical
from .leiden import aggregate, leiden_communities

_RECORD_RE = re.compile(r'\(\s*"(entity|relationship)"\s*\|([^()]*)\)')


@dataclass(frozen=True)
class ExtractionRecord:
    chunk_id: str
    entities: tuple[tuple[str, str, str], ...]  # (name, kind, description)
    relations: tuple[tuple[str, str, str, float], ...]  # (head, description, tail, strength)
    gleaning_round: int


@dataclass(frozen=True)
class CommunityReport:
    community_id: str
    level: int
    member_entities: tuple[str, ...]
    summary: str
    key_findings: tuple[str, ...]


@dataclass
class BuildReports:
    entity_summaries: dict[str, str] = field(default_factory=dict)
    relation_summaries: dict[str, str] = field(default_factory=dict)
    community_reports: list[CommunityReport] = field(default_factory=list)


def relation_summary_key(head: str, relation: str, tail: str) -> str:
    return f"{head}|{relation}|{tail}"


# ---------------------------------------------------------------------------
# extraction with gleaning
# ---------------------------------------------------------------------------

def _parse_records(
    text: str,
) -> tuple[list[tuple[str, str, str]], list[tuple[str, str, str, float]]] | None:
    """Parse delimiter records out of a response, tolerating surrounding prose.

    Returns None when the response matches neither records nor an explicit
    nothing-found marker.
    """
    entities: list[tuple[str, str, str]] = []
    relations: list[tuple[str, str, str, float]] = []
    matched_any = False
    for kind, body in _RECORD_RE.findall(text):
        fields = [f.strip().strip('"') for f in body.split("|")]
        # the leading empty field comes from the delimiter after the kind tag
        fields = fields[1:] if fields and fields[0] == "" else fields
        if kind == "entity" and len(fields) >= 3:
            name, etype, desc = fields[0], fields[1], "|".join(fields[2:])
            if name:
                entities.append((name, etype, desc))
                matched_any = True
        elif kind == "relationship" and len(fields) >= 3:
            head, tail = fields[0], fields[1]
            try:
                strength = float(fields[-1])
                desc = "|".join(fields[2:-1])
            except ValueError:
                desc, strength = "|".join(fields[2:]), 1.0
            if head and tail and desc:
                relations.append((head, desc, tail, strength))
                matched_any = True
    if matched_any:
        return entities, relations
    stripped = text.strip()
    if not stripped or stripped.upper().startswith("NONE"):
        return [], []
    return None


def _parse_or_reparse(
    gateway, response: str, chunk: Chunk
) -> tuple[list[tuple[str, str, str]], list[tuple[str, str, str, float]]]:
    parsed = _parse_records(response)
    if parsed is not None:
        return parsed
    retry = gateway.complete(
        "extraction_reparse", {"previous": response, "text": chunk.text}
    )
    parsed = _parse_records(retry)
    if parsed is None:
        raise StructuredOutputError(
            f"extraction output for {chunk.id} unparseable after one reparse attempt",
            raw=retry,
        )
    return parsed


def extract_with_gleaning(
    chunk: Chunk, gateway, max_gleanings: int = 2
) -> list[ExtractionRecord]:
    """Initial extraction plus up to `max_gleanings` passes for missed items.

    Passes stop early once a pass yields nothing new (by canonical identity).
    Rounds are numbered from 0.
    """
    if max_gleanings < 0:
        raise ValidationError(f"max_gleanings must be >= 0, got {max_gleanings}")
    records: list[ExtractionRecord] = []
    known_entities: set[str] = set()
    known_relations: set[tuple[str, str, str]] = set()
    known_display: list[str] = []
    for round_no in range(max_gleanings + 1):
        if round_no == 0:
            response = gateway.complete(
                "entity_relation_extraction", {"text": chunk.text}
            )
        else:
            response = gateway.complete(
                "extraction_gleaning",
                {
                    "known_entities": ", ".join(known_display) or "(none)",
                    "text": chunk.text,
                },
            )
        entities, relations = _parse_or_reparse(gateway, response, chunk)
        new_entities = []
        for name, etype, desc in entities:
            cid = canonical(name)
            if cid not in known_entities:
                known_entities.add(cid)
                known_display.append(name)
                new_entities.append((name, etype, desc))
        new_relations = []
        for head, desc, tail, strength in relations:
            key = (canonical(head), desc, canonical(tail))
            if key not in known_relations:
                known_relations.add(key)
                new_relations.append((head, desc, tail, strength))
                # relation endpoints count as known entities from here on
                for endpoint in (head, tail):
                    cid = canonical(endpoint)
                    if cid not in known_entities:
                        known_entities.add(cid)
                        known_display.append(endpoint)
        records.append(
            ExtractionRecord(
                chunk_id=chunk.id,
                entities=tuple(new_entities),
                relations=tuple(new_relations),
                gleaning_round=round_no,
            )
        )
        if round_no > 0 and not new_entities and not new_relations:
            break
    return records


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------

@dataclass
class AssemblyState:
    """Merged, order-independent view of the extraction records."""

    graph: KnowledgeGraph
    descriptions: dict[str, tuple[str, ...]]  # entity id -> sorted unique descriptions
    mentions: dict[str, int]


def assemble_graph(
    records: Iterable[ExtractionRecord], prune_min_mentions: int = 2
) -> AssemblyState:
    """Merge extraction records into one graph.

    Relations with identical description text aggregate by count; entity
    descriptions are kept as a sorted set so the merge is independent of
    record order. Entities that end up with no relations and fewer than
    `prune_min_mentions` mentions are pruned.
    """
    graph = KnowledgeGraph()
    descriptions: dict[str, set[str]] = {}
    mentions: dict[str, int] = {}
    kinds: dict[str, str] = {}
    displays: dict[str, str] = {}

    def note_entity(name: str, kind: str = "", desc: str = "") -> str:
        cid = canonical(name)
        display = re.sub(r"\s+", " ", name.strip())
        if cid not in displays or display < displays[cid]:
            displays[cid] = display
        mentions[cid] = mentions.get(cid, 0) + 1
        if kind and (cid not in kinds or kind < kinds[cid]):
            kinds[cid] = kind
        if desc:
            descriptions.setdefault(cid, set()).add(desc)
        return cid

    triples: dict[tuple[str, str, str], tuple[float, set[str]]] = {}
    for record in records:
        for name, kind, desc in record.entities:
            note_entity(name, kind, desc)
        for head, desc, tail, _strength in record.relations:
            h = note_entity(head)
            t = note_entity(tail)
            key = (h, desc, t)
            weight, evidence = triples.get(key, (0.0, set()))
            evidence.add(record.chunk_id)
            triples[key] = (weight + 1.0, evidence)

    connected = {h for (h, _, _t) in triples} | {t for (_h, _, t) in triples}
    for cid in sorted(displays):
        if cid not in connected and mentions.get(cid, 0) < prune_min_mentions:
            continue
        desc_list = tuple(sorted(descriptions.get(cid, ())))
        graph.add_entity(
            displays[cid],
            kind=kinds.get(cid),
            description=" ".join(desc_list) if desc_list else None,
        )
    for (h, desc, t) in sorted(triples):
        weight, evidence = triples[(h, desc, t)]
        graph.upsert_triple(
            Triple(
                head=displays[h],
                relation=desc,
                tail=displays[t],
                weight=weight,
                evidence=tuple(sorted(evidence)),
            )
        )
    return AssemblyState(
        graph=graph,
        descriptions={k: tuple(sorted(v)) for k, v in sorted(descriptions.items())},
        mentions=dict(sorted(mentions.items())),
    )


# ---------------------------------------------------------------------------
# hierarchy
# ---------------------------------------------------------------------------

def graph_adjacency(graph: KnowledgeGraph) -> dict[str, dict[str, float]]:
    """Undirected weighted adjacency over all entities (isolated ones included)."""
    adj: dict[str, dict[str, float]] = {eid: {} for eid in graph.entities}
    for (h, _, t), triple in graph.triples.items():
        if h == t:
            adj[h][h] = adj[h].get(h, 0.0) + triple.weight
        else:
            adj[h][t] = adj[h].get(t, 0.0) + triple.weight
            adj[t][h] = adj[t].get(h, 0.0) + triple.weight
    return adj


def cluster_hierarchy(
    graph: KnowledgeGraph,
    max_levels: int = 2,
    resolution_schedule: Sequence[float] = (1.0, 0.5),
    seed: int = 42,
) -> Hierarchy:
    """Build a refinement hierarchy: level l+1 clusters the level-l aggregate.

    Because each level is computed on the aggregate of the previous one, its
    blocks are unions of lower-level blocks, so the refinement property holds
    by construction.
    """
    if graph.node_count() == 0:
        raise ValidationError("cannot cluster an empty graph")
    if max_levels < 1:
        raise ValidationError(f"max_levels must be >= 1, got {max_levels}")
    schedule = list(resolution_schedule)[:max_levels]
    if not schedule:
        raise ValidationError("resolution_schedule is empty")
    adj = graph_adjacency(graph)
    members: dict = {u: frozenset([u]) for u in adj}
    levels: list[list[frozenset[str]]] = []
    current = adj
    for li, resolution in enumerate(schedule):
        parts = leiden_communities(current, resolution, seed + li)
        blocks = [frozenset().union(*(members[u] for u in p)) for p in parts]
        levels.append(blocks)
        ordered = sorted(parts, key=lambda b: min(min(members[u]) for u in b))
        new_members = {
            i: frozenset().union(*(members[u] for u in block))
            for i, block in enumerate(ordered)
        }
        current = aggregate(current, ordered)
        members = new_members
    return Hierarchy.from_blocks(levels)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

def community_id_for(level: int, index: int) -> str:
    return f"L{level}C{index}"


def _parse_report(text: str) -> tuple[str, tuple[str, ...]]:
    summary_match = re.search(r"SUMMARY:\s*(.+?)(?:\nFINDINGS:|\Z)", text, re.S)
    summary = summary_match.group(1).strip() if summary_match else text.strip()
    findings = tuple(
        m.group(1).strip()
        for m in re.finditer(r"^\s*-\s+(.+)$", text.split("FINDINGS:")[-1], re.M)
    ) if "FINDINGS:" in text else ()
    return summary, findings


def generate_reports(
    state: AssemblyState, hierarchy: Hierarchy, gateway
) -> BuildReports:
    """One summary per entity, per relation, and per community block per level."""
    graph = state.graph
    reports = BuildReports()
    for eid in sorted(graph.entities):
        entity = graph.entities[eid]
        observations = state.descriptions.get(eid) or (entity.display_name,)
        reports.entity_summaries[eid] = gateway.complete(
            "entity_summary",
            {
                "name": entity.display_name,
                "descriptions": "\n".join(f"- {d}" for d in observations),
            },
        )
    for key in sorted(graph.triples):
        h, relation, t = key
        triple = graph.triples[key]
        reports.relation_summaries[relation_summary_key(h, relation, t)] = (
            gateway.complete(
                "relation_summary",
                {
                    "head": graph.entities[h].display_name,
                    "tail": graph.entities[t].display_name,
                    "descriptions": f"- {relation} (observed {int(triple.weight)}x)",
                },
            )
        )
    for level in range(1, hierarchy.h + 1):
        for index, block in enumerate(hierarchy.level(level)):
            member_ids = sorted(block)
            entity_lines = "\n".join(
                f"- {graph.entities[m].display_name}: "
                f"{reports.entity_summaries.get(m, '')}"
                for m in member_ids
            )
            relation_lines = "\n".join(
                f"- {graph.entities[h].display_name} -> "
                f"{graph.entities[t].display_name}: {rel} "
                f"(weight {graph.triples[(h, rel, t)].weight:g})"
                for (h, rel, t) in sorted(graph.triples)
                if h in block and t in block
            ) or "- (no internal relationships)"
            try:
                response = gateway.complete(
                    "community_report",
                    {"entities": entity_lines, "relations": relation_lines},
                )
            except StorykgError as exc:
                exc.args = (f"community {community_id_for(level, index)}: {exc}",)
                raise
            summary, findings = _parse_report(response)
            reports.community_reports.append(
                CommunityReport(
                    community_id=community_id_for(level, index),
                    level=level,
                    member_entities=tuple(member_ids),
                    summary=summary,
                    key_findings=findings,
                )
            )
    return reports

"""Knowledge-graph model: entities, weighted relation triples, hierarchy.

Entity identity is owned by `canonical`: case-insensitive with internal
whitespace collapsed. Every module that names an entity must route through
it. Graphs are mutated only during a build phase and treated as frozen
afterwards.
"""

from __future__ import annotations

import csv
import re
import xml.etree.ElementTree as ET
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from .errors import NotFoundError, ValidationError

EXPORT_FORMATS = ("graphml", "dot", "triples-csv")
_FORMAT_ALIASES = {"csv": "triples-csv"}


def canonical(name: str) -> str:
    """Canonical entity id: lowercase, internal whitespace runs collapsed."""
    collapsed = re.sub(r"\s+", " ", name.strip())
    if not collapsed:
        raise ValidationError(f"entity name is empty after canonicalization: {name!r}")
    return collapsed.lower()


@dataclass
class Entity:
    id: str
    display_name: str
    kind: Optional[str] = None
    description: Optional[str] = None


@dataclass(frozen=True)
class Triple:
    head: str
    relation: str
    tail: str
    weight: float = 1.0
    evidence: tuple[str, ...] = ()

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.head, self.relation, self.tail)


@dataclass(frozen=True)
class Hierarchy:
    """Partition stack P_1..P_h; P_1 is finest and each level refines the next."""

    levels: tuple[tuple[frozenset[str], ...], ...]

    @property
    def h(self) -> int:
        return len(self.levels)

    def level(self, l: int) -> tuple[frozenset[str], ...]:
        if not 1 <= l <= self.h:
            raise ValidationError(f"hierarchy has levels 1..{self.h}, got {l}")
        return self.levels[l - 1]

    def membership(self, l: int) -> dict[str, int]:
        return {
            node: idx for idx, block in enumerate(self.level(l)) for node in block
        }

    @staticmethod
    def from_blocks(levels: Iterable[Iterable[Iterable[str]]]) -> "Hierarchy":
        normalized = tuple(
            tuple(sorted((frozenset(block) for block in level), key=min))
            for level in levels
        )
        return Hierarchy(levels=normalized)


def check_refinement(
    hierarchy: Hierarchy, entity_ids: Optional[set[str]] = None
) -> tuple[bool, Optional[str]]:
    """True iff every level partitions the entity set and each level refines the next.

    Returns (ok, first violation description). With no explicit entity set the
    union of level 1 is used as the universe.
    """
    if hierarchy.h == 0:
        return (entity_ids is None or not entity_ids, "hierarchy has no levels")
    universe = (
        set(entity_ids)
        if entity_ids is not None
        else set().union(*hierarchy.levels[0])
    )
    for l, level in enumerate(hierarchy.levels, start=1):
        seen: set[str] = set()
        for block in level:
            if not block:
                return False, f"level {l} contains an empty block"
            overlap = seen & block
            if overlap:
                return False, (
                    f"level {l} blocks overlap on {{{', '.join(sorted(overlap))}}}"
                )
            seen |= block
        if seen != universe:
            missing = universe - seen
            extra = seen - universe
            what = missing or extra
            kind = "misses" if missing else "adds unknown"
            return False, (
                f"level {l} {kind} entities {{{', '.join(sorted(what))}}}"
            )
    for l in range(2, hierarchy.h + 1):
        parent = hierarchy.levels[l - 1]
        for block in hierarchy.levels[l - 2]:
            containers = [p for p in parent if block & p]
            if len(containers) != 1 or not block <= containers[0]:
                return False, (
                    f"level {l - 1} block {{{', '.join(sorted(block))}}} "
                    f"straddles level {l} blocks"
                )
    return True, None


class KnowledgeGraph:
    """Entities plus an aggregated multiset of weighted triples."""

    def __init__(self) -> None:
        self.entities: dict[str, Entity] = {}
        self.triples: dict[tuple[str, str, str], Triple] = {}
        self.hierarchy: Optional[Hierarchy] = None
        self._adjacency: dict[str, set[str]] = {}

    # -- construction ------------------------------------------------------

    def add_entity(
        self,
        name: str,
        kind: Optional[str] = None,
        description: Optional[str] = None,
    ) -> str:
        """Register an entity (idempotent) and return its canonical id.

        Merges deterministically so build results are insertion-order
        independent: display name and kind are the lexicographically
        smallest observed candidates.
        """
        eid = canonical(name)
        display = re.sub(r"\s+", " ", name.strip())
        existing = self.entities.get(eid)
        if existing is None:
            self.entities[eid] = Entity(
                id=eid, display_name=display, kind=kind, description=description
            )
            self._adjacency.setdefault(eid, set())
        else:
            if display < existing.display_name:
                existing.display_name = display
            if kind is not None and (existing.kind is None or kind < existing.kind):
                existing.kind = kind
            if description is not None and (
                existing.description is None or description < existing.description
            ):
                existing.description = description
        return eid

    def upsert_triple(self, triple: Triple) -> None:
        """Insert or aggregate a triple; weights add, evidence sets merge."""
        if not triple.relation.strip():
            raise ValidationError("triple relation text is empty")
        if triple.weight <= 0:
            raise ValidationError(f"triple weight must be positive, got {triple.weight}")
        head = self.add_entity(triple.head)
        tail = self.add_entity(triple.tail)
        key = (head, triple.relation, tail)
        existing = self.triples.get(key)
        if existing is None:
            merged = Triple(
                head, triple.relation, tail, float(triple.weight),
                tuple(sorted(set(triple.evidence))),
            )
        else:
            merged = Triple(
                head,
                triple.relation,
                tail,
                existing.weight + float(triple.weight),
                tuple(sorted(set(existing.evidence) | set(triple.evidence))),
            )
        self.triples[key] = merged
        self._adjacency[head].add(tail)
        self._adjacency[tail].add(head)

    def set_hierarchy(self, hierarchy: Hierarchy) -> None:
        ok, why = check_refinement(hierarchy, set(self.entities))
        if not ok:
            raise ValidationError(f"hierarchy rejected: {why}")
        self.hierarchy = hierarchy

    # -- queries -----------------------------------------------------------

    def node_count(self) -> int:
        return len(self.entities)

    def edge_count(self) -> int:
        return len(self.triples)

    def weighted_degree(self, entity_id: str) -> float:
        total = 0.0
        for (h, _, t), triple in self.triples.items():
            if h == entity_id:
                total += triple.weight
            if t == entity_id:
                total += triple.weight
        return total

    def neighbors(self, entity_id: str) -> set[str]:
        return set(self._adjacency.get(entity_id, ()))

    def triples_touching(self, entity_id: str) -> list[Triple]:
        return [
            t for (h, _, tl), t in sorted(self.triples.items())
            if h == entity_id or tl == entity_id
        ]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, KnowledgeGraph):
            return NotImplemented
        mine = {
            e.id: (e.display_name, e.kind, e.description) for e in self.entities.values()
        }
        theirs = {
            e.id: (e.display_name, e.kind, e.description) for e in other.entities.values()
        }
        return (
            mine == theirs
            and self.triples == other.triples
            and self.hierarchy == other.hierarchy
        )


def induced_neighborhood(
    graph: KnowledgeGraph, entity_id: str, radius: int
) -> KnowledgeGraph:
    """Subgraph of everything within `radius` undirected hops, weights intact."""
    if radius < 1:
        raise ValidationError(f"radius must be >= 1, got {radius}")
    if entity_id not in graph.entities:
        raise NotFoundError(f"unknown entity: {entity_id!r}")
    keep = {entity_id}
    frontier = deque([(entity_id, 0)])
    while frontier:
        node, dist = frontier.popleft()
        if dist == radius:
            continue
        for nbr in graph.neighbors(node):
            if nbr not in keep:
                keep.add(nbr)
                frontier.append((nbr, dist + 1))
    sub = KnowledgeGraph()
    for eid in sorted(keep):
        src = graph.entities[eid]
        sub.add_entity(src.display_name, src.kind, src.description)
    for (h, _, t), triple in sorted(graph.triples.items()):
        if h in keep and t in keep:
            sub.upsert_triple(triple)
    return sub


def graph_stats(graph: KnowledgeGraph, top_k: int = 10) -> dict:
    """Node/edge counts plus top-k entities by weighted degree (ties by id)."""
    degrees = {eid: graph.weighted_degree(eid) for eid in graph.entities}
    ranked = sorted(degrees.items(), key=lambda kv: (-kv[1], kv[0]))
    return {
        "node_count": graph.node_count(),
        "edge_count": graph.edge_count(),
        "top_by_degree": ranked[: max(top_k, 0)],
    }


def max_normalized_weights(graph: KnowledgeGraph) -> dict[tuple[str, str, str], float]:
    """Optional view with weights scaled into (0, 1] by the maximum weight.

    The upstream notion of "normalized counts" is underspecified, so raw
    counts stay authoritative and this view is provided alongside them.
    """
    if not graph.triples:
        return {}
    peak = max(t.weight for t in graph.triples.values())
    return {key: t.weight / peak for key, t in sorted(graph.triples.items())}


# ---------------------------------------------------------------------------
# export / import
# ---------------------------------------------------------------------------

def _resolve_format(fmt: str) -> str:
    resolved = _FORMAT_ALIASES.get(fmt, fmt)
    if resolved not in EXPORT_FORMATS:
        raise ValidationError(
            f"unsupported graph format {fmt!r}; supported: {', '.join(EXPORT_FORMATS)}"
        )
    return resolved


def export_graph(graph: KnowledgeGraph, fmt: str, path: str | Path) -> Path:
    resolved = _resolve_format(fmt)
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    if resolved == "triples-csv":
        _write_triples_csv(graph, out)
    elif resolved == "dot":
        _write_dot(graph, out)
    else:
        _write_graphml(graph, out)
    return out


def import_graph(fmt: str, path: str | Path) -> KnowledgeGraph:
    resolved = _resolve_format(fmt)
    p = Path(path)
    if not p.exists():
        raise ValidationError(f"graph file not found: {p}")
    if resolved == "triples-csv":
        return _read_triples_csv(p)
    if resolved == "dot":
        return _read_dot(p)
    return _read_graphml(p)


def _sorted_triples(graph: KnowledgeGraph) -> list[Triple]:
    return [graph.triples[k] for k in sorted(graph.triples)]


def _hierarchy_attrs(graph: KnowledgeGraph) -> dict[str, dict[str, int]]:
    """Per-level block index for each node, as attributes level_1..level_h."""
    attrs: dict[str, dict[str, int]] = {}
    if graph.hierarchy is None:
        return attrs
    for l in range(1, graph.hierarchy.h + 1):
        attrs[f"level_{l}"] = graph.hierarchy.membership(l)
    return attrs


def _hierarchy_from_attrs(
    node_levels: dict[str, dict[str, str]]
) -> Optional[Hierarchy]:
    level_names = sorted(
        {k for attrs in node_levels.values() for k in attrs if k.startswith("level_")},
        key=lambda name: int(name.split("_")[1]),
    )
    if not level_names:
        return None
    levels = []
    for name in level_names:
        blocks: dict[str, set[str]] = {}
        for node, attrs in node_levels.items():
            blocks.setdefault(attrs[name], set()).add(node)
        levels.append(blocks.values())
    return Hierarchy.from_blocks(levels)


# -- triples CSV (triples only; kind/description and hierarchy not carried) --

def _write_triples_csv(graph: KnowledgeGraph, path: Path) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["head", "relation", "tail", "weight", "evidence"])
        for t in _sorted_triples(graph):
            writer.writerow(
                [
                    graph.entities[t.head].display_name,
                    t.relation,
                    graph.entities[t.tail].display_name,
                    repr(t.weight),
                    "|".join(t.evidence),
                ]
            )


def _read_triples_csv(path: Path) -> KnowledgeGraph:
    graph = KnowledgeGraph()
    with path.open(newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            evidence = tuple(e for e in row["evidence"].split("|") if e)
            graph.upsert_triple(
                Triple(
                    head=row["head"],
                    relation=row["relation"],
                    tail=row["tail"],
                    weight=float(row["weight"]),
                    evidence=evidence,
                )
            )
    return graph


# -- DOT ---------------------------------------------------------------------

def _dot_quote(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


_DOT_NODE_RE = re.compile(r'^\s*"((?:[^"\\]|\\.)*)"\s*\[(.*)\];$')
_DOT_EDGE_RE = re.compile(r'^\s*"((?:[^"\\]|\\.)*)"\s*->\s*"((?:[^"\\]|\\.)*)"\s*\[(.*)\];$')
_DOT_ATTR_RE = re.compile(r'(\w+)="((?:[^"\\]|\\.)*)"')


def _dot_unescape(value: str) -> str:
    return value.replace('\\"', '"').replace("\\\\", "\\")


def _write_dot(graph: KnowledgeGraph, path: Path) -> None:
    attrs = _hierarchy_attrs(graph)
    lines = ["digraph knowledge_graph {"]
    for eid in sorted(graph.entities):
        e = graph.entities[eid]
        parts = [f"label={_dot_quote(e.display_name)}"]
        if e.kind is not None:
            parts.append(f"kind={_dot_quote(e.kind)}")
        if e.description is not None:
            parts.append(f"description={_dot_quote(e.description)}")
        for level_name in sorted(attrs, key=lambda n: int(n.split("_")[1])):
            parts.append(f'{level_name}="{attrs[level_name][eid]}"')
        lines.append(f"  {_dot_quote(eid)} [{' '.join(parts)}];")
    for t in _sorted_triples(graph):
        parts = [
            f"relation={_dot_quote(t.relation)}",
            f'weight="{t.weight!r}"',
            f"evidence={_dot_quote('|'.join(t.evidence))}",
        ]
        lines.append(f"  {_dot_quote(t.head)} -> {_dot_quote(t.tail)} [{' '.join(parts)}];")
    lines.append("}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _read_dot(path: Path) -> KnowledgeGraph:
    """Read DOT written by `_write_dot` (one statement per line).

    This is not a general DOT parser; it round-trips this tool's own exports.
    """
    graph = KnowledgeGraph()
    node_levels: dict[str, dict[str, str]] = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        edge = _DOT_EDGE_RE.match(line)
        if edge:
            head, tail, attr_src = edge.groups()
            attrs = {k: _dot_unescape(v) for k, v in _DOT_ATTR_RE.findall(attr_src)}
            graph.upsert_triple(
                Triple(
                    head=_dot_unescape(head),
                    relation=attrs["relation"],
                    tail=_dot_unescape(tail),
                    weight=float(attrs["weight"]),
                    evidence=tuple(e for e in attrs.get("evidence", "").split("|") if e),
                )
            )
            continue
        node = _DOT_NODE_RE.match(line)
        if node:
            eid, attr_src = node.group(1), node.group(2)
            attrs = {k: _dot_unescape(v) for k, v in _DOT_ATTR_RE.findall(attr_src)}
            graph.add_entity(
                attrs.get("label", _dot_unescape(eid)),
                kind=attrs.get("kind"),
                description=attrs.get("description"),
            )
            levels = {k: v for k, v in attrs.items() if k.startswith("level_")}
            if levels:
                node_levels[_dot_unescape(eid)] = levels
    hierarchy = _hierarchy_from_attrs(node_levels)
    if hierarchy is not None:
        graph.set_hierarchy(hierarchy)
    return graph


# -- GraphML -------------------------------------------------------------------

_GRAPHML_NS = "http://graphml.graphdrawing.org/xmlns"


def _write_graphml(graph: KnowledgeGraph, path: Path) -> None:
    ET.register_namespace("", _GRAPHML_NS)
    root = ET.Element(f"{{{_GRAPHML_NS}}}graphml")
    attrs = _hierarchy_attrs(graph)
    node_keys = ["display_name", "kind", "description"] + sorted(
        attrs, key=lambda n: int(n.split("_")[1])
    )
    edge_keys = ["relation", "weight", "evidence"]
    for name in node_keys:
        ET.SubElement(
            root,
            f"{{{_GRAPHML_NS}}}key",
            id=name,
            attrib={"for": "node", "attr.name": name, "attr.type": "string"},
        )
    for name in edge_keys:
        ET.SubElement(
            root,
            f"{{{_GRAPHML_NS}}}key",
            id=name,
            attrib={"for": "edge", "attr.name": name, "attr.type": "string"},
        )
    g = ET.SubElement(root, f"{{{_GRAPHML_NS}}}graph", edgedefault="directed")
    for eid in sorted(graph.entities):
        e = graph.entities[eid]
        node = ET.SubElement(g, f"{{{_GRAPHML_NS}}}node", id=eid)
        values = {"display_name": e.display_name}
        if e.kind is not None:
            values["kind"] = e.kind
        if e.description is not None:
            values["description"] = e.description
        for level_name, membership in attrs.items():
            values[level_name] = str(membership[eid])
        for key_name, value in values.items():
            data = ET.SubElement(node, f"{{{_GRAPHML_NS}}}data", key=key_name)
            data.text = value
    for t in _sorted_triples(graph):
        edge = ET.SubElement(g, f"{{{_GRAPHML_NS}}}edge", source=t.head, target=t.tail)
        for key_name, value in (
            ("relation", t.relation),
            ("weight", repr(t.weight)),
            ("evidence", "|".join(t.evidence)),
        ):
            data = ET.SubElement(edge, f"{{{_GRAPHML_NS}}}data", key=key_name)
            data.text = value
    tree = ET.ElementTree(root)
    ET.indent(tree)
    tree.write(path, encoding="utf-8", xml_declaration=True)


def _read_graphml(path: Path) -> KnowledgeGraph:
    graph = KnowledgeGraph()
    root = ET.parse(path).getroot()
    ns = {"g": _GRAPHML_NS}
    node_levels: dict[str, dict[str, str]] = {}
    for node in root.findall("./g:graph/g:node", ns):
        values = {
            data.get("key"): data.text or ""
            for data in node.findall("g:data", ns)
        }
        graph.add_entity(
            values.get("display_name", node.get("id", "")),
            kind=values.get("kind"),
            description=values.get("description"),
        )
        levels = {k: v for k, v in values.items() if k and k.startswith("level_")}
        if levels:
            node_levels[node.get("id", "")] = levels
    for edge in root.findall("./g:graph/g:edge", ns):
        values = {
            data.get("key"): data.text or ""
            for data in edge.findall("g:data", ns)
        }
        graph.upsert_triple(
            Triple(
                head=edge.get("source", ""),
                relation=values["relation"],
                tail=edge.get("target", ""),
                weight=float(values["weight"]),
                evidence=tuple(e for e in values.get("evidence", "").split("|") if e),
            )
        )
    hierarchy = _hierarchy_from_attrs(node_levels)
    if hierarchy is not None:
        graph.set_hierarchy(hierarchy)
    return graph

"""Run-directory layout and artifact (de)serialization.

Every pipeline step reads and writes under one workspace directory, so a
missing prerequisite is always reportable by file path. Serialization is
deterministic (sorted keys, stable float repr): the same inputs, seed, and
cassette produce byte-identical artifacts.
"""

from __future__ import annotations

import json
from pathlib import Path

from . import __version__
from .builder import BuildReports, CommunityReport
from .config import PipelineConfig
from .errors import ArtifactMissingError
from .ingest import Chunk, read_chunks, write_chunks
from .kg import Hierarchy, KnowledgeGraph, Triple


class Workspace:
    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)

    # -- paths ---------------------------------------------------------------

    @property
    def manifest_path(self) -> Path:
        return self.root / "manifest.json"

    @property
    def config_path(self) -> Path:
        return self.root / "resolved_config.yaml"

    @property
    def preprocessed_path(self) -> Path:
        return self.root / "preprocessed.csv"

    @property
    def chunks_path(self) -> Path:
        return self.root / "chunks.jsonl"

    @property
    def traditional_graph_path(self) -> Path:
        return self.root / "traditional" / "graph.json"

    @property
    def graphrag_dir(self) -> Path:
        return self.root / "graphrag"

    @property
    def graphrag_graph_path(self) -> Path:
        return self.graphrag_dir / "graph.json"

    @property
    def entity_summaries_path(self) -> Path:
        return self.graphrag_dir / "entity_summaries.json"

    @property
    def relation_summaries_path(self) -> Path:
        return self.graphrag_dir / "relation_summaries.json"

    @property
    def community_reports_path(self) -> Path:
        return self.graphrag_dir / "community_reports.jsonl"

    @property
    def build_meta_path(self) -> Path:
        return self.graphrag_dir / "build_meta.json"

    @property
    def analysis_dir(self) -> Path:
        return self.root / "analysis"

    @property
    def eval_dir(self) -> Path:
        return self.root / "eval"

    # -- helpers ---------------------------------------------------------------

    def ensure_root(self) -> None:
        self.root.mkdir(parents=True, exist_ok=True)

    def require(self, path: Path, produced_by: str) -> Path:
        if not path.exists():
            raise ArtifactMissingError(
                f"missing artifact {path}; run '{produced_by}' first"
            )
        return path

    def write_manifest(self, config: PipelineConfig) -> None:
        self.ensure_root()
        manifest = {
            "tool": "storykg",
            "version": __version__,
            "seed": config.seed,
            "config_sha256": config.sha256(),
        }
        self.manifest_path.write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )

    def write_config(self, config: PipelineConfig) -> None:
        self.ensure_root()
        self.config_path.write_text(config.to_yaml(), encoding="utf-8")

    # -- chunks ------------------------------------------------------------------

    def save_chunks(self, chunks: list[Chunk]) -> None:
        self.ensure_root()
        write_chunks(chunks, self.chunks_path)

    def load_chunks(self) -> list[Chunk]:
        self.require(self.chunks_path, "ingest")
        return read_chunks(self.chunks_path)

    # -- graphs ------------------------------------------------------------------

    def save_graph(self, graph: KnowledgeGraph, path: Path) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        data = {
            "entities": [
                {
                    "id": e.id,
                    "display_name": e.display_name,
                    "kind": e.kind,
                    "description": e.description,
                }
                for e in (graph.entities[k] for k in sorted(graph.entities))
            ],
            "triples": [
                {
                    "head": t.head,
                    "relation": t.relation,
                    "tail": t.tail,
                    "weight": t.weight,
                    "evidence": list(t.evidence),
                }
                for t in (graph.triples[k] for k in sorted(graph.triples))
            ],
            "hierarchy": (
                {
                    "levels": [
                        [sorted(block) for block in level]
                        for level in graph.hierarchy.levels
                    ]
                }
                if graph.hierarchy is not None
                else None
            ),
        }
        path.write_text(
            json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )

    def load_graph(self, path: Path, produced_by: str) -> KnowledgeGraph:
        self.require(path, produced_by)
        data = json.loads(path.read_text("utf-8"))
        graph = KnowledgeGraph()
        for row in data["entities"]:
            graph.add_entity(
                row["display_name"], kind=row.get("kind"), description=row.get("description")
            )
        for row in data["triples"]:
            graph.upsert_triple(
                Triple(
                    head=row["head"],
                    relation=row["relation"],
                    tail=row["tail"],
                    weight=float(row["weight"]),
                    evidence=tuple(row.get("evidence", ())),
                )
            )
        if data.get("hierarchy"):
            graph.set_hierarchy(Hierarchy.from_blocks(data["hierarchy"]["levels"]))
        return graph

    # -- reports ---------------------------------------------------------------------

    def save_reports(self, reports: BuildReports) -> None:
        self.graphrag_dir.mkdir(parents=True, exist_ok=True)
        self.entity_summaries_path.write_text(
            json.dumps(reports.entity_summaries, indent=2, sort_keys=True, ensure_ascii=False)
            + "\n",
            encoding="utf-8",
        )
        self.relation_summaries_path.write_text(
            json.dumps(
                reports.relation_summaries, indent=2, sort_keys=True, ensure_ascii=False
            )
            + "\n",
            encoding="utf-8",
        )
        with self.community_reports_path.open("w", encoding="utf-8") as fh:
            for report in reports.community_reports:
                fh.write(
                    json.dumps(
                        {
                            "community_id": report.community_id,
                            "level": report.level,
                            "member_entities": list(report.member_entities),
                            "summary": report.summary,
                            "key_findings": list(report.key_findings),
                        },
                        ensure_ascii=False,
                        sort_keys=True,
                    )
                    + "\n"
                )

    def load_reports(self) -> BuildReports:
        self.require(self.community_reports_path, "build graphrag")
        reports = BuildReports(
            entity_summaries=json.loads(self.entity_summaries_path.read_text("utf-8")),
            relation_summaries=json.loads(
                self.relation_summaries_path.read_text("utf-8")
            ),
        )
        with self.community_reports_path.open(encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                row = json.loads(line)
                reports.community_reports.append(
                    CommunityReport(
                        community_id=row["community_id"],
                        level=row["level"],
                        member_entities=tuple(row["member_entities"]),
                        summary=row["summary"],
                        key_findings=tuple(row["key_findings"]),
                    )
                )
        return reports

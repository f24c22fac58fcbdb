from __future__ import annotations

import itertools
import random

import pytest

from storykg.builder import (
    CommunityReport,
    ExtractionRecord,
    _parse_records,
    assemble_graph,
    cluster_hierarchy,
    extract_with_gleaning,
    generate_reports,
)
from storykg.errors import StructuredOutputError, ValidationError
from storykg.ingest import Chunk, SegmentLabel
from storykg.kg import KnowledgeGraph, Triple, check_refinement
from storykg.leiden import modularity


def chunk(text="AdnanSyed met HaeMinLee.", cid="chunk-0001"):
    return Chunk(cid, text, len(text.split()), (SegmentLabel(1, 1),))


ENTITY_A = '("entity"|Adnan Syed|person|The accused in the case)'
ENTITY_B = '("entity"|Hae Min Lee|person|The victim in the case)'
REL_AB = '("relationship"|Adnan Syed|Hae Min Lee|they dated in high school|8)'


class TestParseRecords:
    def test_entities_and_relations(self):
        parsed = _parse_records(f"{ENTITY_A}\n{ENTITY_B}\n{REL_AB}")
        assert parsed is not None
        entities, relations = parsed
        assert ("Adnan Syed", "person", "The accused in the case") in entities
        assert relations == [("Adnan Syed", "they dated in high school", "Hae Min Lee", 8.0)]

    def test_tolerates_surrounding_prose(self):
        text = f"Sure! Here are the records:\n{ENTITY_A}\nHope that helps."
        entities, relations = _parse_records(text)
        assert len(entities) == 1 and not relations

    def test_none_marker_is_parseable_empty(self):
        assert _parse_records("NONE") == ([], [])
        assert _parse_records("  none found") == ([], [])
        assert _parse_records("") == ([], [])

    def test_freeform_prose_is_unparseable(self):
        assert _parse_records("I could not find anything structured to say.") is None

    def test_missing_strength_defaults(self):
        text = '("relationship"|A|B|they met)'
        _, relations = _parse_records(text)
        assert relations == [("A", "they met", "B", 1.0)]


class TestGleaning:
    def test_zero_gleanings_single_round(self, fake_gateway_factory):
        gateway, transport = fake_gateway_factory(
            {"entity_relation_extraction": ENTITY_A}
        )
        records = extract_with_gleaning(chunk(), gateway, max_gleanings=0)
        assert [r.gleaning_round for r in records] == [0]
        assert transport.calls_for("extraction_gleaning") == 0

    def test_early_stop_after_empty_round(self, fake_gateway_factory):
        gateway, transport = fake_gateway_factory(
            {
                "entity_relation_extraction": ENTITY_A,
                "extraction_gleaning": [
                    '("entity"|Jay Wilds|person|The witness)',
                    "NONE",
                    "NEVER REACHED",
                ],
            }
        )
        records = extract_with_gleaning(chunk(), gateway, max_gleanings=5)
        assert [r.gleaning_round for r in records] == [0, 1, 2]
        assert transport.calls_for("extraction_gleaning") == 2
        assert records[1].entities[0][0] == "Jay Wilds"
        assert records[2].entities == ()

    def test_duplicate_entities_merge_by_canonical_name(self, fake_gateway_factory):
        gateway, _ = fake_gateway_factory(
            {
                "entity_relation_extraction": ENTITY_B,
                "extraction_gleaning": [
                    '("entity"|hae min lee|person|duplicate spelling)',
                    "NONE",
                ],
            }
        )
        records = extract_with_gleaning(chunk(), gateway, max_gleanings=3)
        all_entities = [e for r in records for e in r.entities]
        assert len(all_entities) == 1

    def test_reparse_then_structured_error(self, fake_gateway_factory):
        gateway, transport = fake_gateway_factory(
            {
                "entity_relation_extraction": "free prose, no records",
                "extraction_reparse": "still free prose",
            }
        )
        with pytest.raises(StructuredOutputError) as err:
            extract_with_gleaning(chunk(), gateway, max_gleanings=0)
        assert err.value.raw == "still free prose"
        assert transport.calls_for("extraction_reparse") == 1

    def test_reparse_recovers(self, fake_gateway_factory):
        gateway, _ = fake_gateway_factory(
            {
                "entity_relation_extraction": "free prose, no records",
                "extraction_reparse": ENTITY_A,
            }
        )
        records = extract_with_gleaning(chunk(), gateway, max_gleanings=0)
        assert records[0].entities[0][0] == "Adnan Syed"

    def test_negative_gleanings_rejected(self, fake_gateway_factory):
        gateway, _ = fake_gateway_factory({})
        with pytest.raises(ValidationError):
            extract_with_gleaning(chunk(), gateway, max_gleanings=-1)


def record(cid, entities=(), relations=(), round_no=0):
    return ExtractionRecord(
        chunk_id=cid,
        entities=tuple(entities),
        relations=tuple(relations),
        gleaning_round=round_no,
    )


class TestAssemble:
    def test_same_relation_in_two_records_aggregates(self):
        records = [
            record("c1", relations=[("A", "met", "B", 5.0)]),
            record("c2", relations=[("a", "met", "B", 5.0)]),
        ]
        state = assemble_graph(records)
        triple = state.graph.triples[("a", "met", "b")]
        assert triple.weight == 2.0
        assert triple.evidence == ("c1", "c2")

    def test_relation_free_rare_entity_pruned(self):
        records = [record("c1", entities=[("Ghost", "person", "seen once")])]
        state = assemble_graph(records, prune_min_mentions=2)
        assert "ghost" not in state.graph.entities

    def test_relation_free_frequent_entity_kept(self):
        records = [
            record("c1", entities=[("Ghost", "person", "desc")]),
            record("c2", entities=[("Ghost", "person", "desc")]),
        ]
        state = assemble_graph(records, prune_min_mentions=2)
        assert "ghost" in state.graph.entities

    def test_five_record_fixture_matches_hand_merge(self):
        records = [
            record("c1", entities=[("A", "person", "first"), ("B", "person", "second")],
                   relations=[("A", "knows", "B", 5.0)]),
            record("c1", entities=[("C", "place", "third")], round_no=1),
            record("c2", entities=[("a", "person", "again")],
                   relations=[("A", "knows", "B", 5.0), ("B", "visited", "C", 3.0)]),
            record("c3", relations=[("C", "hosted", "A", 2.0)]),
            record("c3", entities=[("D", "person", "only once, no relations")], round_no=1),
        ]
        state = assemble_graph(records, prune_min_mentions=2)
        # hand merge: a, b, c kept via relations; d mentioned once, pruned;
        # a is named 5 times (two entity records, three relation endpoints)
        assert sorted(state.graph.entities) == ["a", "b", "c"]
        assert state.graph.triples[("a", "knows", "b")].weight == 2.0
        assert state.graph.triples[("b", "visited", "c")].weight == 1.0
        assert state.graph.triples[("c", "hosted", "a")].weight == 1.0
        assert state.descriptions["a"] == ("again", "first")
        assert state.mentions["a"] == 5

    def test_order_independent(self):
        records = [
            record("c1", entities=[("A", "person", "x")], relations=[("A", "met", "B", 1.0)]),
            record("c2", entities=[("B", "person", "y")], relations=[("A", "met", "B", 1.0)]),
            record("c3", entities=[("C", "place", "z")], relations=[("B", "saw", "C", 1.0)]),
        ]
        reference = assemble_graph(records)
        for perm in itertools.permutations(records):
            state = assemble_graph(list(perm))
            assert state.graph == reference.graph
            assert state.descriptions == reference.descriptions
            assert state.mentions == reference.mentions

    def test_relation_endpoints_materialize_as_entities(self):
        state = assemble_graph([record("c1", relations=[("X", "met", "Y", 1.0)])])
        assert sorted(state.graph.entities) == ["x", "y"]


def clique_graph():
    g = KnowledgeGraph()
    a = [f"a{i}" for i in range(5)]
    b = [f"b{i}" for i in range(5)]
    for group in (a, b):
        for u, v in itertools.combinations(group, 2):
            g.upsert_triple(Triple(u, "knows", v))
    g.upsert_triple(Triple("a4", "bridges", "b4"))
    return g, a, b


class TestClustering:
    def test_single_clique_one_community_every_level(self):
        g = KnowledgeGraph()
        for u, v in itertools.combinations(["w", "x", "y", "z"], 2):
            g.upsert_triple(Triple(u, "knows", v))
        hierarchy = cluster_hierarchy(g, max_levels=2, resolution_schedule=[1.0, 0.5], seed=1)
        assert all(len(level) == 1 for level in hierarchy.levels)

    def test_two_cliques_top_level_separates(self):
        g, a, b = clique_graph()
        hierarchy = cluster_hierarchy(g, max_levels=2, resolution_schedule=[1.0, 0.5], seed=42)
        top = {frozenset(block) for block in hierarchy.levels[-1]}
        assert top == {frozenset(a), frozenset(b)}

    def test_every_hierarchy_passes_refinement_check(self):
        rng = random.Random(0)
        for trial in range(8):
            g = KnowledgeGraph()
            names = [f"n{i}" for i in range(rng.randint(3, 14))]
            for _ in range(rng.randint(2, 30)):
                u, v = rng.sample(names, 2)
                g.upsert_triple(Triple(u, "r", v, weight=float(rng.randint(1, 3))))
            g.add_entity("isolated-node")
            hierarchy = cluster_hierarchy(
                g, max_levels=3, resolution_schedule=[2.0, 1.0, 0.4], seed=trial
            )
            ok, why = check_refinement(hierarchy, set(g.entities))
            assert ok, why

    def test_seeded_determinism(self):
        g, _, _ = clique_graph()
        h1 = cluster_hierarchy(g, seed=7)
        h2 = cluster_hierarchy(g, seed=7)
        assert h1 == h2

    def test_empty_graph_rejected(self):
        with pytest.raises(ValidationError):
            cluster_hierarchy(KnowledgeGraph())

    def test_clique_split_is_modularity_optimal(self):
        # cross-check the two-clique partition against direct modularity values
        g, a, b = clique_graph()
        from storykg.builder import graph_adjacency

        adj = graph_adjacency(g)
        split = modularity(adj, [set(a), set(b)])
        merged = modularity(adj, [set(a) | set(b)])
        lopsided = modularity(adj, [set(a[:3]), set(a[3:]) | set(b)])
        assert split > merged and split > lopsided


REPORT_RESPONSE = "SUMMARY: A tight-knit block.\nFINDINGS:\n- finding one\n- finding two"


class TestReports:
    def gateway(self, factory):
        return factory(
            {
                "entity_summary": lambda req: f"summary of {req.variables['name']}",
                "relation_summary": "they are linked",
                "community_report": REPORT_RESPONSE,
            }
        )

    def test_report_count_equals_total_blocks(self, fake_gateway_factory):
        g, _, _ = clique_graph()
        hierarchy = cluster_hierarchy(g, seed=42)
        state = assemble_graph([])
        state.graph = g
        gateway, _ = self.gateway(fake_gateway_factory)
        reports = generate_reports(state, hierarchy, gateway)
        total_blocks = sum(len(level) for level in hierarchy.levels)
        assert len(reports.community_reports) == total_blocks
        assert len(reports.entity_summaries) == g.node_count()
        assert len(reports.relation_summaries) == g.edge_count()

    def test_single_member_community(self, fake_gateway_factory):
        g = KnowledgeGraph()
        g.add_entity("loner")
        hierarchy = cluster_hierarchy(g, max_levels=1, resolution_schedule=[1.0], seed=0)
        gateway, _ = self.gateway(fake_gateway_factory)
        state = assemble_graph([])
        state.graph = g
        reports = generate_reports(state, hierarchy, gateway)
        assert len(reports.community_reports) == 1
        assert reports.community_reports[0].member_entities == ("loner",)

    def test_report_members_exist_in_graph(self, fake_gateway_factory):
        g, _, _ = clique_graph()
        hierarchy = cluster_hierarchy(g, seed=3)
        gateway, _ = self.gateway(fake_gateway_factory)
        state = assemble_graph([])
        state.graph = g
        reports = generate_reports(state, hierarchy, gateway)
        for report in reports.community_reports:
            for member in report.member_entities:
                assert member in g.entities

    def test_summary_and_findings_parsed(self, fake_gateway_factory):
        g = KnowledgeGraph()
        g.upsert_triple(Triple("a", "r", "b"))
        hierarchy = cluster_hierarchy(g, max_levels=1, resolution_schedule=[1.0], seed=0)
        gateway, _ = self.gateway(fake_gateway_factory)
        state = assemble_graph([])
        state.graph = g
        reports = generate_reports(state, hierarchy, gateway)
        report = reports.community_reports[0]
        assert report.summary == "A tight-knit block."
        assert report.key_findings == ("finding one", "finding two")

    def test_gateway_error_carries_community_context(self, fake_gateway_factory):
        g = KnowledgeGraph()
        g.upsert_triple(Triple("a", "r", "b"))
        hierarchy = cluster_hierarchy(g, max_levels=1, resolution_schedule=[1.0], seed=0)

        def boom(req):
            raise StructuredOutputError("model exploded")

        gateway, _ = fake_gateway_factory(
            {
                "entity_summary": "s",
                "relation_summary": "r",
                "community_report": boom,
            }
        )
        state = assemble_graph([])
        state.graph = g
        with pytest.raises(StructuredOutputError, match="community L1C0"):
            generate_reports(state, hierarchy, gateway)

from __future__ import annotations

import random
from collections import deque

import pytest
from hypothesis import given
from hypothesis import strategies as st

from storykg.errors import NotFoundError, ValidationError
from storykg.kg import (
    Hierarchy,
    KnowledgeGraph,
    Triple,
    canonical,
    check_refinement,
    export_graph,
    graph_stats,
    import_graph,
    induced_neighborhood,
    max_normalized_weights,
)


def graph_from(triples):
    g = KnowledgeGraph()
    for h, r, t in triples:
        g.upsert_triple(Triple(h, r, t))
    return g


class TestCanonical:
    def test_case_and_space_collapse(self):
        assert canonical("  Adnan   Syed ") == "adnan syed"

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            canonical("   ")


class TestUpsert:
    def test_count_aggregation(self):
        g = graph_from([("Jane", "called", "PostOffice")] * 3)
        assert g.edge_count() == 1
        assert next(iter(g.triples.values())).weight == 3.0

    def test_insert_into_empty(self):
        g = graph_from([("Jane", "called", "PostOffice")])
        assert g.node_count() == 2
        assert g.edge_count() == 1

    def test_canonicalization_merges_heads(self):
        g = KnowledgeGraph()
        g.upsert_triple(Triple("adnan syed", "knew", "HaeMinLee"))
        g.upsert_triple(Triple("Adnan Syed", "knew", "HaeMinLee"))
        assert g.node_count() == 2
        triple = g.triples[("adnan syed", "knew", "haeminlee")]
        assert triple.weight == 2.0
        assert g.entities["adnan syed"].display_name == "Adnan Syed"

    def test_empty_relation_rejected(self):
        g = KnowledgeGraph()
        with pytest.raises(ValidationError):
            g.upsert_triple(Triple("a", "  ", "b"))

    def test_nonpositive_weight_rejected(self):
        g = KnowledgeGraph()
        with pytest.raises(ValidationError):
            g.upsert_triple(Triple("a", "r", "b", weight=0.0))

    def test_evidence_merges_as_set(self):
        g = KnowledgeGraph()
        g.upsert_triple(Triple("a", "r", "b", evidence=("c2", "c1")))
        g.upsert_triple(Triple("a", "r", "b", evidence=("c1", "c3")))
        assert g.triples[("a", "r", "b")].evidence == ("c1", "c2", "c3")

    @given(st.permutations(list(range(8))))
    def test_insertion_order_independent(self, order):
        base = [
            ("Jane", "called", "PostOffice"),
            ("jane", "called", "PostOffice"),
            ("Jane", "visited", "Park"),
            ("Park", "contains", "Lake"),
            ("Lake", "feeds", "River"),
            ("Jane", "called", "PostOffice"),
            ("PARK", "contains", "Lake"),
            ("River", "reaches", "Sea"),
        ]
        reference = graph_from(base)
        shuffled = graph_from([base[i] for i in order])
        assert shuffled == reference


class TestNeighborhood:
    def test_isolated_node_radius_one(self):
        g = KnowledgeGraph()
        g.add_entity("loner")
        sub = induced_neighborhood(g, "loner", 1)
        assert sub.node_count() == 1
        assert sub.edge_count() == 0

    def test_path_radius_one_keeps_both_edges(self):
        g = graph_from([("a", "r", "b"), ("b", "r", "c")])
        sub = induced_neighborhood(g, "b", 1)
        assert sub.node_count() == 3
        assert sub.edge_count() == 2

    def test_matches_bfs_oracle(self):
        edges = [("a", "r", "b"), ("b", "r", "c"), ("c", "r", "d"), ("d", "r", "e"), ("a", "s", "e")]
        g = graph_from(edges)
        for start in "abcde":
            for radius in (1, 2, 3):
                # independent breadth-first search over the undirected edge list
                adjacency = {}
                for h, _, t in edges:
                    adjacency.setdefault(h, set()).add(t)
                    adjacency.setdefault(t, set()).add(h)
                seen = {start}
                frontier = deque([(start, 0)])
                while frontier:
                    node, d = frontier.popleft()
                    if d == radius:
                        continue
                    for nbr in adjacency[node]:
                        if nbr not in seen:
                            seen.add(nbr)
                            frontier.append((nbr, d + 1))
                sub = induced_neighborhood(g, start, radius)
                assert set(sub.entities) == seen

    def test_unknown_entity(self):
        g = graph_from([("a", "r", "b")])
        with pytest.raises(NotFoundError):
            induced_neighborhood(g, "zz", 1)

    def test_bad_radius(self):
        g = graph_from([("a", "r", "b")])
        with pytest.raises(ValidationError):
            induced_neighborhood(g, "a", 0)


class TestRefinement:
    def test_single_level_true(self):
        h = Hierarchy.from_blocks([[["a", "b"], ["c"]]])
        ok, why = check_refinement(h, {"a", "b", "c"})
        assert ok and why is None

    def test_valid_two_levels(self):
        h = Hierarchy.from_blocks([[["a"], ["b"], ["c", "d"]], [["a", "b"], ["c", "d"]]])
        ok, _ = check_refinement(h, {"a", "b", "c", "d"})
        assert ok

    def test_straddling_block_reported(self):
        h = Hierarchy.from_blocks([[["a", "c"], ["b", "d"]], [["a", "b"], ["c", "d"]]])
        ok, why = check_refinement(h, {"a", "b", "c", "d"})
        assert not ok
        assert "a, c" in why

    def test_non_partition_reported(self):
        h = Hierarchy.from_blocks([[["a", "b"]]])
        ok, why = check_refinement(h, {"a", "b", "c"})
        assert not ok
        assert "c" in why

    def test_set_hierarchy_validates(self):
        g = graph_from([("a", "r", "b")])
        with pytest.raises(ValidationError):
            g.set_hierarchy(Hierarchy.from_blocks([[["a"]]]))


class TestStats:
    def test_empty(self):
        stats = graph_stats(KnowledgeGraph())
        assert stats == {"node_count": 0, "edge_count": 0, "top_by_degree": []}

    def test_triangle_lexicographic(self):
        g = graph_from([("b", "r", "a"), ("c", "r", "b"), ("a", "r", "c")])
        stats = graph_stats(g)
        assert stats["node_count"] == 3
        assert stats["edge_count"] == 3
        assert stats["top_by_degree"] == [("a", 2.0), ("b", 2.0), ("c", 2.0)]

    def test_weighted_degree_ranks_first(self):
        g = KnowledgeGraph()
        g.upsert_triple(Triple("hub", "r", "x", weight=5.0))
        g.upsert_triple(Triple("y", "s", "x"))
        assert graph_stats(g)["top_by_degree"] == [("x", 6.0), ("hub", 5.0), ("y", 1.0)]

    def test_max_normalized_view(self):
        g = KnowledgeGraph()
        g.upsert_triple(Triple("a", "r", "b", weight=4.0))
        g.upsert_triple(Triple("a", "s", "b", weight=2.0))
        view = max_normalized_weights(g)
        assert view[("a", "r", "b")] == 1.0
        assert view[("a", "s", "b")] == 0.5


def random_graph(seed=0, nodes=12, extra_isolated=False):
    rng = random.Random(seed)
    g = KnowledgeGraph()
    names = [f"n{i:02d}" for i in range(nodes)]
    for _ in range(nodes * 2):
        h, t = rng.sample(names, 2)
        g.upsert_triple(
            Triple(h, rng.choice(["knows", "called", "met"]), t, weight=float(rng.randint(1, 4)),
                   evidence=(f"c{rng.randint(1, 5)}",))
        )
    if extra_isolated:
        g.add_entity("island", kind="place", description="alone")
    return g


class TestExportImport:
    @pytest.mark.parametrize("fmt", ["graphml", "dot", "triples-csv"])
    def test_round_trip_identity(self, fmt, tmp_path):
        g = random_graph(seed=3)
        path = export_graph(g, fmt, tmp_path / f"g.{fmt}")
        assert import_graph(fmt, path) == g

    @pytest.mark.parametrize("fmt", ["graphml", "dot"])
    def test_round_trip_with_metadata_and_hierarchy(self, fmt, tmp_path):
        g = random_graph(seed=5, extra_isolated=True)
        ids = sorted(g.entities)
        half = len(ids) // 2
        g.set_hierarchy(
            Hierarchy.from_blocks(
                [
                    [[i] for i in ids],
                    [ids[:half], ids[half:]],
                ]
            )
        )
        path = export_graph(g, fmt, tmp_path / f"g2.{fmt}")
        back = import_graph(fmt, path)
        assert back == g
        assert back.hierarchy.h == 2

    def test_csv_alias(self, tmp_path):
        g = random_graph(seed=7)
        path = export_graph(g, "csv", tmp_path / "g.csv")
        assert import_graph("csv", path) == g

    def test_two_node_dot_has_one_edge_statement(self, tmp_path):
        g = graph_from([("a", "called", "b")])
        path = export_graph(g, "dot", tmp_path / "g.dot")
        text = path.read_text()
        assert text.count("->") == 1
        assert 'relation="called"' in text

    def test_hierarchy_levels_exported_as_attributes(self, tmp_path):
        g = graph_from([("a", "r", "b"), ("c", "r", "d")])
        g.set_hierarchy(
            Hierarchy.from_blocks(
                [[["a"], ["b"], ["c"], ["d"]], [["a", "b"], ["c", "d"]]]
            )
        )
        text = export_graph(g, "graphml", tmp_path / "g.graphml").read_text()
        assert 'key="level_1"' in text and 'key="level_2"' in text

    def test_unsupported_format_lists_supported(self, tmp_path):
        g = random_graph()
        with pytest.raises(ValidationError, match="graphml, dot, triples-csv"):
            export_graph(g, "gexf", tmp_path / "g.gexf")

    def test_missing_file(self):
        with pytest.raises(ValidationError, match="not found"):
            import_graph("dot", "/nonexistent/g.dot")

    def test_escaping_survives_round_trip(self, tmp_path):
        g = KnowledgeGraph()
        g.add_entity('Quo "ted"', kind="k", description='desc with "quotes" and \\slash')
        g.upsert_triple(Triple('Quo "ted"', 'said "hi"', "Plain"))
        for fmt in ("graphml", "dot", "triples-csv"):
            path = export_graph(g, fmt, tmp_path / f"esc.{fmt}")
            assert import_graph(fmt, path).triples == g.triples

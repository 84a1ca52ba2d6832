from __future__ import annotations

import random

import pytest

import corpus
from oracles import bfs_components
from refgraph.graph import (
    GraphDumpError,
    build,
    filter_multi_commit,
    graph_from_dict,
    graph_to_dict,
    load_graph,
    partition,
    save_graph,
)
from refgraph.ingest import RefactoringType, parse_signature


def _graphs_agree(a, b) -> bool:
    """Structural equality ignoring author_name (lost by the dump format)."""
    if [v.canonical for v in a.vertices()] != [v.canonical for v in b.vertices()]:
        return False
    ea, eb = a.edges(), b.edges()
    if len(ea) != len(eb):
        return False
    return all(
        x.key == y.key and x.timestamp == y.timestamp and x.author_email == y.author_email
        for x, y in zip(ea, eb)
    )


class TestBuild:
    def test_single_commit_fanout_shape(self):
        graph = build(corpus.records_of(corpus.SINGLE_COMMIT_FANOUT_RECORDS))
        assert graph.n_vertices == 4
        assert graph.n_edges == 3

    def test_empty_records(self):
        graph = build([])
        assert graph.n_vertices == 0
        assert graph.n_edges == 0

    def test_cycle_is_representable(self):
        graph = build(corpus.records_of(corpus.EXTRACT_RENAME_CYCLE_RECORDS))
        assert graph.n_vertices == 4
        assert graph.n_edges == 4
        keys = {(e.source.canonical, e.target.canonical) for e in graph.edges()}
        assert ("web.Session#b()", "web.Session#c()") in keys
        assert ("web.Session#c()", "web.Session#b()") in keys

    def test_set_semantics_on_duplicate_insertion(self):
        records = corpus.records_of(corpus.TIMEOUT_SETTER_CLEANUP_RECORDS)
        once = build(records)
        twice = build(records + records)
        assert once == twice

    def test_edge_identity_includes_commit(self):
        a = parse_signature("p.A#m()")
        b = parse_signature("p.A#n()")
        records = [
            corpus.make_record(a, b, rtype=RefactoringType.RENAME, commit="aaaaaaa"),
            corpus.make_record(a, b, rtype=RefactoringType.RENAME, commit="bbbbbbb"),
        ]
        graph = build(records)
        assert graph.n_edges == 2

    def test_insertion_order_irrelevant(self):
        rng = random.Random(13)
        records = corpus.random_records(rng, 120, pool_size=25)
        shuffled = records[:]
        rng.shuffle(shuffled)
        left, right = build(records), build(shuffled)
        assert left == right
        assert partition(left) == partition(right)


class TestPartition:
    def test_disjoint_fixtures_split(self):
        records = corpus.records_of(
            corpus.SINGLE_COMMIT_FANOUT_RECORDS + corpus.EXTRACT_RENAME_CYCLE_RECORDS
        )
        subgraphs = partition(build(records))
        assert len(subgraphs) == 2
        assert [s.id for s in subgraphs] == sorted(s.id for s in subgraphs)

    def test_single_edge(self):
        record = corpus.make_record(parse_signature("a.B#m()"), parse_signature("a.B#n()"))
        subgraphs = partition(build([record]))
        assert len(subgraphs) == 1
        assert subgraphs[0].n_vertices == 2
        assert subgraphs[0].n_edges == 1

    def test_id_is_smallest_vertex_label(self):
        subgraph = corpus.subgraph_of(corpus.EXTRACT_RENAME_CYCLE_RECORDS)
        assert subgraph.id == "web.Session#a()"
        assert subgraph.id == min(v.canonical for v in subgraph.vertices)

    def test_components_match_bfs_oracle_on_200_random_records(self):
        rng = random.Random(200)
        records = corpus.random_records(rng, 200, pool_size=40)
        subgraphs = partition(build(records))
        got = {frozenset(v.canonical for v in s.vertices) for s in subgraphs}
        oracle = bfs_components([(r.source.canonical, r.target.canonical) for r in records])
        assert got == oracle

    def test_partition_covers_graph_exactly(self):
        rng = random.Random(77)
        records = corpus.random_records(rng, 300, pool_size=35)
        graph = build(records)
        subgraphs = partition(graph)
        assert sum(s.n_vertices for s in subgraphs) == graph.n_vertices
        assert sum(s.n_edges for s in subgraphs) == graph.n_edges
        seen_vertices = set()
        seen_edges = set()
        for subgraph in subgraphs:
            for vertex in subgraph.vertices:
                assert vertex.canonical not in seen_vertices
                seen_vertices.add(vertex.canonical)
            for edge in subgraph.edges:
                assert edge.key not in seen_edges
                seen_edges.add(edge.key)
                assert edge.source in subgraph.vertices
                assert edge.target in subgraph.vertices


class TestFilterMultiCommit:
    def test_single_commit_subgraph_excluded(self):
        subgraphs = partition(build(corpus.records_of(corpus.SINGLE_COMMIT_FANOUT_RECORDS)))
        kept, excluded = filter_multi_commit(subgraphs)
        assert not kept
        assert excluded == 1

    def test_multi_commit_subgraph_kept(self):
        subgraphs = partition(build(corpus.records_of(corpus.CHART_AXIS_RECORDS)))
        kept, excluded = filter_multi_commit(subgraphs)
        assert len(kept) == 1
        assert excluded == 0

    def test_split_matches_generated_ground_truth(self):
        rng = random.Random(42)
        records = []
        expected_single = 0
        total = 60
        for index in range(total):
            n_edges = rng.randint(1, 6)
            n_commits = rng.randint(1, n_edges)
            if n_commits == 1:
                expected_single += 1
            records.extend(corpus.chain_records(rng, index, n_edges, n_commits))
        subgraphs = partition(build(records))
        assert len(subgraphs) == total
        kept, excluded = filter_multi_commit(subgraphs)
        assert excluded == expected_single
        assert len(kept) + excluded == total

    def test_higher_threshold(self):
        subgraphs = partition(build(corpus.records_of(corpus.CHART_AXIS_RECORDS)))
        kept, excluded = filter_multi_commit(subgraphs, min_commits=4)
        assert not kept and excluded == 1


class TestGraphDump:
    def test_round_trip_through_dict(self):
        graph = build(corpus.records_of(corpus.DEMO_CORPUS))
        project, reloaded = graph_from_dict(graph_to_dict(graph, "demo"))
        assert project == "demo"
        assert _graphs_agree(graph, reloaded)

    def test_round_trip_through_file(self, tmp_path):
        graph = build(corpus.records_of(corpus.CHART_AXIS_RECORDS))
        path = tmp_path / "graph.json"
        save_graph(graph, "mpandroidchart", path)
        project, reloaded = load_graph(path)
        assert project == "mpandroidchart"
        assert _graphs_agree(graph, reloaded)

    def test_dump_edge_fields(self):
        graph = build(corpus.records_of(corpus.BUILDER_RENAME_REVERT_RECORDS))
        data = graph_to_dict(graph, "spring-framework")
        assert set(data["edges"][0]) == {"source", "target", "type", "commit", "timestamp", "author_email"}
        assert data["vertices"] == sorted(data["vertices"])

    def test_version_mismatch(self):
        with pytest.raises(GraphDumpError, match="version"):
            graph_from_dict({"format_version": "99", "project": "p", "vertices": [], "edges": []})

    def test_undeclared_vertex_rejected(self):
        graph = build(corpus.records_of(corpus.BUILDER_RENAME_REVERT_RECORDS))
        data = graph_to_dict(graph, "p")
        data["vertices"] = data["vertices"][:1]
        with pytest.raises(GraphDumpError, match="undeclared"):
            graph_from_dict(data)

    def test_unused_vertex_rejected(self):
        graph = build(corpus.records_of(corpus.BUILDER_RENAME_REVERT_RECORDS))
        data = graph_to_dict(graph, "p")
        data["vertices"].append("zzz.Orphan#alone()")
        with pytest.raises(GraphDumpError, match="not used"):
            graph_from_dict(data)

    def test_corrupt_edge_rejected(self):
        graph = build(corpus.records_of(corpus.BUILDER_RENAME_REVERT_RECORDS))
        data = graph_to_dict(graph, "p")
        data["edges"][0]["type"] = "refactorize"
        with pytest.raises(GraphDumpError, match="corrupt"):
            graph_from_dict(data)

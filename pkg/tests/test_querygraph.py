import itertools
import random

import pytest

from soda.errors import ConjunctionUnsupportedError, NoInterpretationError
from soda.index import IndexConfig, build_inverted_index
from soda.matcher import (
    CLASS_MATCH,
    INSTANCE_GROUP,
    CandidateMatch,
    MatchMatrix,
    Token,
    build_match_matrix,
)
from soda.pagerank import compute_pagerank
from soda.querygraph import (
    BuilderCaps,
    QueryGraph,
    build_query_graphs,
    rank_query_graphs,
)
from soda.schema import SchemaEdge, SchemaGraph, extract_schema_graph

from .oracles import steiner_minimum_edges

DGB = "http://example.org/drugbank/"
SID = "http://example.org/sider/"
DIS = "http://example.org/diseasome/"
BGE = "http://example.org/bgee/"


@pytest.fixture(scope="module")
def qald_schema(qald_store):
    return extract_schema_graph(qald_store)


@pytest.fixture(scope="module")
def qald_index(qald_store):
    return build_inverted_index(
        qald_store, compute_pagerank(qald_store), IndexConfig(), dataset_id="micro-qald"
    )


def _class_match(token_text, cls, start, score=1.0):
    token = Token(token_text, token_text, start, start + 1)
    return token, CandidateMatch(
        token=token,
        kind=CLASS_MATCH,
        cls=cls,
        prop="label",
        uris=(cls,),
        match_values=(token_text,),
        string_sim=1.0,
        pagerank_norm=0.5,
        score=score,
    )


def _instance_match(token_text, cls, uris, start, score=1.0):
    token = Token(token_text, token_text, start, start + 1)
    return token, CandidateMatch(
        token=token,
        kind=INSTANCE_GROUP,
        cls=cls,
        prop="http://www.w3.org/2000/01/rdf-schema#label",
        uris=tuple(uris),
        match_values=(token_text,),
        string_sim=1.0,
        pagerank_norm=0.5,
        score=score,
    )


def _matrix(*pairs):
    tokens = [t for t, _ in pairs]
    return MatchMatrix(tokens, [[m] for _, m in pairs])


def test_figure_pipeline_top_tree(qald_index, qald_schema):
    matrix = build_match_matrix(
        "What are the drugs for diseases associated with the BRCA genes?", qald_index
    )
    graphs = rank_query_graphs(build_query_graphs(matrix, qald_schema))
    top = graphs[0]
    classes = {o.cls for o in top.occurrences}
    assert classes == {DGB + "drugs", DIS + "diseases", DIS + "genes"}
    assert top.edge_count == 2
    props = {e.prop for e in top.edges}
    assert DIS + "associatedGene" in props
    assert props & {DIS + "possibleDrug", DIS + "possible-DiseaseTarget"}
    anchored = [m for ms in top.anchors.values() for m in ms]
    assert len(anchored) == 1 and anchored[0].uris == (
        DIS + "gene_brca1",
        DIS + "gene_brca2",
    )


def test_single_class_token_gives_single_node_graph(qald_schema):
    matrix = _matrix(_class_match("drug", DGB + "drugs", 0))
    graphs = build_query_graphs(matrix, qald_schema)
    assert len(graphs) == 1
    assert graphs[0].edge_count == 0
    assert [o.cls for o in graphs[0].occurrences] == [DGB + "drugs"]


def test_parallel_edges_fork_two_graphs(qald_schema):
    matrix = _matrix(
        _class_match("gene", DIS + "genes", 0),
        _class_match("anatom", BGE + "anatomical_entity", 1),
    )
    graphs = build_query_graphs(matrix, qald_schema)
    one_hop = [g for g in graphs if g.edge_count == 1]
    props = {g.edges[0].prop for g in one_hop}
    assert props == {BGE + "isExpressedIn", BGE + "isAbsentIn"}
    assert len(one_hop) == 2


def _toy_graph(n_edges, score):
    from soda.querygraph import GraphEdge, Occurrence

    occs = tuple(Occurrence(f"urn:C{i}") for i in range(n_edges + 1))
    edges = tuple(
        GraphEdge(occs[i], f"urn:p{i}", occs[i + 1]) for i in range(n_edges)
    )
    return QueryGraph(occs, edges, {}, {}, score_sum=score)


def test_score_sum_beats_edge_count():
    # A 2-hop graph covering well-scored matches outranks a 1-hop graph
    # covering a weak match, despite its extra edge.
    g_rich = _toy_graph(2, score=1.9)
    g_min = _toy_graph(1, score=1.3)
    assert rank_query_graphs([g_min, g_rich])[0] is g_rich


def test_equal_scores_fewer_edges_first():
    a = _toy_graph(1, score=1.0)
    b = _toy_graph(2, score=1.0)
    assert rank_query_graphs([b, a])[0] is a


def test_single_graph_ranks_as_itself(qald_schema):
    matrix = _matrix(_class_match("drug", DGB + "drugs", 0))
    graphs = build_query_graphs(matrix, qald_schema)
    assert rank_query_graphs(graphs) == graphs


def test_ranking_is_idempotent_total_order(qald_index, qald_schema):
    matrix = build_match_matrix("Which drugs are used for asthma?", qald_index)
    graphs = build_query_graphs(matrix, qald_schema)
    once = rank_query_graphs(graphs)
    twice = rank_query_graphs(once)
    assert [g.canonical_key() for g in once] == [g.canonical_key() for g in twice]
    reversed_in = rank_query_graphs(list(reversed(graphs)))
    assert [g.canonical_key() for g in reversed_in] == [g.canonical_key() for g in once]


def test_trees_are_connected_and_acyclic(qald_index, qald_schema):
    for question in (
        "What are the drugs for diseases associated with the BRCA genes?",
        "Which drugs are used for asthma?",
        "Which genes have side effects for strokes?",
    ):
        matrix = build_match_matrix(question, qald_index)
        if not matrix.tokens:
            continue
        for graph in build_query_graphs(matrix, qald_schema):
            assert graph.is_tree()
            # cover: one candidate per non-empty token row
            covered_tokens = set(graph.covered)
            expected = {
                t for t, cands in zip(matrix.tokens, matrix.candidates) if cands
            }
            assert covered_tokens == expected


def test_conjunction_of_same_class_instances_rejected(qald_schema):
    matrix = _matrix(
        _instance_match("stroke", SID + "side_effects", [SID + "se_stroke"], 0),
        _instance_match("nausea", SID + "side_effects", [SID + "se_nausea"], 1),
    )
    with pytest.raises(ConjunctionUnsupportedError):
        build_query_graphs(matrix, qald_schema)


def test_disconnected_components_rejected():
    schema = SchemaGraph(
        classes={"urn:A", "urn:B", "urn:C", "urn:D"},
        edges={SchemaEdge("urn:A", "urn:p", "urn:B"), SchemaEdge("urn:C", "urn:q", "urn:D")},
    )
    matrix = _matrix(_class_match("a", "urn:A", 0), _class_match("c", "urn:C", 1))
    with pytest.raises(NoInterpretationError):
        build_query_graphs(matrix, schema)


def test_class_match_merges_with_instance_anchor(qald_index, qald_schema):
    # "BRCA" instances and the "genes" class share one node (no self-join).
    matrix = build_match_matrix(
        "What are the drugs for diseases associated with the BRCA genes?", qald_index
    )
    for graph in build_query_graphs(matrix, qald_schema):
        gene_occurrences = [o for o in graph.occurrences if o.cls == DIS + "genes"]
        assert len(gene_occurrences) == 1


def test_fork_completeness_counts_parallel_paths(qald_schema):
    # diseases <-> drugbank drugs are connected by two inverse properties.
    matrix = _matrix(
        _class_match("diseas", DIS + "diseases", 0),
        _class_match("drug", DGB + "drugs", 1),
    )
    graphs = build_query_graphs(matrix, qald_schema)
    assert len([g for g in graphs if g.edge_count == 1]) >= 2


def _random_schema(rng, n_classes):
    classes = [f"urn:c{i}" for i in range(n_classes)]
    edges = set()
    # random connected-ish multigraph
    for i in range(1, n_classes):
        j = rng.randrange(i)
        edges.add(SchemaEdge(classes[i], f"urn:p{i}{j}", classes[j]))
    extra = rng.randint(0, n_classes)
    for _ in range(extra):
        a, b = rng.sample(range(n_classes), 2)
        prop = f"urn:x{a}{b}{rng.randint(0, 2)}"
        edges.add(SchemaEdge(classes[a], prop, classes[b]))
    return SchemaGraph(classes=set(classes), edges=edges)


def test_minimum_tree_matches_exhaustive_steiner_oracle():
    rng = random.Random(20240809)
    for _ in range(25):
        schema = _random_schema(rng, rng.randint(3, 7))
        classes = sorted(schema.classes)
        terminals = rng.sample(classes, rng.randint(2, 3))
        matrix = _matrix(
            *[_class_match(f"t{i}", cls, i) for i, cls in enumerate(terminals)]
        )
        expected = steiner_minimum_edges(schema, set(terminals))
        try:
            graphs = build_query_graphs(matrix, schema)
        except NoInterpretationError:
            assert expected is None
            continue
        assert expected is not None
        assert min(g.edge_count for g in graphs) == expected


def test_caps_limit_graph_count(qald_index, qald_schema):
    matrix = build_match_matrix("Which drugs are used for asthma?", qald_index)
    graphs = build_query_graphs(matrix, qald_schema, caps=BuilderCaps(max_graphs=2))
    assert len(graphs) <= 2

import random

from soda.pagerank import compute_pagerank
from soda.rdf import Atom, Triple, TripleSet, parse_ntriples

from .oracles import dense_pagerank, pagerank_graph_of


def _edge_store(edges, extra_nodes=()):
    ts = TripleSet()
    for s, o in edges:
        ts.add(Triple(Atom.iri(s), Atom.iri("urn:p"), Atom.iri(o)))
    for node in extra_nodes:
        ts.add(Triple(Atom.iri(node), Atom.iri("urn:label"), Atom.literal("x")))
    return ts


def test_single_node_scores_one():
    ts = _edge_store([], extra_nodes=["urn:a"])
    pr = compute_pagerank(ts)
    assert pr.scores == {"urn:a": 1.0}


def test_three_node_cycle_is_uniform():
    ts = _edge_store([("urn:a", "urn:b"), ("urn:b", "urn:c"), ("urn:c", "urn:a")])
    pr = compute_pagerank(ts, tol=1e-10)
    for score in pr.scores.values():
        assert abs(score - 1 / 3) < 1e-6


def test_star_hub_dominates_and_matches_oracle():
    edges = [(f"urn:leaf{i}", "urn:hub") for i in range(5)]
    ts = _edge_store(edges)
    pr = compute_pagerank(ts, tol=1e-12, max_iter=2000)
    expected = dense_pagerank(*pagerank_graph_of(ts), tol=1e-12)
    hub = pr.scores["urn:hub"]
    for i in range(5):
        assert hub > pr.scores[f"urn:leaf{i}"]
    for node, score in pr.scores.items():
        assert abs(score - expected[node]) < 1e-6


def test_scores_sum_to_one_and_positive(qald_store):
    pr = compute_pagerank(qald_store)
    assert abs(sum(pr.scores.values()) - 1.0) < 1e-6
    assert all(s > 0 for s in pr.scores.values())


def test_literal_triples_do_not_create_edges():
    ts = TripleSet()
    ts.add(Triple(Atom.iri("urn:a"), Atom.iri("urn:p"), Atom.literal("text")))
    ts.add(Triple(Atom.iri("urn:b"), Atom.iri("urn:p"), Atom.iri("urn:a")))
    pr = compute_pagerank(ts, tol=1e-10)
    # urn:a is a dangling node (its only triple has a literal object).
    assert pr.scores["urn:a"] > pr.scores["urn:b"]


def test_tolerance_halving_keeps_top3_order(qald_store, cordis_store):
    for store in (qald_store, cordis_store):
        loose = compute_pagerank(store, tol=2e-6)
        tight = compute_pagerank(store, tol=1e-6)
        top = lambda pr: [n for n, _ in sorted(pr.scores.items(), key=lambda kv: (-kv[1], kv[0]))[:3]]
        assert top(loose) == top(tight)


def test_random_graphs_match_dense_oracle():
    rng = random.Random(42)
    for _ in range(20):
        n = rng.randint(1, 15)
        nodes = [f"urn:n{i}" for i in range(n)]
        edges = []
        for s in nodes:
            for o in nodes:
                if s != o and rng.random() < 0.25:
                    edges.append((s, o))
        ts = _edge_store(edges, extra_nodes=nodes)
        pr = compute_pagerank(ts, tol=1e-12, max_iter=2000)
        expected = dense_pagerank(nodes, edges, tol=1e-12)
        for node in nodes:
            assert abs(pr.scores[node] - expected[node]) < 1e-6


def test_mean_normalization_averages_to_one(qald_store):
    pr = compute_pagerank(qald_store)
    normalized = pr.mean_normalized()
    assert abs(sum(normalized.values()) / len(normalized) - 1.0) < 1e-9

"""Node centrality for knowledge-graph entities via PageRank.

The walk graph has a node for every IRI that occurs as subject or object;
each triple with an IRI object contributes a directed edge (literal-valued
triples are excluded). Dangling mass is redistributed uniformly.
"""

from __future__ import annotations

from dataclasses import dataclass

from soda.rdf import TripleSet


@dataclass
class PageRankScores:
    """Stationary distribution of the damped random walk.

    ``scores`` sums to 1 before any rescaling; ``residual`` is the L1
    change of the final iteration.
    """

    scores: dict[str, float]
    damping: float
    iterations: int
    residual: float

    def mean_normalized(self) -> dict[str, float]:
        """Scores divided by the mean score, so the average node is 1.0."""
        if not self.scores:
            return {}
        mean = sum(self.scores.values()) / len(self.scores)
        return {iri: s / mean for iri, s in self.scores.items()}


def compute_pagerank(
    store: TripleSet,
    damping: float = 0.85,
    tol: float = 1e-6,
    max_iter: int = 100,
) -> PageRankScores:
    """Power iteration until the L1 residual drops below ``tol``."""
    nodes: set[str] = set()
    out_edges: dict[str, list[str]] = {}
    for t in store:
        if t.subject.is_iri:
            nodes.add(t.subject.value)
        if t.object.is_iri:
            nodes.add(t.object.value)
            if t.subject.is_iri:
                out_edges.setdefault(t.subject.value, []).append(t.object.value)

    order = sorted(nodes)
    n = len(order)
    if n == 0:
        return PageRankScores({}, damping, 0, 0.0)

    rank = {iri: 1.0 / n for iri in order}
    iterations = 0
    residual = 0.0
    for iterations in range(1, max_iter + 1):
        dangling = sum(rank[iri] for iri in order if iri not in out_edges)
        base = (1.0 - damping) / n + damping * dangling / n
        nxt = {iri: base for iri in order}
        for src, targets in out_edges.items():
            share = damping * rank[src] / len(targets)
            for dst in targets:
                nxt[dst] += share
        residual = sum(abs(nxt[iri] - rank[iri]) for iri in order)
        rank = nxt
        if residual < tol:
            break

    return PageRankScores(rank, damping, iterations, residual)

"""Query-graph construction over the schema graph.

For each combination of one candidate per token (best combinations first),
matched classes are anchored on the schema graph, property matches fix an
edge, and anchors are connected pairwise by shortest paths. Every
equal-length alternative forks a separate graph; the minimal covering tree
of each fork is kept. Resulting graphs are ranked by the sum of their
matches' scores, breaking ties with the tree size.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field

from soda.errors import ConjunctionUnsupportedError, NoInterpretationError
from soda.matcher import (
    CLASS_MATCH,
    INSTANCE_GROUP,
    PROPERTY_MATCH,
    CandidateMatch,
    MatchMatrix,
    Token,
)
from soda.rules import RewriteRule, matching_rule
from soda.schema import SchemaEdge, SchemaGraph, shortest_paths
from soda.textnorm import uri_local_name


@dataclass(frozen=True, slots=True)
class Occurrence:
    """One appearance of a class in a query graph.

    ``occ`` distinguishes repeated appearances of the same class, which
    only arise from rewrite-rule heads.
    """

    cls: str
    occ: int = 0

    def sort_key(self) -> tuple:
        return (uri_local_name(self.cls).lower(), self.occ, self.cls)


@dataclass(frozen=True, slots=True)
class GraphEdge:
    """Directed edge in a query graph; direction is the schema direction."""

    source: Occurrence
    prop: str
    target: Occurrence

    def sort_key(self) -> tuple:
        return (self.prop, self.source.sort_key(), self.target.sort_key())

    def touches(self, occ: Occurrence) -> bool:
        return self.source == occ or self.target == occ


@dataclass(frozen=True)
class RuleSplice:
    token: Token
    rule: RewriteRule
    heads: tuple[tuple[str, Occurrence], ...]  # (head variable, occurrence)

    def occurrences(self) -> tuple[Occurrence, ...]:
        return tuple(occ for _, occ in self.heads)


@dataclass
class QueryGraph:
    occurrences: tuple[Occurrence, ...]
    edges: tuple[GraphEdge, ...]
    covered: dict[Token, CandidateMatch]
    anchors: dict[Occurrence, tuple[CandidateMatch, ...]]
    placements: dict[Token, "Occurrence | GraphEdge"] = field(default_factory=dict)
    splices: tuple[RuleSplice, ...] = ()
    score_sum: float = 0.0

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def canonical_key(self) -> tuple:
        def place_key(t: Token) -> tuple:
            p = self.placements.get(t)
            if isinstance(p, Occurrence):
                return ("node", p.sort_key())
            if isinstance(p, GraphEdge):
                return ("edge", p.sort_key())
            return ("none",)

        cover = tuple(
            sorted(
                (t.start, t.end, m.kind, m.cls, m.prop, m.uris, place_key(t))
                for t, m in self.covered.items()
            )
        )
        anchor_key = tuple(
            sorted(
                (occ.sort_key(), tuple((m.kind, m.cls, m.prop, m.uris) for m in ms))
                for occ, ms in self.anchors.items()
            )
        )
        splice_key = tuple(
            (s.rule.name, s.token.start, tuple((v, o.sort_key()) for v, o in s.heads))
            for s in self.splices
        )
        return (
            tuple(o.sort_key() for o in self.occurrences),
            tuple(e.sort_key() for e in self.edges),
            cover,
            anchor_key,
            splice_key,
        )

    def is_tree(self) -> bool:
        """Edges form a forest whose components the splices connect."""
        parent = {o: o for o in self.occurrences}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in self.edges:
            rs, rt = find(e.source), find(e.target)
            if rs == rt:
                return False
            parent[rs] = rt
        for s in self.splices:
            occs = s.occurrences()
            for other in occs[1:]:
                ra, rb = find(occs[0]), find(other)
                if ra != rb:
                    parent[ra] = rb
        roots = {find(o) for o in self.occurrences}
        return len(roots) <= 1


@dataclass(frozen=True)
class BuilderCaps:
    max_combinations: int = 64
    max_graphs: int = 50
    max_forks_per_combination: int = 32


@dataclass
class _SkipLog:
    disconnected: int = 0
    conjunctions: int = 0
    unattached_properties: int = 0


def _best_first_combinations(row_sizes: list[int], cap: int):
    """Index tuples ordered by the product of their 1-based ranks."""
    if not row_sizes or any(s == 0 for s in row_sizes):
        return
    start = tuple(0 for _ in row_sizes)
    heap = [(1, start)]
    seen = {start}
    emitted = 0
    while heap and emitted < cap:
        product, combo = heapq.heappop(heap)
        yield combo
        emitted += 1
        for i, idx in enumerate(combo):
            if idx + 1 < row_sizes[i]:
                succ = combo[:i] + (idx + 1,) + combo[i + 1 :]
                if succ not in seen:
                    seen.add(succ)
                    succ_product = product // (idx + 1) * (idx + 2)
                    heapq.heappush(heap, (succ_product, succ))


def _minimal_covering_trees(
    nodes: set[Occurrence],
    edges: set[GraphEdge],
    terminals: set[Occurrence],
    required: set[GraphEdge],
    splices: tuple[RuleSplice, ...],
) -> list[tuple[tuple[Occurrence, ...], tuple[GraphEdge, ...]]]:
    """All minimum-edge trees inside the union graph that span the
    terminals and contain every required edge.

    Union graphs are small (a handful of classes), so subsets are
    enumerated outright, smallest node count first.
    """
    base = set(terminals)
    for e in required:
        base.update((e.source, e.target))
    optional_nodes = sorted(nodes - base, key=Occurrence.sort_key)

    def components(selected_nodes: set[Occurrence], selected_edges: set[GraphEdge]) -> int:
        parent = {o: o for o in selected_nodes}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(a, b) -> bool:
            ra, rb = find(a), find(b)
            if ra == rb:
                return False
            parent[ra] = rb
            return True

        acyclic = True
        for e in selected_edges:
            if not union(e.source, e.target):
                acyclic = False
        for s in splices:
            occs = [o for o in s.occurrences() if o in parent]
            for other in occs[1:]:
                union(occs[0], other)
        roots = {find(o) for o in selected_nodes}
        return len(roots) if acyclic else -1

    results: list[tuple[tuple[Occurrence, ...], tuple[GraphEdge, ...]]] = []
    for extra_count in range(len(optional_nodes) + 1):
        for extra in itertools.combinations(optional_nodes, extra_count):
            selected = base | set(extra)
            if not selected:
                continue
            induced = sorted(
                (e for e in edges if e.source in selected and e.target in selected),
                key=GraphEdge.sort_key,
            )
            if any(e not in induced for e in required):
                continue
            pool = [e for e in induced if e not in required]
            start_components = components(selected, set(required))
            if start_components < 0:
                continue
            needed = start_components - 1
            if needed < 0 or needed > len(pool):
                continue
            for chosen in itertools.combinations(pool, needed):
                tree_edges = set(required) | set(chosen)
                if components(selected, tree_edges) == 1:
                    results.append(
                        (
                            tuple(sorted(selected, key=Occurrence.sort_key)),
                            tuple(sorted(tree_edges, key=GraphEdge.sort_key)),
                        )
                    )
        if results:
            break
    # Distinct trees only; parallel-edge alternatives arrive as separate
    # entries naturally.
    unique = sorted(
        set(results),
        key=lambda r: (
            len(r[1]),
            tuple(o.sort_key() for o in r[0]),
            tuple(e.sort_key() for e in r[1]),
        ),
    )
    if not unique:
        return []
    min_edges = len(unique[0][1])
    return [r for r in unique if len(r[1]) == min_edges]


def _capped_product(option_lists: list[list], cap: int):
    count = 0
    for combo in itertools.product(*option_lists):
        if count >= cap:
            return
        count += 1
        yield combo


def _assemble_combination(
    assignment: list[tuple[Token, CandidateMatch]],
    splice_templates: list[tuple[Token, RewriteRule]],
    schema: SchemaGraph,
    caps: BuilderCaps,
    skips: _SkipLog,
) -> list[QueryGraph]:
    # Conjunctive questions with several instance groups of one class are
    # out of scope; skip such combinations outright.
    instance_classes: dict[str, Token] = {}
    for token, match in assignment:
        if match.kind == INSTANCE_GROUP:
            prev = instance_classes.get(match.cls)
            if prev is not None and prev != token:
                skips.conjunctions += 1
                return []
            instance_classes[match.cls] = token

    occ_counter: dict[str, int] = {}
    splices: list[RuleSplice] = []
    for token, rule in splice_templates:
        heads = []
        for var, cls in rule.head:
            k = occ_counter.get(cls, 0)
            occ_counter[cls] = k + 1
            heads.append((var, Occurrence(cls, k)))
        splices.append(RuleSplice(token, rule, tuple(heads)))

    def occurrences_of(cls: str) -> list[Occurrence]:
        count = occ_counter.get(cls, 0)
        if count == 0:
            return [Occurrence(cls, 0)]
        return [Occurrence(cls, i) for i in range(count)]

    # Each token's anchoring alternatives: a class/instance match may sit
    # on any occurrence of its class; a property match fixes one schema
    # edge per (domain, range) alternative.
    anchor_options: list[list[tuple]] = []
    for token, match in assignment:
        if match.kind == PROPERTY_MATCH:
            schema_edges = [
                e for e in schema.edges_with_property(match.prop) if e.domain != e.range
            ]
            options = []
            for e in schema_edges:
                for src in occurrences_of(e.domain):
                    for tgt in occurrences_of(e.range):
                        options.append(("edge", token, match, GraphEdge(src, match.prop, tgt)))
            if not options:
                # A property over literal values anchors at its domain class.
                domains = sorted(
                    c for c, p in schema.datatype_properties if p == match.prop
                )
                for cls in domains:
                    for occ in occurrences_of(cls):
                        options.append(("dataprop", token, match, occ))
            if not options:
                skips.unattached_properties += 1
                return []
            anchor_options.append(options)
        else:
            if match.cls not in schema.classes:
                skips.disconnected += 1
                return []
            anchor_options.append(
                [("node", token, match, occ) for occ in occurrences_of(match.cls)]
            )

    graphs: list[QueryGraph] = []
    for variant in _capped_product(anchor_options, caps.max_forks_per_combination):
        covered: dict[Token, CandidateMatch] = {}
        placements: dict[Token, Occurrence | GraphEdge] = {}
        anchors: dict[Occurrence, list[CandidateMatch]] = {}
        required_edges: set[GraphEdge] = set()
        terminals: set[Occurrence] = set()
        for s in splices:
            terminals.update(s.occurrences())
        for kind, token, match, where in variant:
            covered[token] = match
            placements[token] = where
            if kind == "edge":
                required_edges.add(where)
                terminals.update((where.source, where.target))
            else:
                terminals.add(where)
                if match.kind == INSTANCE_GROUP:
                    anchors.setdefault(where, []).append(match)

        for occ in terminals:
            if occ.cls not in schema.classes:
                skips.disconnected += 1
                covered = {}
                break
        if not covered:
            continue

        # Pairwise shortest paths between terminal classes; every
        # equal-length alternative forks.
        class_pairs = sorted(
            {
                tuple(sorted((a.cls, b.cls)))
                for a, b in itertools.combinations(sorted(terminals, key=Occurrence.sort_key), 2)
                if a.cls != b.cls
            }
        )
        path_options: list[list] = []
        for ca, cb in class_pairs:
            alts = shortest_paths(schema, ca, cb)
            if alts:
                path_options.append([(ca, cb, path) for path in alts])
        if not path_options:
            path_options = [[None]]

        def occ_for(cls: str, endpoint_hint: dict[str, Occurrence]) -> Occurrence:
            if cls in endpoint_hint:
                return endpoint_hint[cls]
            return Occurrence(cls, 0)

        for path_choice in _capped_product(path_options, caps.max_forks_per_combination):
            nodes: set[Occurrence] = set(terminals)
            union_edges: set[GraphEdge] = set(required_edges)
            for item in path_choice:
                if item is None:
                    continue
                ca, cb, path = item
                hint: dict[str, Occurrence] = {}
                for t in sorted(terminals, key=Occurrence.sort_key):
                    hint.setdefault(t.cls, t)
                for step in path:
                    edge = step.as_edge()
                    src = occ_for(edge.domain, hint)
                    tgt = occ_for(edge.range, hint)
                    nodes.update((src, tgt))
                    union_edges.add(GraphEdge(src, edge.property, tgt))

            trees = _minimal_covering_trees(
                nodes, union_edges, terminals, required_edges, tuple(splices)
            )
            if not trees:
                skips.disconnected += 1
                continue
            score_sum = round(sum(m.score for m in covered.values()), 9)
            for tree_nodes, tree_edges in trees:
                graph = QueryGraph(
                    occurrences=tree_nodes,
                    edges=tree_edges,
                    covered=dict(covered),
                    anchors={
                        occ: tuple(ms) for occ, ms in anchors.items() if occ in tree_nodes
                    },
                    placements=dict(placements),
                    splices=tuple(splices),
                    score_sum=score_sum,
                )
                if graph.is_tree():
                    graphs.append(graph)
    return graphs


def build_query_graphs(
    matrix: MatchMatrix,
    schema: SchemaGraph,
    rules: list[RewriteRule] | tuple[RewriteRule, ...] = (),
    caps: BuilderCaps = BuilderCaps(),
) -> list[QueryGraph]:
    """Enumerate candidate query graphs for a match matrix.

    Raises NoInterpretationError when every combination is skipped, or the
    ConjunctionUnsupportedError subtype when same-class instance
    conjunctions caused the failure.
    """
    splice_templates: list[tuple[Token, RewriteRule]] = []
    match_rows: list[tuple[Token, list[CandidateMatch]]] = []
    for token, candidates in zip(matrix.tokens, matrix.candidates):
        rule = matching_rule(list(rules), token.normalized)
        if rule is not None:
            splice_templates.append((token, rule))
        elif candidates:
            match_rows.append((token, candidates))

    if not match_rows and not splice_templates:
        raise NoInterpretationError("no candidate matches to build from")

    skips = _SkipLog()
    seen: set[tuple] = set()
    graphs: list[QueryGraph] = []
    row_sizes = [len(cands) for _, cands in match_rows]
    combos = (
        _best_first_combinations(row_sizes, caps.max_combinations)
        if match_rows
        else iter([()])
    )
    for combo in combos:
        assignment = [
            (token, cands[idx]) for (token, cands), idx in zip(match_rows, combo)
        ]
        for graph in _assemble_combination(
            assignment, splice_templates, schema, caps, skips
        ):
            key = graph.canonical_key()
            if key not in seen:
                seen.add(key)
                graphs.append(graph)
        if len(graphs) >= caps.max_graphs:
            break

    if not graphs:
        if skips.conjunctions and not skips.disconnected:
            raise ConjunctionUnsupportedError(
                "multiple instances of the same class in one question are not supported"
            )
        raise NoInterpretationError("no connected interpretation")
    return graphs[: caps.max_graphs]


def rank_query_graphs(graphs: list[QueryGraph], ablation: bool = False) -> list[QueryGraph]:
    """Order graphs for presentation.

    Default: highest match-score sum first, ties by fewer edges, then by
    the canonical serialization. Ablation mode ranks the overall minimal
    subgraph first instead.
    """
    if ablation:
        key = lambda g: (g.edge_count, -g.score_sum, g.canonical_key())
    else:
        key = lambda g: (-g.score_sum, g.edge_count, g.canonical_key())
    return sorted(graphs, key=key)

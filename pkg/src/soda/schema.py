"""Schema inference from instance data.

The effective schema is a multigraph: classes as nodes, properties as
directed labeled edges, derived purely from the rdf:type of the instances
each property connects. Metadata-level statements (about classes or
properties themselves) never contribute edges.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from soda.errors import StoreLoadError
from soda.rdf import OWL_CLASS, RDF_PROPERTY, RDF_TYPE, Atom, TripleSet

_META_TYPES = {OWL_CLASS, RDF_PROPERTY}

SCHEMA_HEADER = "#soda-schema v1"


@dataclass(frozen=True, slots=True)
class SchemaEdge:
    domain: str
    property: str
    range: str


@dataclass(frozen=True, slots=True)
class PathStep:
    """One hop of a schema path, walked from ``source`` to ``target``.

    ``forward`` records whether the walk follows the edge's stored
    direction; query generation needs the true direction back.
    """

    source: str
    property: str
    target: str
    forward: bool

    def as_edge(self) -> SchemaEdge:
        if self.forward:
            return SchemaEdge(self.source, self.property, self.target)
        return SchemaEdge(self.target, self.property, self.source)


@dataclass
class SchemaGraph:
    classes: set[str] = field(default_factory=set)
    edges: set[SchemaEdge] = field(default_factory=set)
    datatype_properties: set[tuple[str, str]] = field(default_factory=set)
    dataset_id: str = ""

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SchemaGraph)
            and self.classes == other.classes
            and self.edges == other.edges
            and self.datatype_properties == other.datatype_properties
        )

    def edges_between(self, a: str, b: str) -> list[SchemaEdge]:
        """Parallel edges connecting two classes, either direction."""
        out = [e for e in self.edges if (e.domain, e.range) in ((a, b), (b, a))]
        return sorted(out, key=lambda e: (e.property, e.domain))

    def edges_with_property(self, prop: str) -> list[SchemaEdge]:
        return sorted(
            (e for e in self.edges if e.property == prop),
            key=lambda e: (e.domain, e.range),
        )

    def datatype_properties_of(self, cls: str) -> list[str]:
        return sorted(p for c, p in self.datatype_properties if c == cls)

    def _adjacency(self) -> dict[str, set[str]]:
        adj: dict[str, set[str]] = {c: set() for c in self.classes}
        for e in self.edges:
            if e.domain == e.range:
                # Same-domain-and-range properties are excluded from path
                # search; rewrite rules are the supported route for them.
                continue
            adj[e.domain].add(e.range)
            adj[e.range].add(e.domain)
        return adj


def extract_schema_graph(
    store: TripleSet,
    diagnostics: list[str] | None = None,
    dataset_id: str = "",
) -> SchemaGraph:
    """Derive the schema multigraph from typed instances.

    Triples whose subject or object has no usable rdf:type are skipped;
    the untyped IRIs are appended to ``diagnostics`` when given.
    """
    graph = SchemaGraph(dataset_id=dataset_id)
    rdf_type = Atom.iri(RDF_TYPE)
    untyped: set[str] = set()

    def instance_types(atom: Atom) -> list[str] | None:
        """Type IRIs of an instance; None when the atom is schema metadata."""
        types = [a.value for a in store.types_of(atom) if a.is_iri]
        if any(t in _META_TYPES for t in types):
            return None
        return [t for t in types if t not in _META_TYPES]

    for triple in store:
        if triple.predicate == rdf_type:
            continue
        subject_types = instance_types(triple.subject)
        if subject_types is None:
            continue
        if not subject_types:
            untyped.add(triple.subject.value)
            continue

        if triple.object.is_literal:
            for st in subject_types:
                graph.classes.add(st)
                graph.datatype_properties.add((st, triple.predicate.value))
            continue

        object_types = instance_types(triple.object)
        if object_types is None:
            continue
        if not object_types:
            untyped.add(triple.object.value)
            continue
        for st in subject_types:
            for ot in object_types:
                graph.classes.add(st)
                graph.classes.add(ot)
                graph.edges.add(SchemaEdge(st, triple.predicate.value, ot))

    if diagnostics is not None:
        diagnostics.extend(sorted(untyped))
    return graph


MAX_PATH_HOPS = 4


def shortest_paths(
    graph: SchemaGraph, source: str, target: str, max_hops: int = MAX_PATH_HOPS
) -> list[list[PathStep]]:
    """All minimum-hop simple paths between two classes.

    Edges are traversed in both directions; each parallel property is a
    distinct path. Disconnected pairs (within ``max_hops``) yield [].
    """
    if source not in graph.classes or target not in graph.classes:
        raise KeyError(f"unknown class in path query: {source} / {target}")
    if source == target:
        return [[]]

    adj = graph._adjacency()

    # BFS for the hop distance.
    dist = {source: 0}
    frontier = [source]
    while frontier and target not in dist:
        nxt = []
        for node in frontier:
            for nb in adj[node]:
                if nb not in dist:
                    dist[nb] = dist[node] + 1
                    nxt.append(nb)
        frontier = nxt
    if target not in dist or dist[target] > max_hops:
        return []

    # Enumerate simple class sequences of exactly the BFS distance.
    sequences: list[list[str]] = []

    def walk(node: str, trail: list[str]) -> None:
        if node == target:
            sequences.append(list(trail))
            return
        if len(trail) - 1 >= dist[target]:
            return
        for nb in sorted(adj[node]):
            if nb not in trail:
                walk(nb, trail + [nb])

    walk(source, [source])

    # Expand each class sequence into per-property step alternatives.
    paths: list[list[PathStep]] = []
    for seq in sequences:
        options: list[list[PathStep]] = []
        for a, b in zip(seq, seq[1:]):
            steps = []
            for e in graph.edges_between(a, b):
                steps.append(PathStep(a, e.property, b, forward=(e.domain == a)))
            options.append(steps)
        combos: list[list[PathStep]] = [[]]
        for steps in options:
            combos = [prefix + [s] for prefix in combos for s in steps]
        paths.extend(combos)

    paths.sort(key=lambda p: [(s.property, s.forward, s.source, s.target) for s in p])
    return paths


def save_schema(graph: SchemaGraph, path: str) -> None:
    lines = [SCHEMA_HEADER]
    if graph.dataset_id:
        lines.append(f"#dataset {graph.dataset_id}")
    body = []
    for cls in graph.classes:
        body.append(f"CLASS\t{cls}")
    for e in graph.edges:
        body.append(f"EDGE\t{e.domain}\t{e.property}\t{e.range}")
    for cls, prop in graph.datatype_properties:
        body.append(f"DATAPROP\t{cls}\t{prop}")
    lines.extend(sorted(body))
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)


def load_schema(path: str) -> SchemaGraph:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != SCHEMA_HEADER:
        raise StoreLoadError(f"{path}: not a schema file (missing {SCHEMA_HEADER!r})")
    graph = SchemaGraph()
    for raw in lines[1:]:
        if not raw:
            continue
        if raw.startswith("#dataset "):
            graph.dataset_id = raw[len("#dataset ") :]
            continue
        if raw.startswith("#"):
            continue
        fields = raw.split("\t")
        if fields[0] == "CLASS" and len(fields) == 2:
            graph.classes.add(fields[1])
        elif fields[0] == "EDGE" and len(fields) == 4:
            graph.edges.add(SchemaEdge(fields[1], fields[2], fields[3]))
            graph.classes.update((fields[1], fields[3]))
        elif fields[0] == "DATAPROP" and len(fields) == 3:
            graph.datatype_properties.add((fields[1], fields[2]))
            graph.classes.add(fields[1])
        else:
            raise StoreLoadError(f"{path}: corrupt schema line: {raw!r}")
    return graph

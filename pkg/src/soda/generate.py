"""Serialize query graphs into executable SPARQL.

Variables are named after class local names (numeric suffix on collision),
instance anchors become a literal binding plus a case-insensitive regex
filter on the matched token (or a VALUES block when configured), and every
node projects an optional rdfs:label column next to its URI column.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

from soda.errors import GenerationError
from soda.matcher import CLASS_MATCH, INSTANCE_GROUP, PROPERTY_MATCH, CandidateMatch
from soda.querygraph import Occurrence, QueryGraph
from soda.rdf import RDF_TYPE, RDFS_LABEL, Atom
from soda.rules import splice_patterns
from soda.sparql import QueryAST, RegexFilter, TriplePattern, Variable
from soda.textnorm import uri_local_name

LITERAL_COLUMN = "literal"

_NAME_SANITIZE = re.compile(r"[^a-z0-9_]+")
_TOKEN_WORD = re.compile(r"[a-z0-9]+")


def _token_pattern(token_text: str) -> str:
    """Regex for a token: its words, separated by any non-alphanumerics,
    so "HBB Y" still matches the literal "HBB-Y"."""
    words = _TOKEN_WORD.findall(token_text.lower())
    if not words:
        return re.escape(token_text.lower())
    return "[^a-zA-Z0-9]+".join(re.escape(w) for w in words)


@dataclass
class GeneratedQuery:
    ast: QueryAST
    text: str
    names: dict[Occurrence, str]
    answer_var: str
    columns: list[tuple[str, str]]  # (variable, class IRI or "literal")


def variable_names(graph: QueryGraph) -> dict[Occurrence, str]:
    names: dict[Occurrence, str] = {}
    used: dict[str, int] = {}
    for occ in sorted(graph.occurrences, key=Occurrence.sort_key):
        base = _NAME_SANITIZE.sub("_", uri_local_name(occ.cls).lower()).strip("_") or "node"
        count = used.get(base, 0)
        used[base] = count + 1
        names[occ] = base if count == 0 else f"{base}{count}"
    return names


def answer_occurrence(graph: QueryGraph) -> Occurrence:
    """The node whose bindings are the question's answer column.

    The first class-match token wins; otherwise the first node without an
    instance filter; otherwise the first node.
    """
    ordered = sorted(graph.occurrences, key=Occurrence.sort_key)
    for token in sorted(graph.covered, key=lambda t: (t.start, t.end)):
        match = graph.covered[token]
        placement = graph.placements.get(token)
        if match.kind == CLASS_MATCH and isinstance(placement, Occurrence):
            return placement
    for occ in ordered:
        if occ not in graph.anchors:
            return occ
    return ordered[0]


def plan_query(
    graph: QueryGraph,
    limit: int | None = 100,
    use_values: bool = False,
) -> GeneratedQuery:
    """Build the AST and metadata for one query graph."""
    if not graph.occurrences:
        raise GenerationError("cannot generate a query from an empty graph")

    names = variable_names(graph)
    patterns: list[TriplePattern] = []
    filters: list[RegexFilter] = []
    optionals: list[list[TriplePattern]] = []

    for occ in sorted(graph.occurrences, key=Occurrence.sort_key):
        patterns.append(
            TriplePattern(Variable(names[occ]), Atom.iri(RDF_TYPE), Atom.iri(occ.cls))
        )
    for edge in graph.edges:
        patterns.append(
            TriplePattern(
                Variable(names[edge.source]), Atom.iri(edge.prop), Variable(names[edge.target])
            )
        )

    # Instance anchors: bind the matched literal property, then constrain
    # it to the question token (regex mode) or pin URIs (VALUES mode).
    values_vars: list[str] = []
    values_columns: list[tuple[str, ...]] = []
    match_counter: dict[str, int] = {}
    for occ in sorted(graph.anchors, key=Occurrence.sort_key):
        for match in graph.anchors[occ]:
            node_var = names[occ]
            if use_values:
                values_vars.append(node_var)
                values_columns.append(match.uris)
                continue
            suffix = match_counter.get(node_var, 0)
            match_counter[node_var] = suffix + 1
            match_var = f"{node_var}_match" if suffix == 0 else f"{node_var}_match{suffix}"
            patterns.append(
                TriplePattern(Variable(node_var), Atom.iri(match.prop), Variable(match_var))
            )
            filters.append(RegexFilter(match_var, _token_pattern(match.token.text), "i"))

    # Datatype-property matches project the literal they bind.
    dataprop_vars: dict[str, list[str]] = {}
    for token, match in sorted(
        graph.covered.items(), key=lambda kv: (kv[0].start, kv[0].end)
    ):
        placement = graph.placements.get(token)
        if match.kind == PROPERTY_MATCH and isinstance(placement, Occurrence):
            node_var = names[placement]
            prop_var = f"{node_var}_{_NAME_SANITIZE.sub('_', uri_local_name(match.prop).lower()).strip('_')}"
            patterns.append(
                TriplePattern(Variable(node_var), Atom.iri(match.prop), Variable(prop_var))
            )
            dataprop_vars.setdefault(node_var, []).append(prop_var)

    for i, splice in enumerate(graph.splices):
        head_names = {var: names[occ] for var, occ in splice.heads}
        patterns.extend(splice_patterns(splice.rule, head_names, f"r{i}"))

    for occ in sorted(graph.occurrences, key=Occurrence.sort_key):
        optionals.append(
            [
                TriplePattern(
                    Variable(names[occ]),
                    Atom.iri(RDFS_LABEL),
                    Variable(f"{names[occ]}_label"),
                )
            ]
        )

    answer = answer_occurrence(graph)
    ordered = [answer] + [
        occ for occ in sorted(graph.occurrences, key=Occurrence.sort_key) if occ != answer
    ]
    projection: list[str] = []
    columns: list[tuple[str, str]] = []
    for occ in ordered:
        v = names[occ]
        projection.append(v)
        columns.append((v, occ.cls))
        projection.append(f"{v}_label")
        columns.append((f"{v}_label", LITERAL_COLUMN))
        for prop_var in dataprop_vars.get(v, ()):
            projection.append(prop_var)
            columns.append((prop_var, LITERAL_COLUMN))

    values = None
    if values_vars:
        rows = [
            [Atom.iri(u) for u in combo]
            for combo in itertools.product(*values_columns)
        ]
        values = (values_vars, rows)

    ast = QueryAST(
        projection=projection,
        patterns=patterns,
        filters=list(filters),
        optionals=optionals,
        distinct=True,
        limit=limit,
        values=values,
    )
    return GeneratedQuery(
        ast=ast,
        text=ast.to_text(),
        names=names,
        answer_var=names[answer],
        columns=columns,
    )


def generate_sparql(
    graph: QueryGraph, limit: int | None = 100, use_values: bool = False
) -> str:
    """SPARQL text for a query graph."""
    return plan_query(graph, limit=limit, use_values=use_values).text


def explain(graph: QueryGraph) -> dict[str, str]:
    """Human-readable note per covered token."""
    notes: dict[str, str] = {}
    for token in sorted(graph.covered, key=lambda t: (t.start, t.end)):
        match = graph.covered[token]
        values = ", ".join(match.match_values)
        if match.kind == CLASS_MATCH:
            notes[token.text] = f"class <{match.cls}> (matched: {values})"
        elif match.kind == PROPERTY_MATCH:
            notes[token.text] = f"property <{match.prop}> (matched: {values})"
        else:
            uris = ", ".join(f"<{u}>" for u in match.uris)
            notes[token.text] = (
                f"instances of <{match.cls}> via <{match.prop}>: {uris}"
            )
    for splice in graph.splices:
        notes[splice.token.text] = f"rewrite rule '{splice.rule.name}'"
    return notes

import random

import pytest

from soda.errors import EvaluationError, ParseError
from soda.rdf import RDF_TYPE, RDFS_LABEL, Atom, Triple, TripleSet, parse_ntriples
from soda.sparql import (
    BindingTable,
    CompareFilter,
    QueryAST,
    RegexFilter,
    TriplePattern,
    Variable,
    evaluate,
    parse_sparql,
)

from .oracles import brute_force_evaluate

TYPE = Atom.iri(RDF_TYPE)
LABEL = Atom.iri(RDFS_LABEL)
DRUG = Atom.iri("urn:Drug")


def _small_store():
    ts = TripleSet()
    ts.add(Triple(Atom.iri("urn:d1"), TYPE, DRUG))
    ts.add(Triple(Atom.iri("urn:d2"), TYPE, DRUG))
    ts.add(Triple(Atom.iri("urn:d1"), LABEL, Atom.literal("Aspirin")))
    return ts


def test_bgp_two_rows():
    ast = QueryAST(projection=["d"], patterns=[TriplePattern(Variable("d"), TYPE, DRUG)])
    table = evaluate(ast, _small_store())
    assert [row["d"].value for row in table.rows] == ["urn:d1", "urn:d2"]


def test_empty_pattern_rejected():
    with pytest.raises(EvaluationError):
        evaluate(QueryAST(projection=["d"], patterns=[]), _small_store())


def test_brca_regex_filter(qald_store):
    query = """SELECT ?g ?l WHERE {
      ?g <%s> <http://example.org/diseasome/genes> .
      ?g <%s> ?l .
      FILTER(regex(?l, "brca", "i"))
    }""" % (RDF_TYPE, RDFS_LABEL)
    table = evaluate(parse_sparql(query), qald_store)
    assert sorted(row["l"].value for row in table.rows) == ["BRCA1", "BRCA2"]


def test_filter_on_unbound_variable_names_it():
    ast = QueryAST(
        projection=["d"],
        patterns=[TriplePattern(Variable("d"), TYPE, DRUG)],
        filters=[RegexFilter("nope", "x")],
    )
    with pytest.raises(EvaluationError, match=r"\?nope"):
        evaluate(ast, _small_store())


def test_optional_left_join():
    ast = QueryAST(
        projection=["d", "l"],
        patterns=[TriplePattern(Variable("d"), TYPE, DRUG)],
        optionals=[[TriplePattern(Variable("d"), LABEL, Variable("l"))]],
    )
    table = evaluate(ast, _small_store())
    rows = {row["d"].value: row.get("l") for row in table.rows}
    assert rows["urn:d1"].value == "Aspirin"
    assert rows["urn:d2"] is None


def test_distinct_limit_offset():
    ts = _small_store()
    ts.add(Triple(Atom.iri("urn:d1"), LABEL, Atom.literal("Aspirin2")))
    ast = QueryAST(
        projection=["d"],
        patterns=[
            TriplePattern(Variable("d"), TYPE, DRUG),
            TriplePattern(Variable("d"), LABEL, Variable("l")),
        ],
        distinct=True,
    )
    assert len(evaluate(ast, ts)) == 1
    ast2 = QueryAST(
        projection=["d"],
        patterns=[TriplePattern(Variable("d"), TYPE, DRUG)],
        limit=1,
        offset=1,
    )
    assert [r["d"].value for r in evaluate(ast2, ts).rows] == ["urn:d2"]


def test_values_restricts_bindings():
    ast = QueryAST(
        projection=["d"],
        patterns=[TriplePattern(Variable("d"), TYPE, DRUG)],
        values=(["d"], [[Atom.iri("urn:d2")]]),
    )
    assert [r["d"].value for r in evaluate(ast, _small_store()).rows] == ["urn:d2"]


def test_numeric_comparisons_and_non_numeric_false():
    ts = TripleSet()
    ts.add(Triple(Atom.iri("urn:a"), Atom.iri("urn:year"),
                  Atom.literal("5", datatype="http://www.w3.org/2001/XMLSchema#integer")))
    ts.add(Triple(Atom.iri("urn:b"), Atom.iri("urn:year"), Atom.literal("word")))
    base = [TriplePattern(Variable("s"), Atom.iri("urn:year"), Variable("y"))]
    num = Atom.literal("4", datatype="http://www.w3.org/2001/XMLSchema#integer")
    gt = QueryAST(projection=["s"], patterns=base, filters=[CompareFilter("y", ">", num)])
    assert [r["s"].value for r in evaluate(gt, ts).rows] == ["urn:a"]
    eq = QueryAST(
        projection=["s"], patterns=base, filters=[CompareFilter("y", "=", Atom.literal("word"))]
    )
    assert [r["s"].value for r in evaluate(eq, ts).rows] == ["urn:b"]


def test_projection_must_be_bound():
    ast = QueryAST(projection=["zzz"], patterns=[TriplePattern(Variable("d"), TYPE, DRUG)])
    with pytest.raises(EvaluationError):
        evaluate(ast, _small_store())


def test_deterministic_serialization(qald_store):
    query = """SELECT DISTINCT ?d ?l WHERE {
      ?d <%s> <http://example.org/drugbank/drugs> .
      OPTIONAL { ?d <%s> ?l . }
    }""" % (RDF_TYPE, RDFS_LABEL)
    first = evaluate(parse_sparql(query), qald_store).serialize()
    second = evaluate(parse_sparql(query), qald_store).serialize()
    assert first == second


def test_monotonicity_adding_triples():
    ts = _small_store()
    ast = QueryAST(projection=["d"], patterns=[TriplePattern(Variable("d"), TYPE, DRUG)])
    before = {r["d"].value for r in evaluate(ast, ts).rows}
    ts2 = TripleSet(list(ts))
    ts2.add(Triple(Atom.iri("urn:d3"), TYPE, DRUG))
    after = {r["d"].value for r in evaluate(ast, ts2).rows}
    assert before <= after


def test_parser_round_trips_canonical_text():
    text = "\n".join(
        [
            "SELECT DISTINCT ?a ?b WHERE {",
            "  ?a <urn:p> ?b .",
            '  ?a <urn:q> "x" .',
            '  FILTER(regex(?b, "pat", "i"))',
            "  FILTER(?b != <urn:z>)",
            "  OPTIONAL { ?a <urn:r> ?c . }",
            "  VALUES (?a) { (<urn:m>) (<urn:n>) }",
            "}",
            "LIMIT 10",
            "OFFSET 2",
        ]
    )
    assert parse_sparql(text).to_text() == text


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_sparql("SELECT WHERE { ?a <urn:p> ?b . }")
    with pytest.raises(ParseError):
        parse_sparql("SELECT ?a WHERE { ?a <urn:p> ?b }")
    with pytest.raises(ParseError):
        parse_sparql("ASK { ?a ?b ?c . }")


def _random_query(store, rng):
    triples = sorted(store, key=lambda t: t.to_ntriples())
    patterns = []
    var_names = ["a", "b", "c"]
    for i in range(rng.randint(1, 3)):
        t = rng.choice(triples)
        subject = Variable(rng.choice(var_names)) if rng.random() < 0.7 else t.subject
        obj = Variable(rng.choice(var_names)) if rng.random() < 0.5 else t.object
        patterns.append(TriplePattern(subject, t.predicate, obj))
    bound = sorted({v for p in patterns for v in p.variables()})
    if not bound:
        patterns.append(TriplePattern(Variable("a"), Atom.iri(RDF_TYPE), Variable("b")))
        bound = ["a", "b"]
    projection = bound[: rng.randint(1, len(bound))]
    filters = []
    if rng.random() < 0.4:
        filters.append(RegexFilter(rng.choice(bound), rng.choice("aeds"), "i"))
    return QueryAST(
        projection=projection,
        patterns=patterns,
        filters=filters,
        distinct=rng.random() < 0.5,
        limit=rng.choice([None, 5, 20]),
    )


def test_matches_brute_force_oracle(qald_store):
    rng = random.Random(1234)
    for _ in range(40):
        ast = _random_query(qald_store, rng)
        got = evaluate(ast, qald_store)
        expected = brute_force_evaluate(ast, qald_store)
        assert got.rows == expected, ast.to_text()


def test_binding_table_serialize_shape():
    table = BindingTable(["a", "b"], [{"a": Atom.iri("urn:x")}])
    assert table.serialize() == "a\tb\n<urn:x>\t\n"

import pytest

from soda.errors import GenerationError
from soda.generate import explain, generate_sparql, plan_query, variable_names
from soda.index import IndexConfig, build_inverted_index
from soda.matcher import build_match_matrix
from soda.pagerank import compute_pagerank
from soda.querygraph import QueryGraph, build_query_graphs, rank_query_graphs
from soda.rdf import RDF_TYPE, RDFS_LABEL
from soda.schema import extract_schema_graph
from soda.sparql import evaluate, parse_sparql

from .oracles import graph_join_answers

DGB = "http://example.org/drugbank/"
DIS = "http://example.org/diseasome/"


@pytest.fixture(scope="module")
def qald_schema(qald_store):
    return extract_schema_graph(qald_store)


@pytest.fixture(scope="module")
def qald_index(qald_store):
    return build_inverted_index(
        qald_store, compute_pagerank(qald_store), IndexConfig(), dataset_id="micro-qald"
    )


def _graphs_for(question, index, schema, **kwargs):
    matrix = build_match_matrix(question, index)
    return rank_query_graphs(build_query_graphs(matrix, schema, **kwargs))


def test_figure_pipeline_query_text(qald_index, qald_schema):
    top = _graphs_for(
        "What are the drugs for diseases associated with the BRCA genes?",
        qald_index,
        qald_schema,
    )[0]
    text = generate_sparql(top)
    assert f"<{RDF_TYPE}> <{DGB}drugs>" in text
    assert f"<{RDF_TYPE}> <{DIS}diseases>" in text
    assert f"<{RDF_TYPE}> <{DIS}genes>" in text
    assert f"<{DIS}associatedGene>" in text
    assert 'FILTER(regex(?genes_match, "brca", "i"))' in text
    assert "SELECT DISTINCT" in text and "LIMIT 100" in text


def test_single_node_graph_shape(qald_index, qald_schema):
    top = _graphs_for("drugs", qald_index, qald_schema)[0]
    text = generate_sparql(top)
    assert text.startswith("SELECT DISTINCT ?drugs ?drugs_label WHERE {")
    assert f"?drugs <{RDF_TYPE}> <{DGB}drugs> ." in text
    assert f"OPTIONAL {{ ?drugs <{RDFS_LABEL}> ?drugs_label . }}" in text
    assert text.rstrip().endswith("LIMIT 100")


def test_property_match_emits_edge_pattern(qald_index, qald_schema):
    top = _graphs_for(
        "What are the possible disease targets of Ibuprofen?", qald_index, qald_schema
    )[0]
    text = generate_sparql(top)
    assert f"?drugs <{DIS}possible-DiseaseTarget> ?diseases ." in text


def test_empty_graph_rejected():
    with pytest.raises(GenerationError):
        generate_sparql(QueryGraph((), (), {}, {}))


def test_variable_name_collisions_get_suffixes():
    from soda.querygraph import GraphEdge, Occurrence

    a = Occurrence("http://example.org/a/thing")
    b = Occurrence("http://example.org/b/thing")
    graph = QueryGraph(
        (a, b), (GraphEdge(a, "urn:p", b),), {}, {}
    )
    names = variable_names(graph)
    assert sorted(names.values()) == ["thing", "thing1"]


def test_parse_back_round_trip(qald_index, qald_schema):
    for question in (
        "What are the drugs for diseases associated with the BRCA genes?",
        "Which drugs are used for asthma?",
        "What are the possible disease targets of Ibuprofen?",
    ):
        for graph in _graphs_for(question, qald_index, qald_schema):
            text = generate_sparql(graph)
            assert parse_sparql(text).to_text() == text


def test_variable_hygiene(qald_index, qald_schema):
    for graph in _graphs_for(
        "Which drugs are used for asthma?", qald_index, qald_schema
    ):
        gen = plan_query(graph)
        assert len(gen.ast.projection) == len(set(gen.ast.projection))
        where_vars = gen.ast.all_variables()
        for v in gen.ast.projection:
            assert v in where_vars
        assert len(set(gen.names.values())) == len(gen.names)


def test_execution_matches_graph_join_oracle(qald_store, qald_index, qald_schema):
    for question in (
        "What are the drugs for diseases associated with the BRCA genes?",
        "Which drugs are used for asthma?",
    ):
        for graph in _graphs_for(question, qald_index, qald_schema)[:5]:
            gen = plan_query(graph, limit=None)
            table = evaluate(parse_sparql(gen.text), qald_store)
            occ_vars = [gen.names[o] for o in sorted(graph.occurrences, key=lambda o: o.sort_key())]
            got = {
                tuple(row.get(v) for v in occ_vars) for row in table.rows
            }
            expected = graph_join_answers(graph, qald_store)
            assert got == expected, gen.text


def test_values_mode_equivalent_on_fixture(qald_store, qald_index, qald_schema):
    top = _graphs_for(
        "Which drugs are used for asthma?", qald_index, qald_schema
    )[0]
    regex_gen = plan_query(top, limit=None, use_values=False)
    values_gen = plan_query(top, limit=None, use_values=True)
    assert "VALUES" in values_gen.text
    assert parse_sparql(values_gen.text).to_text() == values_gen.text
    by_regex = evaluate(parse_sparql(regex_gen.text), qald_store)
    by_values = evaluate(parse_sparql(values_gen.text), qald_store)
    var = regex_gen.answer_var
    assert {r.get(var) for r in by_regex.rows} == {r.get(var) for r in by_values.rows}


def test_answer_column_prefers_first_class_match(qald_index, qald_schema):
    top = _graphs_for(
        "What are the drugs for diseases associated with the BRCA genes?",
        qald_index,
        qald_schema,
    )[0]
    gen = plan_query(top)
    assert gen.answer_var == "drugs"
    assert gen.columns[0] == ("drugs", DGB + "drugs")
    # label columns sit next to their URI column
    vars_only = [v for v, _ in gen.columns]
    assert vars_only.index("drugs_label") == vars_only.index("drugs") + 1


def test_answer_column_without_class_match(qald_index, qald_schema):
    top = _graphs_for(
        "What are the possible disease targets of Ibuprofen?", qald_index, qald_schema
    )[0]
    gen = plan_query(top)
    assert gen.answer_var == "diseases"


def test_explanations_cover_all_tokens(qald_index, qald_schema):
    matrix = build_match_matrix(
        "What are the drugs for diseases associated with the BRCA genes?", qald_index
    )
    graph = rank_query_graphs(build_query_graphs(matrix, qald_schema))[0]
    notes = explain(graph)
    assert set(notes) == {"drugs", "diseases", "BRCA", "genes"}
    assert "gene_brca1" in notes["BRCA"]

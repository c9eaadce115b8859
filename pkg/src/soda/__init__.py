"""Question answering over RDF knowledge graphs without training data.

The pipeline: load RDF data into a triple store, extract the effective
schema from instance data, build an inverted index with PageRank scores,
then translate English questions into ranked, executable SPARQL queries.
"""

__version__ = "0.1.0"

from soda.rdf import Atom, Triple, TripleSet, parse_ntriples
from soda.sparql import BindingTable, QueryAST, evaluate, parse_sparql
from soda.schema import SchemaGraph, extract_schema_graph
from soda.index import IndexConfig, IndexEntry, InvertedIndex, build_inverted_index
from soda.pagerank import PageRankScores, compute_pagerank
from soda.config import Config, load_config
from soda.engine import EngineSession

__all__ = [
    "Atom",
    "Triple",
    "TripleSet",
    "parse_ntriples",
    "BindingTable",
    "QueryAST",
    "evaluate",
    "parse_sparql",
    "SchemaGraph",
    "extract_schema_graph",
    "IndexConfig",
    "IndexEntry",
    "InvertedIndex",
    "build_inverted_index",
    "PageRankScores",
    "compute_pagerank",
    "Config",
    "load_config",
    "EngineSession",
]

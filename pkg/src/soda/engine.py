"""Engine session: immutable artifacts plus the full question pipeline."""

from __future__ import annotations

import os
import shutil
from dataclasses import dataclass, field

from soda.config import Config
from soda.embeddings import EmbeddingTable, load_word2vec_text
from soda.errors import ConfigError, UnmatchedQuestionError
from soda.generate import LITERAL_COLUMN, GeneratedQuery, explain, plan_query
from soda.index import (
    InvertedIndex,
    build_inverted_index,
    dataset_timestamp,
    load_index,
    save_index,
)
from soda.matcher import build_match_matrix, skipped_words
from soda.pagerank import PageRankScores, compute_pagerank
from soda.querygraph import QueryGraph, build_query_graphs, rank_query_graphs
from soda.rdf import Atom, TripleSet, parse_ntriples
from soda.remote import remote_query
from soda.rules import RewriteRule, load_rules, trigger_keys
from soda.schema import SchemaGraph, extract_schema_graph, load_schema, save_schema
from soda.sparql import evaluate, parse_sparql

INDEX_FILE = "index.tsv"
SCHEMA_FILE = "schema.tsv"
DATA_FILE = "data.nt"
PAGERANK_FILE = "pagerank.txt"
UNTYPED_FILE = "untyped.txt"


@dataclass
class RankedQuery:
    rank: int
    graph: QueryGraph
    sparql: str
    explanation: dict[str, str]
    score_sum: float
    empty: bool = False


@dataclass
class AnswerTable:
    """Result rows with one column per projected variable.

    The designated answer column comes first; URI columns are followed by
    their label column.
    """

    columns: list[tuple[str, str]]  # (variable, class IRI or "literal")
    rows: list[list[Atom | None]]

    def answer_values(self) -> set[Atom]:
        return {row[0] for row in self.rows if row[0] is not None}

    def display_rows(self) -> list[list[str]]:
        out = []
        for row in self.rows:
            out.append(["" if a is None else a.value for a in row])
        return out


@dataclass
class BuildArtifacts:
    index: InvertedIndex
    schema: SchemaGraph
    pagerank: PageRankScores
    untyped: list[str]
    parse_errors: list[tuple[int, str]]


def build_artifacts(
    data_path: str, config: Config, dataset_id: str | None = None, lenient: bool = False
) -> tuple[TripleSet, BuildArtifacts]:
    """Parse the data and build index + schema with diagnostics."""
    parse_errors: list[tuple[int, str]] = []
    with open(data_path, "rb") as fh:
        store = parse_ntriples(fh, lenient=lenient, errors=parse_errors)
    dataset = dataset_id or os.path.splitext(os.path.basename(data_path))[0]
    pagerank = compute_pagerank(
        store, damping=config.pagerank_damping, tol=config.pagerank_tol
    )
    untyped: list[str] = []
    index = build_inverted_index(
        store,
        pagerank,
        config.index_config(),
        dataset_id=dataset,
        built=dataset_timestamp(data_path),
        diagnostics=untyped,
    )
    schema_untyped: list[str] = []
    schema = extract_schema_graph(store, schema_untyped, dataset_id=dataset)
    merged = sorted(set(untyped) | set(schema_untyped))
    return store, BuildArtifacts(index, schema, pagerank, merged, parse_errors)


def write_artifacts(
    data_path: str, out_dir: str, store: TripleSet, artifacts: BuildArtifacts
) -> None:
    os.makedirs(out_dir, exist_ok=True)
    save_index(artifacts.index, os.path.join(out_dir, INDEX_FILE))
    save_schema(artifacts.schema, os.path.join(out_dir, SCHEMA_FILE))
    data_copy = os.path.join(out_dir, DATA_FILE)
    if os.path.abspath(data_path) != os.path.abspath(data_copy):
        shutil.copyfile(data_path, data_copy)

    pr = artifacts.pagerank
    top = sorted(pr.scores.items(), key=lambda kv: (-kv[1], kv[0]))[:10]
    lines = [
        "#soda-pagerank v1",
        f"damping={pr.damping}",
        f"iterations={pr.iterations}",
        f"residual={pr.residual:.3e}",
        f"nodes={len(pr.scores)}",
    ]
    lines += [f"top\t{iri}\t{score:.6f}" for iri, score in top]
    with open(os.path.join(out_dir, PAGERANK_FILE), "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")

    with open(os.path.join(out_dir, UNTYPED_FILE), "w", encoding="utf-8") as fh:
        fh.write(f"#untyped-instances {len(artifacts.untyped)}\n")
        for iri in artifacts.untyped:
            fh.write(iri + "\n")


@dataclass
class EngineSession:
    """Loaded artifacts for one dataset; immutable once initialized."""

    config: Config
    index: InvertedIndex
    schema: SchemaGraph
    store: TripleSet | None = None
    rules: list[RewriteRule] = field(default_factory=list)
    embeddings: EmbeddingTable | None = None

    @property
    def dataset_id(self) -> str:
        return self.index.dataset_id

    def __post_init__(self):
        if self.schema.dataset_id and self.index.dataset_id:
            if self.schema.dataset_id != self.index.dataset_id:
                raise ConfigError(
                    "artifact mismatch: index is for %r, schema for %r"
                    % (self.index.dataset_id, self.schema.dataset_id)
                )
        expected = self.config.index_config().digest()
        if self.index.config_digest and self.index.config_digest != expected:
            raise ConfigError(
                "index was built with a different index configuration "
                f"(digest {self.index.config_digest}, current {expected}); re-run indexing"
            )
        if self.config.exec_mode == "embedded" and self.store is None:
            raise ConfigError("embedded execution needs the triple store loaded")
        if self.config.exec_mode == "remote" and not self.config.exec_endpoint:
            raise ConfigError("exec.mode=remote needs exec.endpoint")

    @classmethod
    def build(cls, data_path: str, config: Config | None = None) -> "EngineSession":
        config = config or Config()
        store, artifacts = build_artifacts(data_path, config)
        return cls._finish_init(config, artifacts.index, artifacts.schema, store)

    @classmethod
    def load(cls, artifact_dir: str, config: Config | None = None) -> "EngineSession":
        config = config or Config()
        index = load_index(os.path.join(artifact_dir, INDEX_FILE))
        schema = load_schema(os.path.join(artifact_dir, SCHEMA_FILE))
        store = None
        if config.exec_mode == "embedded":
            data_path = os.path.join(artifact_dir, DATA_FILE)
            if not os.path.exists(data_path):
                raise ConfigError(f"missing {DATA_FILE} in {artifact_dir}")
            with open(data_path, "rb") as fh:
                store = parse_ntriples(fh)
        return cls._finish_init(config, index, schema, store)

    @classmethod
    def _finish_init(cls, config, index, schema, store) -> "EngineSession":
        rules = load_rules(config.rules_file) if config.rules_file else []
        embeddings = (
            load_word2vec_text(config.match_embeddings) if config.match_embeddings else None
        )
        return cls(
            config=config,
            index=index,
            schema=schema,
            store=store,
            rules=rules,
            embeddings=embeddings,
        )

    def interpretations(
        self, question: str, top_n: int | None = None, ablation: bool = False
    ) -> list[tuple[QueryGraph, GeneratedQuery]]:
        """Ranked query graphs with their generated queries (not executed)."""
        matrix = build_match_matrix(
            question,
            self.index,
            self.embeddings,
            self.config.matcher_config(ablation=ablation),
            extra_keys=trigger_keys(self.rules),
        )
        if not matrix.tokens:
            raise UnmatchedQuestionError(skipped_words(question, []))
        graphs = build_query_graphs(
            matrix, self.schema, self.rules, self.config.builder_caps()
        )
        ranked = rank_query_graphs(graphs, ablation=ablation)
        n = top_n if top_n is not None else self.config.gen_top_n_interpretations
        limit = self.config.gen_limit if self.config.gen_limit > 0 else None
        return [
            (g, plan_query(g, limit=limit, use_values=self.config.gen_use_values))
            for g in ranked[:n]
        ]

    def answer(
        self,
        question: str,
        top_n: int | None = None,
        ablation: bool = False,
        limit_override: int | None | str = "config",
    ) -> list[tuple[RankedQuery, AnswerTable]]:
        """Full pipeline: tokenize, rank, build graphs, generate, execute."""
        planned = self.interpretations(question, top_n=top_n, ablation=ablation)
        results = []
        for rank, (graph, gen) in enumerate(planned, start=1):
            if limit_override != "config":
                gen = plan_query(
                    graph, limit=limit_override, use_values=self.config.gen_use_values
                )
            if self.config.exec_mode == "remote":
                bindings = remote_query(
                    self.config.exec_endpoint, gen.text, timeout=self.config.exec_timeout
                )
            else:
                bindings = evaluate(parse_sparql(gen.text), self.store)
            var_order = [var for var, _ in gen.columns]
            rows = [[row.get(v) for v in var_order] for row in bindings.rows]
            table = AnswerTable(columns=list(gen.columns), rows=rows)
            results.append(
                (
                    RankedQuery(
                        rank=rank,
                        graph=graph,
                        sparql=gen.text,
                        explanation=explain(graph),
                        score_sum=graph.score_sum,
                        empty=not rows,
                    ),
                    table,
                )
            )
        return results

"""Command-line interface: index, ask, eval, serve.

Exit codes: 0 ok, 2 I/O error, 3 no interpretation for the question,
4 configuration error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from soda.bench import evaluate_benchmark, load_benchmark
from soda.config import DEFAULT_PORT, Config, load_config
from soda.engine import EngineSession, build_artifacts, write_artifacts
from soda.errors import (
    BenchmarkError,
    ConfigError,
    NoInterpretationError,
    ParseError,
    SodaError,
    StoreLoadError,
    UnmatchedQuestionError,
)

EXIT_OK = 0
EXIT_IO = 2
EXIT_NO_INTERPRETATION = 3
EXIT_CONFIG = 4


def _load_cli_config(args) -> Config:
    path = getattr(args, "config", None) or os.environ.get("SODA_CONFIG")
    return load_config(path)


def cmd_index(args) -> int:
    config = _load_cli_config(args)
    if not os.path.exists(args.data):
        print(f"error: no such file: {args.data}", file=sys.stderr)
        return EXIT_IO
    store, artifacts = build_artifacts(args.data, config, lenient=args.lenient)
    write_artifacts(args.data, args.out, store, artifacts)
    if artifacts.parse_errors:
        print(
            f"warning: skipped {len(artifacts.parse_errors)} malformed line(s)",
            file=sys.stderr,
        )
    if artifacts.untyped:
        print(
            f"warning: {len(artifacts.untyped)} untyped instance(s), see untyped.txt",
            file=sys.stderr,
        )
    print(
        f"indexed {len(store)} triples from {args.data}: "
        f"{len(artifacts.index)} index entries, "
        f"{len(artifacts.schema.edges)} schema edges -> {args.out}"
    )
    return EXIT_OK


def _format_answers_table(results) -> str:
    blocks = []
    for ranked, table in results:
        lines = [
            f"# {ranked.rank}  score={ranked.score_sum:.6f}"
            + ("  (no results)" if ranked.empty else "")
        ]
        for token, note in ranked.explanation.items():
            lines.append(f"  {token}: {note}")
        lines.append(ranked.sparql)
        header = [var for var, _ in table.columns]
        lines.append("\t".join(header))
        for row in table.display_rows():
            lines.append("\t".join(row))
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def _results_json(results) -> list[dict]:
    out = []
    for ranked, table in results:
        out.append(
            {
                "rank": ranked.rank,
                "score": ranked.score_sum,
                "sparql": ranked.sparql,
                "explanation": ranked.explanation,
                "empty": ranked.empty,
                "columns": [[var, cls] for var, cls in table.columns],
                "rows": table.display_rows(),
            }
        )
    return out


def cmd_ask(args) -> int:
    config = _load_cli_config(args)
    session = EngineSession.load(args.artifacts, config)
    try:
        results = session.answer(args.question, top_n=args.top, ablation=args.ablation)
    except UnmatchedQuestionError as exc:
        print(f"no interpretation: {exc}", file=sys.stderr)
        return EXIT_NO_INTERPRETATION
    except NoInterpretationError as exc:
        print(f"no interpretation: {exc}", file=sys.stderr)
        return EXIT_NO_INTERPRETATION
    if args.format == "json":
        print(json.dumps({"question": args.question, "interpretations": _results_json(results)}, indent=2))
    else:
        sys.stdout.write(_format_answers_table(results))
    return EXIT_OK


def cmd_eval(args) -> int:
    config = _load_cli_config(args)
    session = EngineSession.load(args.artifacts, config)
    items = load_benchmark(args.benchmark)
    report = evaluate_benchmark(items, session, ablation=args.ablation)
    print(report.to_table())
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(report.to_json(), fh, indent=2)
        print(f"report written to {args.json}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from soda.service import create_app

    config = _load_cli_config(args)
    session = EngineSession.load(args.artifacts, config)
    app = create_app(session, static_dir=args.static or None)
    port = args.port or int(os.environ.get("SODA_PORT", DEFAULT_PORT))
    uvicorn.run(app, host=args.host, port=port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="soda",
        description="Question answering over RDF knowledge graphs without training data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_index = sub.add_parser("index", help="build index and schema artifacts")
    p_index.add_argument("data", help="N-Triples file")
    p_index.add_argument("--config", help="config file (key=value lines)")
    p_index.add_argument("--out", default="artifacts", help="output directory")
    p_index.add_argument(
        "--lenient", action="store_true", help="skip malformed lines instead of aborting"
    )
    p_index.set_defaults(func=cmd_index)

    p_ask = sub.add_parser("ask", help="answer a question")
    p_ask.add_argument("question")
    p_ask.add_argument("--config")
    p_ask.add_argument("--artifacts", default="artifacts")
    p_ask.add_argument("--top", type=int, default=None, help="interpretations to return")
    p_ask.add_argument("--format", choices=("table", "json"), default="table")
    p_ask.add_argument("--ablation", action="store_true", help=argparse.SUPPRESS)
    p_ask.set_defaults(func=cmd_ask)

    p_eval = sub.add_parser("eval", help="run a benchmark")
    p_eval.add_argument("benchmark", help="JSON-lines benchmark file")
    p_eval.add_argument("--config")
    p_eval.add_argument("--artifacts", default="artifacts")
    p_eval.add_argument(
        "--ablation",
        action="store_true",
        help="string-similarity scoring with minimal subgraph first",
    )
    p_eval.add_argument("--json", help="also write the JSON report here")
    p_eval.set_defaults(func=cmd_eval)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--config")
    p_serve.add_argument("--artifacts", default="artifacts")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=None)
    p_serve.add_argument("--static", help="directory of web UI assets to serve")
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ParseError, StoreLoadError, BenchmarkError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SodaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

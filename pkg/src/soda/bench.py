"""Benchmark loading and macro-averaged evaluation.

Each item pairs a question with gold knowledge: either a SPARQL query run
against the store or an explicit answer set. The rank-1 interpretation's
answer column is compared to gold; precision, recall, and F1 are
macro-averaged over all items, and correct@1 counts exact answers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from soda.engine import EngineSession
from soda.errors import BenchmarkError, SodaError
from soda.rdf import Atom
from soda.sparql import evaluate, parse_sparql

CORRECT = "correct"
PARTIAL = "partial"
WRONG = "wrong"
ERROR = "error"


@dataclass(frozen=True)
class BenchmarkItem:
    id: str
    question: str
    gold_sparql: str | None = None
    gold_answers: tuple[str, ...] | None = None

    def validate(self) -> None:
        has_sparql = self.gold_sparql is not None
        has_answers = self.gold_answers is not None
        if has_sparql == has_answers:
            raise BenchmarkError(
                f"item {self.id!r}: exactly one of gold_sparql/gold_answers required"
            )


def load_benchmark(path: str) -> list[BenchmarkItem]:
    """Parse a JSON-lines benchmark file and validate every item."""
    items: list[BenchmarkItem] = []
    seen: set[str] = set()
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise BenchmarkError(f"cannot read benchmark {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        if not raw.strip():
            continue
        try:
            record = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise BenchmarkError(f"{path}:{lineno}: bad JSON: {exc}") from exc
        if not isinstance(record, dict) or "id" not in record or "question" not in record:
            raise BenchmarkError(f"{path}:{lineno}: items need 'id' and 'question'")
        item = BenchmarkItem(
            id=str(record["id"]),
            question=str(record["question"]),
            gold_sparql=record.get("gold_sparql"),
            gold_answers=(
                tuple(str(a) for a in record["gold_answers"])
                if "gold_answers" in record
                else None
            ),
        )
        item.validate()
        if item.id in seen:
            raise BenchmarkError(f"{path}:{lineno}: duplicate item id {item.id!r}")
        seen.add(item.id)
        items.append(item)
    return items


def _atom_key(atom: Atom) -> tuple:
    """Comparison key: numeric literals compare by value, strings exactly."""
    num = atom.numeric_value()
    if num is not None:
        return ("num", num)
    if atom.is_iri:
        return ("iri", atom.value)
    return ("str", atom.value)


def _gold_string_key(value: str) -> tuple:
    if value.startswith(("http://", "https://", "urn:", "file://")):
        return ("iri", value)
    try:
        return ("num", float(value))
    except ValueError:
        return ("str", value)


@dataclass
class ItemResult:
    id: str
    question: str
    precision: float
    recall: float
    f1: float
    status: str
    detail: str = ""


@dataclass
class EvalReport:
    items: list[ItemResult]
    macro_precision: float
    macro_recall: float
    macro_f1: float
    correct_at_1: int
    ablation: bool
    config_snapshot: dict = field(default_factory=dict)

    # Benchmark tooling differs on the empty-vs-empty case, so the
    # convention used here is stated in every report.
    conventions: str = "empty gold and empty answer score P=R=1; empty answer with nonempty gold scores 0"

    def counts(self) -> dict[str, int]:
        out = {CORRECT: 0, PARTIAL: 0, WRONG: 0, ERROR: 0}
        for item in self.items:
            out[item.status] += 1
        return out

    def to_json(self) -> dict:
        return {
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "macro_f1": self.macro_f1,
            "correct_at_1": self.correct_at_1,
            "total": len(self.items),
            "ablation": self.ablation,
            "conventions": self.conventions,
            "counts": self.counts(),
            "config": self.config_snapshot,
            "items": [
                {
                    "id": r.id,
                    "question": r.question,
                    "precision": r.precision,
                    "recall": r.recall,
                    "f1": r.f1,
                    "status": r.status,
                    "detail": r.detail,
                }
                for r in self.items
            ],
        }

    def to_table(self) -> str:
        lines = [
            f"{'id':<14} {'P':>6} {'R':>6} {'F1':>6}  status",
            "-" * 48,
        ]
        for r in self.items:
            lines.append(
                f"{r.id:<14} {r.precision:>6.3f} {r.recall:>6.3f} {r.f1:>6.3f}  {r.status}"
            )
        lines.append("-" * 48)
        lines.append(
            f"{'macro':<14} {self.macro_precision:>6.3f} {self.macro_recall:>6.3f} "
            f"{self.macro_f1:>6.3f}  correct@1 {self.correct_at_1}/{len(self.items)}"
        )
        if self.ablation:
            lines.append("(ablation: string-similarity scores, minimal subgraph first)")
        return "\n".join(lines)


def _metrics(answer: set, gold: set) -> tuple[float, float, float]:
    if not answer and not gold:
        return (1.0, 1.0, 1.0)
    if not answer or not gold:
        return (0.0, 0.0, 0.0)
    hit = len(answer & gold)
    precision = hit / len(answer)
    recall = hit / len(gold)
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return (precision, recall, f1)


def gold_answer_set(item: BenchmarkItem, session: EngineSession) -> set[tuple]:
    if item.gold_answers is not None:
        return {_gold_string_key(v) for v in item.gold_answers}
    if session.store is None:
        raise BenchmarkError("gold_sparql items need an embedded store")
    ast = parse_sparql(item.gold_sparql)
    table = evaluate(ast, session.store)
    first_var = table.header[0]
    return {
        _atom_key(row[first_var]) for row in table.rows if first_var in row
    }


def evaluate_benchmark(
    items: list[BenchmarkItem], session: EngineSession, ablation: bool = False
) -> EvalReport:
    """Run the engine on every item and compute macro metrics.

    Per-item failures never abort the run; they score zero with
    status=error.
    """
    results: list[ItemResult] = []
    for item in items:
        try:
            gold = gold_answer_set(item, session)
            answers = session.answer(
                item.question, top_n=1, ablation=ablation, limit_override=None
            )
            answer_set = (
                {_atom_key(a) for a in answers[0][1].answer_values()} if answers else set()
            )
            precision, recall, f1 = _metrics(answer_set, gold)
            if precision == 1.0 and recall == 1.0:
                status = CORRECT
            elif f1 == 0.0:
                status = WRONG
            else:
                status = PARTIAL
            results.append(
                ItemResult(item.id, item.question, precision, recall, f1, status)
            )
        except SodaError as exc:
            results.append(
                ItemResult(item.id, item.question, 0.0, 0.0, 0.0, ERROR, str(exc))
            )
    n = len(results)
    macro_p = sum(r.precision for r in results) / n if n else 0.0
    macro_r = sum(r.recall for r in results) / n if n else 0.0
    macro_f1 = sum(r.f1 for r in results) / n if n else 0.0
    return EvalReport(
        items=results,
        macro_precision=macro_p,
        macro_recall=macro_r,
        macro_f1=macro_f1,
        correct_at_1=sum(1 for r in results if r.status == CORRECT),
        ablation=ablation,
        config_snapshot=dict(session.config.snapshot(), ablation=ablation),
    )

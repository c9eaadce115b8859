"""SPARQL subset: AST, text form, and evaluation over a TripleSet.

Covers exactly what the query generator emits plus what benchmark gold
queries need: SELECT with a basic graph pattern, FILTER (case-insensitive
regex, equality, numeric comparison), single-level OPTIONAL blocks, VALUES,
DISTINCT, LIMIT and OFFSET. Row order is deterministic (lexicographic on
bound values), so serialized results are byte-stable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from soda.errors import EvaluationError, ParseError
from soda.rdf import Atom, TripleSet, XSD_DECIMAL, XSD_INTEGER


@dataclass(frozen=True, slots=True)
class Variable:
    name: str

    def to_text(self) -> str:
        return f"?{self.name}"


Term = Atom | Variable


@dataclass(frozen=True, slots=True)
class TriplePattern:
    subject: Term
    predicate: Term
    object: Term

    def terms(self) -> tuple[Term, Term, Term]:
        return (self.subject, self.predicate, self.object)

    def variables(self) -> set[str]:
        return {t.name for t in self.terms() if isinstance(t, Variable)}

    def to_text(self) -> str:
        return "%s %s %s ." % tuple(_term_text(t) for t in self.terms())


@dataclass(frozen=True, slots=True)
class RegexFilter:
    var: str
    pattern: str
    flags: str = ""

    def to_text(self) -> str:
        if self.flags:
            return 'FILTER(regex(?%s, "%s", "%s"))' % (self.var, _escape_lit(self.pattern), self.flags)
        return 'FILTER(regex(?%s, "%s"))' % (self.var, _escape_lit(self.pattern))


@dataclass(frozen=True, slots=True)
class CompareFilter:
    var: str
    op: str  # = != < > <= >=
    value: Atom

    def to_text(self) -> str:
        return "FILTER(?%s %s %s)" % (self.var, self.op, _term_text(self.value))


FilterExpr = RegexFilter | CompareFilter


@dataclass
class QueryAST:
    projection: list[str]
    patterns: list[TriplePattern]
    filters: list[FilterExpr] = field(default_factory=list)
    optionals: list[list[TriplePattern]] = field(default_factory=list)
    distinct: bool = False
    limit: int | None = None
    offset: int | None = None
    values: tuple[list[str], list[list[Atom]]] | None = None

    def pattern_variables(self) -> set[str]:
        out: set[str] = set()
        for p in self.patterns:
            out |= p.variables()
        return out

    def all_variables(self) -> set[str]:
        out = self.pattern_variables()
        for block in self.optionals:
            for p in block:
                out |= p.variables()
        if self.values:
            out |= set(self.values[0])
        return out

    def validate(self) -> None:
        if not self.patterns:
            raise EvaluationError("empty basic graph pattern")
        known = self.all_variables()
        for v in self.projection:
            if v not in known:
                raise EvaluationError(f"projected variable ?{v} not bound anywhere")
        bgp_vars = self.pattern_variables()
        for f in self.filters:
            if f.var not in bgp_vars:
                raise EvaluationError(f"filter references unbound variable ?{f.var}")

    def to_text(self) -> str:
        """Canonical query text; parse_sparql inverts this exactly."""
        head = "SELECT "
        if self.distinct:
            head += "DISTINCT "
        head += " ".join(f"?{v}" for v in self.projection)
        lines = [head + " WHERE {"]
        for p in self.patterns:
            lines.append("  " + p.to_text())
        for f in self.filters:
            lines.append("  " + f.to_text())
        for block in self.optionals:
            inner = " ".join(p.to_text() for p in block)
            lines.append("  OPTIONAL { %s }" % inner)
        if self.values:
            vars_, rows = self.values
            var_text = " ".join(f"?{v}" for v in vars_)
            row_text = " ".join("(%s)" % " ".join(_term_text(a) for a in row) for row in rows)
            lines.append("  VALUES (%s) { %s }" % (var_text, row_text))
        lines.append("}")
        if self.limit is not None:
            lines.append(f"LIMIT {self.limit}")
        if self.offset is not None:
            lines.append(f"OFFSET {self.offset}")
        return "\n".join(lines)


class BindingTable:
    """Result table: a header and rows of variable→Atom bindings.

    A row may omit variables bound only inside OPTIONAL blocks.
    """

    def __init__(self, header: list[str], rows: list[dict[str, Atom]] | None = None):
        self.header = list(header)
        self.rows = rows if rows is not None else []

    def __len__(self) -> int:
        return len(self.rows)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BindingTable)
            and self.header == other.header
            and self.rows == other.rows
        )

    def column(self, var: str) -> list[Atom | None]:
        return [row.get(var) for row in self.rows]

    def serialize(self) -> str:
        """Deterministic TSV text of the table."""
        lines = ["\t".join(self.header)]
        for row in self.rows:
            lines.append(
                "\t".join(
                    row[v].to_ntriples() if v in row else "" for v in self.header
                )
            )
        return "\n".join(lines) + "\n"


def _atom_sort_key(atom: Atom | None) -> tuple:
    if atom is None:
        return ("", "", "", "")
    return (atom.kind, atom.value, atom.datatype or "", atom.lang or "")


def _term_text(term: Term) -> str:
    if isinstance(term, Variable):
        return term.to_text()
    return term.to_ntriples()


def _escape_lit(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


# ---------------------------------------------------------------------------
# Evaluation


def _match_pattern(
    pattern: TriplePattern, binding: dict[str, Atom], store: TripleSet
) -> list[dict[str, Atom]]:
    """All extensions of ``binding`` that satisfy one triple pattern."""

    def resolve(term: Term) -> Atom | None:
        if isinstance(term, Variable):
            return binding.get(term.name)
        return term

    s, p, o = (resolve(t) for t in pattern.terms())
    out = []
    for triple in store.match(s, p, o):
        ext = dict(binding)
        ok = True
        for term, value in zip(pattern.terms(), (triple.subject, triple.predicate, triple.object)):
            if isinstance(term, Variable):
                bound = ext.get(term.name)
                if bound is None:
                    ext[term.name] = value
                elif bound != value:
                    ok = False
                    break
        if ok:
            out.append(ext)
    return out


def _join_bgp(
    patterns: list[TriplePattern],
    seeds: list[dict[str, Atom]],
    store: TripleSet,
) -> list[dict[str, Atom]]:
    solutions = seeds
    for pattern in patterns:
        next_solutions = []
        for binding in solutions:
            next_solutions.extend(_match_pattern(pattern, binding, store))
        solutions = next_solutions
        if not solutions:
            break
    return solutions


def _passes(filt: FilterExpr, binding: dict[str, Atom]) -> bool:
    atom = binding.get(filt.var)
    if atom is None:
        return False
    if isinstance(filt, RegexFilter):
        flags = re.IGNORECASE if "i" in filt.flags else 0
        return re.search(filt.pattern, atom.value, flags) is not None
    left_num = atom.numeric_value()
    right_num = filt.value.numeric_value()
    if filt.op in ("=", "!="):
        if left_num is not None and right_num is not None:
            equal = left_num == right_num
        else:
            equal = atom == filt.value
        return equal if filt.op == "=" else not equal
    # Ordering comparisons are numeric-only; anything else is false.
    if left_num is None or right_num is None:
        return False
    return {
        "<": left_num < right_num,
        ">": left_num > right_num,
        "<=": left_num <= right_num,
        ">=": left_num >= right_num,
    }[filt.op]


def evaluate(ast: QueryAST, store: TripleSet) -> BindingTable:
    """Solutions of the query over the store, in deterministic row order."""
    ast.validate()

    if ast.values:
        vars_, rows = ast.values
        seeds = [dict(zip(vars_, row)) for row in rows]
    else:
        seeds = [{}]

    solutions = _join_bgp(ast.patterns, seeds, store)
    solutions = [b for b in solutions if all(_passes(f, b) for f in ast.filters)]

    for block in ast.optionals:
        extended = []
        for binding in solutions:
            matches = _join_bgp(block, [binding], store)
            extended.extend(matches if matches else [binding])
        solutions = extended

    projected = [
        {v: b[v] for v in ast.projection if v in b} for b in solutions
    ]

    if ast.distinct:
        seen = set()
        unique = []
        for row in projected:
            key = tuple(_atom_sort_key(row.get(v)) for v in ast.projection)
            if key not in seen:
                seen.add(key)
                unique.append(row)
        projected = unique

    projected.sort(key=lambda row: tuple(_atom_sort_key(row.get(v)) for v in ast.projection))

    start = ast.offset or 0
    end = start + ast.limit if ast.limit is not None else None
    projected = projected[start:end]

    return BindingTable(list(ast.projection), projected)


# ---------------------------------------------------------------------------
# Parsing

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<iri><[^<>"{}|^`\\\x00-\x20]*>)
  | (?P<var>\?[A-Za-z_][A-Za-z0-9_]*)
  | (?P<literal>"(?:[^"\\]|\\.)*"(?:@[a-zA-Z]+(?:-[a-zA-Z0-9]+)*|\^\^<[^<>\s]*>)?)
  | (?P<number>-?\d+(?:\.\d+)?)
  | (?P<bnode>_:[A-Za-z][A-Za-z0-9_.-]*)
  | (?P<punct>[{}().,])
  | (?P<op><=|>=|!=|=|<|>)
  | (?P<word>[A-Za-z][A-Za-z]*)
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"cannot tokenize query at offset {pos}: {text[pos:pos+20]!r}")
        pos = m.end()
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group()))
    return tokens


class _Parser:
    def __init__(self, tokens: list[tuple[str, str]]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> tuple[str, str] | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> tuple[str, str]:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of query")
        self.pos += 1
        return tok

    def expect(self, kind: str, value: str | None = None) -> str:
        tok_kind, tok_value = self.next()
        if tok_kind != kind or (value is not None and tok_value.upper() != value.upper()):
            raise ParseError(f"expected {value or kind}, got {tok_value!r}")
        return tok_value

    def at_word(self, word: str) -> bool:
        tok = self.peek()
        return tok is not None and tok[0] == "word" and tok[1].upper() == word.upper()

    def parse_query(self) -> QueryAST:
        self.expect("word", "SELECT")
        distinct = False
        if self.at_word("DISTINCT"):
            self.next()
            distinct = True
        projection = []
        while self.peek() and self.peek()[0] == "var":
            projection.append(self.next()[1][1:])
        if not projection:
            raise ParseError("no projected variables")
        self.expect("word", "WHERE")
        self.expect("punct", "{")
        ast = QueryAST(projection=projection, patterns=[], distinct=distinct)
        self.parse_group(ast)
        while self.peek():
            if self.at_word("LIMIT"):
                self.next()
                ast.limit = int(self.expect("number"))
            elif self.at_word("OFFSET"):
                self.next()
                ast.offset = int(self.expect("number"))
            else:
                raise ParseError(f"unexpected trailing token {self.peek()[1]!r}")
        return ast

    def parse_group(self, ast: QueryAST) -> None:
        while True:
            tok = self.peek()
            if tok is None:
                raise ParseError("unterminated group")
            if tok == ("punct", "}"):
                self.next()
                return
            if self.at_word("FILTER"):
                self.next()
                ast.filters.append(self.parse_filter())
            elif self.at_word("OPTIONAL"):
                self.next()
                self.expect("punct", "{")
                ast.optionals.append(self.parse_pattern_block())
            elif self.at_word("VALUES"):
                self.next()
                ast.values = self.parse_values()
            else:
                ast.patterns.append(self.parse_triple_pattern())

    def parse_pattern_block(self) -> list[TriplePattern]:
        patterns = []
        while True:
            tok = self.peek()
            if tok is None:
                raise ParseError("unterminated OPTIONAL block")
            if tok == ("punct", "}"):
                self.next()
                return patterns
            patterns.append(self.parse_triple_pattern())

    def parse_triple_pattern(self) -> TriplePattern:
        s = self.parse_term()
        p = self.parse_term()
        o = self.parse_term()
        self.expect("punct", ".")
        return TriplePattern(s, p, o)

    def parse_term(self) -> Term:
        kind, value = self.next()
        if kind == "var":
            return Variable(value[1:])
        if kind == "iri":
            return Atom.iri(value[1:-1])
        if kind == "bnode":
            return Atom.blank(value[2:])
        if kind == "literal":
            return _parse_literal_token(value)
        if kind == "number":
            datatype = XSD_DECIMAL if "." in value else XSD_INTEGER
            return Atom.literal(value, datatype=datatype)
        raise ParseError(f"unexpected term {value!r}")

    def parse_filter(self) -> FilterExpr:
        self.expect("punct", "(")
        if self.at_word("regex"):
            self.next()
            self.expect("punct", "(")
            var = self.expect("var")[1:]
            self.expect("punct", ",")
            pattern = _parse_literal_token(self.expect("literal")).value
            flags = ""
            if self.peek() == ("punct", ","):
                self.next()
                flags = _parse_literal_token(self.expect("literal")).value
            self.expect("punct", ")")
            self.expect("punct", ")")
            return RegexFilter(var, pattern, flags)
        var = self.expect("var")[1:]
        op = self.expect("op")
        value = self.parse_term()
        if not isinstance(value, Atom):
            raise ParseError("filter comparison right side must be a constant")
        self.expect("punct", ")")
        return CompareFilter(var, op, value)

    def parse_values(self) -> tuple[list[str], list[list[Atom]]]:
        self.expect("punct", "(")
        vars_ = []
        while self.peek() and self.peek()[0] == "var":
            vars_.append(self.next()[1][1:])
        self.expect("punct", ")")
        self.expect("punct", "{")
        rows = []
        while self.peek() == ("punct", "("):
            self.next()
            row = []
            while self.peek() != ("punct", ")"):
                term = self.parse_term()
                if not isinstance(term, Atom):
                    raise ParseError("VALUES rows must be constants")
                row.append(term)
            self.next()
            if len(row) != len(vars_):
                raise ParseError("VALUES row width mismatch")
            rows.append(row)
        self.expect("punct", "}")
        return (vars_, rows)


def _parse_literal_token(token: str) -> Atom:
    body_match = re.match(r'^"((?:[^"\\]|\\.)*)"', token)
    assert body_match is not None
    raw = body_match.group(1)
    value = raw.replace('\\"', '"').replace("\\\\", "\\")
    rest = token[body_match.end() :]
    if rest.startswith("@"):
        return Atom.literal(value, lang=rest[1:])
    if rest.startswith("^^<"):
        return Atom.literal(value, datatype=rest[3:-1])
    return Atom.literal(value)


def parse_sparql(text: str) -> QueryAST:
    """Parse query text in the supported subset into a QueryAST."""
    return _Parser(_tokenize(text)).parse_query()

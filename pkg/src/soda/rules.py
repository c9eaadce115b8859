"""Rewrite rules: hand-written patterns for concepts the schema graph
cannot express directly (symmetric properties, derived relationships).

A rule's head lists exported variables with their classes; the body is a
block of triple-pattern templates spliced into generated queries whenever
a question token matches one of the rule's trigger keywords.
"""

from __future__ import annotations

from dataclasses import dataclass

from soda.errors import RuleError
from soda.sparql import TriplePattern, Variable, _Parser, _tokenize
from soda.textnorm import normalize_key


@dataclass(frozen=True)
class RewriteRule:
    name: str
    trigger_keys: tuple[str, ...]  # normalized (stemmed) keywords
    head: tuple[tuple[str, str], ...]  # (variable, class IRI)
    body: tuple[TriplePattern, ...]

    def head_vars(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.head)

    def validate(self) -> None:
        if not self.trigger_keys or not all(self.trigger_keys):
            raise RuleError(f"rule {self.name!r}: empty trigger list")
        if not self.head:
            raise RuleError(f"rule {self.name!r}: empty head")
        if not self.body:
            raise RuleError(f"rule {self.name!r}: empty body")
        body_vars = set()
        for p in self.body:
            body_vars |= p.variables()
        for var, _ in self.head:
            if var not in body_vars:
                raise RuleError(
                    f"rule {self.name!r}: head variable ?{var} missing from body"
                )


def _parse_pattern(line: str, rule: str) -> TriplePattern:
    text = line.strip()
    if not text.endswith("."):
        text += " ."
    try:
        parser = _Parser(_tokenize(text))
        pattern = parser.parse_triple_pattern()
    except Exception as exc:
        raise RuleError(f"rule {rule!r}: bad body pattern {line!r}: {exc}") from exc
    if parser.peek() is not None:
        raise RuleError(f"rule {rule!r}: trailing content in body pattern {line!r}")
    return pattern


def parse_rules(text: str) -> list[RewriteRule]:
    rules: list[RewriteRule] = []
    name = None
    triggers: list[str] = []
    head: list[tuple[str, str]] = []
    body: list[TriplePattern] = []

    def finish() -> None:
        nonlocal name, triggers, head, body
        rule = RewriteRule(name or "", tuple(triggers), tuple(head), tuple(body))
        rule.validate()
        rules.append(rule)
        name, triggers, head, body = None, [], [], []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        keyword, _, rest = line.partition(" ")
        keyword = keyword.upper()
        if keyword == "RULE":
            if name is not None:
                raise RuleError(f"line {lineno}: RULE before previous END")
            name = rest.strip()
            if not name:
                raise RuleError(f"line {lineno}: RULE needs a name")
        elif name is None:
            raise RuleError(f"line {lineno}: {keyword} outside a RULE block")
        elif keyword == "TRIGGER":
            triggers.extend(
                k for k in (normalize_key(part) for part in rest.split(",")) if k
            )
            if not triggers:
                raise RuleError(f"rule {name!r}: empty trigger list")
        elif keyword == "HEAD":
            for part in rest.split(","):
                part = part.strip()
                if not part:
                    continue
                if ":" not in part or not part.startswith("?"):
                    raise RuleError(
                        f"rule {name!r}: HEAD entries are ?var:classIRI, got {part!r}"
                    )
                var, _, cls = part[1:].partition(":")
                head.append((var, cls))
        elif keyword == "BODY":
            body.append(_parse_pattern(rest, name))
        elif keyword == "END":
            finish()
        else:
            raise RuleError(f"line {lineno}: unknown keyword {keyword!r}")
    if name is not None:
        raise RuleError(f"rule {name!r}: missing END")
    return rules


def load_rules(path: str) -> list[RewriteRule]:
    """Parse and validate a rule file; invalid rules abort the load."""
    with open(path, encoding="utf-8") as fh:
        return parse_rules(fh.read())


def matching_rule(rules: list[RewriteRule], normalized_token: str) -> RewriteRule | None:
    """First rule whose trigger keys contain the token's normal form."""
    for rule in rules:
        if normalized_token in rule.trigger_keys:
            return rule
    return None


def trigger_keys(rules: list[RewriteRule]) -> frozenset[str]:
    out: set[str] = set()
    for rule in rules:
        out.update(rule.trigger_keys)
    return frozenset(out)


def splice_patterns(
    rule: RewriteRule,
    head_names: dict[str, str],
    prefix: str,
) -> list[TriplePattern]:
    """Instantiate a rule body: head variables take their occurrence's
    query-variable name, internal variables get a capture-safe prefix."""

    def rename(term):
        if isinstance(term, Variable):
            if term.name in head_names:
                return Variable(head_names[term.name])
            return Variable(f"{prefix}_{term.name}")
        return term

    return [
        TriplePattern(rename(p.subject), rename(p.predicate), rename(p.object))
        for p in rule.body
    ]

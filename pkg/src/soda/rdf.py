"""In-memory RDF: atoms, triples, and an indexed triple set.

Only N-Triples ingestion is supported; the store is immutable once loaded
and indexed by subject, predicate, and object for pattern lookups.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator

from soda.errors import ParseError

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
RDF_PROPERTY = "http://www.w3.org/1999/02/22-rdf-syntax-ns#Property"
RDFS_LABEL = "http://www.w3.org/2000/01/rdf-schema#label"
OWL_CLASS = "http://www.w3.org/2002/07/owl#Class"
OWL_SAME_AS = "http://www.w3.org/2002/07/owl#sameAs"
XSD = "http://www.w3.org/2001/XMLSchema#"
XSD_INTEGER = XSD + "integer"
XSD_DECIMAL = XSD + "decimal"
XSD_DOUBLE = XSD + "double"

IRI = "iri"
LITERAL = "literal"
BLANK = "blank"

_NUMERIC_DATATYPES = {XSD_INTEGER, XSD_DECIMAL, XSD_DOUBLE, XSD + "float"}


@dataclass(frozen=True, slots=True)
class Atom:
    """One RDF term: an IRI, a literal, or a blank node."""

    kind: str
    value: str
    datatype: str | None = None
    lang: str | None = None

    def __post_init__(self):
        if self.kind not in (IRI, LITERAL, BLANK):
            raise ValueError(f"unknown atom kind {self.kind!r}")
        if self.kind != LITERAL and (self.datatype or self.lang):
            raise ValueError("datatype/lang only apply to literals")
        if self.datatype and self.lang:
            raise ValueError("datatype and lang are mutually exclusive")
        if self.kind == IRI and not self.value:
            raise ValueError("IRI must be non-empty")

    @staticmethod
    def iri(value: str) -> "Atom":
        return Atom(IRI, value)

    @staticmethod
    def literal(value: str, datatype: str | None = None, lang: str | None = None) -> "Atom":
        return Atom(LITERAL, value, datatype, lang)

    @staticmethod
    def blank(label: str) -> "Atom":
        return Atom(BLANK, label)

    @property
    def is_iri(self) -> bool:
        return self.kind == IRI

    @property
    def is_literal(self) -> bool:
        return self.kind == LITERAL

    def numeric_value(self) -> float | None:
        """Float value for numerically typed literals, else None."""
        if self.kind == LITERAL and self.datatype in _NUMERIC_DATATYPES:
            try:
                return float(self.value)
            except ValueError:
                return None
        return None

    def to_ntriples(self) -> str:
        if self.kind == IRI:
            return f"<{self.value}>"
        if self.kind == BLANK:
            return f"_:{self.value}"
        text = f'"{_escape(self.value)}"'
        if self.lang:
            return f"{text}@{self.lang}"
        if self.datatype:
            return f"{text}^^<{self.datatype}>"
        return text


@dataclass(frozen=True, slots=True)
class Triple:
    subject: Atom
    predicate: Atom
    object: Atom

    def __post_init__(self):
        if self.subject.kind == LITERAL:
            raise ValueError("literal in subject position")
        if self.predicate.kind != IRI:
            raise ValueError("predicate must be an IRI")

    def to_ntriples(self) -> str:
        return "%s %s %s ." % (
            self.subject.to_ntriples(),
            self.predicate.to_ntriples(),
            self.object.to_ntriples(),
        )


class TripleSet:
    """Set of triples with by-position access maps.

    Built once by a single writer (the parser or a fixture helper) and
    treated as immutable afterwards; concurrent readers are safe.
    """

    def __init__(self, triples: Iterable[Triple] = ()):
        self._triples: set[Triple] = set()
        self._by_subject: dict[Atom, set[Triple]] = {}
        self._by_predicate: dict[Atom, set[Triple]] = {}
        self._by_object: dict[Atom, set[Triple]] = {}
        for t in triples:
            self.add(t)

    def add(self, triple: Triple) -> None:
        if triple in self._triples:
            return
        self._triples.add(triple)
        self._by_subject.setdefault(triple.subject, set()).add(triple)
        self._by_predicate.setdefault(triple.predicate, set()).add(triple)
        self._by_object.setdefault(triple.object, set()).add(triple)

    def __len__(self) -> int:
        return len(self._triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._triples)

    def __contains__(self, triple: Triple) -> bool:
        return triple in self._triples

    def __eq__(self, other) -> bool:
        return isinstance(other, TripleSet) and self._triples == other._triples

    def by_subject(self, atom: Atom) -> set[Triple]:
        return self._by_subject.get(atom, set())

    def by_predicate(self, atom: Atom) -> set[Triple]:
        return self._by_predicate.get(atom, set())

    def by_object(self, atom: Atom) -> set[Triple]:
        return self._by_object.get(atom, set())

    def match(
        self,
        subject: Atom | None = None,
        predicate: Atom | None = None,
        object: Atom | None = None,
    ) -> Iterator[Triple]:
        """Triples matching the given fixed positions (None = wildcard).

        Scans the smallest applicable position index.
        """
        candidates: Iterable[Triple]
        pools = []
        if subject is not None:
            pools.append(self._by_subject.get(subject, set()))
        if predicate is not None:
            pools.append(self._by_predicate.get(predicate, set()))
        if object is not None:
            pools.append(self._by_object.get(object, set()))
        if pools:
            candidates = min(pools, key=len)
        else:
            candidates = self._triples
        for t in candidates:
            if subject is not None and t.subject != subject:
                continue
            if predicate is not None and t.predicate != predicate:
                continue
            if object is not None and t.object != object:
                continue
            yield t

    def atoms(self) -> set[Atom]:
        """All distinct atoms in any position."""
        out: set[Atom] = set()
        for t in self._triples:
            out.add(t.subject)
            out.add(t.predicate)
            out.add(t.object)
        return out

    def types_of(self, subject: Atom) -> list[Atom]:
        """rdf:type objects of a subject, sorted for determinism."""
        rdf_type = Atom.iri(RDF_TYPE)
        types = [t.object for t in self.by_subject(subject) if t.predicate == rdf_type]
        return sorted(types, key=lambda a: a.value)

    def to_ntriples(self) -> str:
        """Canonical serialization: sorted lines, one triple each."""
        return "".join(line + "\n" for line in sorted(t.to_ntriples() for t in self))


_ESCAPES = {
    "\\": "\\\\",
    '"': '\\"',
    "\n": "\\n",
    "\r": "\\r",
    "\t": "\\t",
}

_UNESCAPES = {
    "t": "\t",
    "b": "\b",
    "n": "\n",
    "r": "\r",
    "f": "\f",
    '"': '"',
    "'": "'",
    "\\": "\\",
}


def _escape(text: str) -> str:
    return "".join(_ESCAPES.get(ch, ch) for ch in text)


def _unescape(text: str, line: int) -> str:
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        if i + 1 >= len(text):
            raise ParseError("dangling escape", line)
        nxt = text[i + 1]
        if nxt in _UNESCAPES:
            out.append(_UNESCAPES[nxt])
            i += 2
        elif nxt == "u":
            out.append(chr(int(text[i + 2 : i + 6], 16)))
            i += 6
        elif nxt == "U":
            out.append(chr(int(text[i + 2 : i + 10], 16)))
            i += 10
        else:
            raise ParseError(f"bad escape \\{nxt}", line)
    return "".join(out)


_IRI_RE = r'<([^<>"{}|^`\\\x00-\x20]*)>'
_BNODE_RE = r"_:([A-Za-z][A-Za-z0-9_.-]*)"
_LIT_RE = r'"((?:[^"\\\n\r]|\\.)*)"(?:@([a-zA-Z]+(?:-[a-zA-Z0-9]+)*)|\^\^<([^<>\s]*)>)?'

_TRIPLE_LINE = re.compile(
    r"^\s*(?:%s|%s)\s+%s\s+(?:%s|%s|%s)\s*\.\s*(?:#.*)?$"
    % (_IRI_RE, _BNODE_RE, _IRI_RE, _IRI_RE, _BNODE_RE, _LIT_RE)
)


def _parse_line(line: str, lineno: int) -> Triple:
    m = _TRIPLE_LINE.match(line)
    if not m:
        raise ParseError("not a valid N-Triples statement", lineno)
    s_iri, s_bnode, pred, o_iri, o_bnode, o_lit, o_lang, o_dt = m.groups()
    subject = Atom.iri(_unescape(s_iri, lineno)) if s_iri is not None else Atom.blank(s_bnode)
    predicate = Atom.iri(_unescape(pred, lineno))
    if o_iri is not None:
        obj = Atom.iri(_unescape(o_iri, lineno))
    elif o_bnode is not None:
        obj = Atom.blank(o_bnode)
    else:
        obj = Atom.literal(
            _unescape(o_lit, lineno),
            datatype=_unescape(o_dt, lineno) if o_dt else None,
            lang=o_lang,
        )
    return Triple(subject, predicate, obj)


def parse_ntriples(
    source: str | bytes | IO,
    lenient: bool = False,
    errors: list[tuple[int, str]] | None = None,
) -> TripleSet:
    """Parse N-Triples text into a TripleSet.

    Duplicate statements collapse to one triple. A malformed line raises
    ParseError with its line number; with lenient=True bad lines are
    skipped and collected into ``errors`` instead.
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")

    store = TripleSet()
    for lineno, line in enumerate(source.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            store.add(_parse_line(line, lineno))
        except ParseError as exc:
            if not lenient:
                raise
            if errors is not None:
                errors.append((lineno, str(exc)))
    return store

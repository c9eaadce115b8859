"""Inverted index over literal N-grams and URI fragments.

Each entry maps a normalized lookup key to the entity, class, or property
it was extracted from, the literal property it came from (or the
``uri_match`` sentinel for fragment keys), and the subject's
mean-normalized PageRank score. Lookups return entries ordered by
descending PageRank.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone

from soda.errors import StoreLoadError
from soda.pagerank import PageRankScores
from soda.rdf import OWL_CLASS, RDF_PROPERTY, RDF_TYPE, Atom, TripleSet, XSD
from soda.textnorm import normalize_key, normalize_words, tokenize_uri_fragment

URI_MATCH = "uri_match"

INDEX_HEADER = "#soda-index v1"

_XSD_STRING = XSD + "string"


@dataclass(frozen=True)
class IndexConfig:
    """What gets indexed and how keys are produced.

    ``properties`` is the list of literal-property IRIs to index, or None
    for every plain string literal. Literals longer than
    ``long_literal_words`` raw words are skipped unless their property is
    explicitly listed.
    """

    properties: tuple[str, ...] | None = None
    uri_fragments: bool = True
    max_ngram: int = 4
    long_literal_words: int = 50

    def digest(self) -> str:
        canon = "properties=%s;uri_fragments=%s;max_ngram=%d;long_literal_words=%d" % (
            ",".join(self.properties) if self.properties is not None else "*",
            self.uri_fragments,
            self.max_ngram,
            self.long_literal_words,
        )
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:12]


@dataclass(frozen=True, slots=True)
class IndexEntry:
    key: str
    uri: str
    cls: str
    prop: str
    pagerank: float


@dataclass
class InvertedIndex:
    dataset_id: str = ""
    built: str = "1970-01-01T00:00:00Z"
    config_digest: str = ""
    max_pagerank: float = 0.0
    _entries: dict[str, list[IndexEntry]] = field(default_factory=dict)
    _by_first_char: dict[str, list[str]] = field(default_factory=dict)

    def _insert(self, entry: IndexEntry) -> None:
        bucket = self._entries.setdefault(entry.key, [])
        if any(
            e.key == entry.key and e.uri == entry.uri and e.prop == entry.prop
            for e in bucket
        ):
            return
        bucket.append(entry)

    def _finalize(self) -> None:
        for bucket in self._entries.values():
            bucket.sort(key=lambda e: (-e.pagerank, e.uri, e.prop))
        self._by_first_char = {}
        for key in self._entries:
            self._by_first_char.setdefault(key[0], []).append(key)
        for keys in self._by_first_char.values():
            keys.sort()
        self.max_pagerank = round(
            max((e.pagerank for b in self._entries.values() for e in b), default=0.0), 6
        )

    def lookup(self, key: str) -> list[IndexEntry]:
        """Entries for an already-normalized key, best PageRank first."""
        return list(self._entries.get(key, ()))

    def fuzzy_lookup(self, word: str) -> list[IndexEntry]:
        """Entries under keys within edit distance 1 of a single word.

        Only keys sharing the word's first letter are considered; exact
        hits are excluded (callers try exact lookup first).
        """
        if not word:
            return []
        out: list[IndexEntry] = []
        for key in self._by_first_char.get(word[0], ()):
            if key != word and abs(len(key) - len(word)) <= 1 and _edit_distance_le1(word, key):
                out.extend(self._entries[key])
        out.sort(key=lambda e: (-e.pagerank, e.uri, e.prop))
        return out

    def keys(self) -> list[str]:
        return sorted(self._entries)

    def all_entries(self) -> list[IndexEntry]:
        out = [e for bucket in self._entries.values() for e in bucket]
        out.sort(key=lambda e: (e.key, e.uri, e.prop))
        return out

    def __len__(self) -> int:
        return sum(len(b) for b in self._entries.values())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, InvertedIndex)
            and self.dataset_id == other.dataset_id
            and self.built == other.built
            and self.config_digest == other.config_digest
            and self.max_pagerank == other.max_pagerank
            and self.all_entries() == other.all_entries()
        )


def _edit_distance_le1(a: str, b: str) -> bool:
    if a == b:
        return True
    if abs(len(a) - len(b)) > 1:
        return False
    if len(a) > len(b):
        a, b = b, a
    # a is the shorter (or equal-length) string.
    i = 0
    while i < len(a) and a[i] == b[i]:
        i += 1
    if len(a) == len(b):
        return a[i + 1 :] == b[i + 1 :]
    return a[i:] == b[i + 1 :]


def _ngrams(words: list[str], max_n: int) -> list[str]:
    out = []
    for n in range(1, max_n + 1):
        for i in range(len(words) - n + 1):
            out.append(" ".join(words[i : i + n]))
    return out


def build_inverted_index(
    store: TripleSet,
    pagerank: PageRankScores,
    config: IndexConfig = IndexConfig(),
    dataset_id: str = "",
    built: str | None = None,
    diagnostics: list[str] | None = None,
) -> InvertedIndex:
    """Index literal N-grams of instances and labels/fragments of metadata.

    Instances without an rdf:type are skipped and reported through
    ``diagnostics``. Class and property entries carry the ``owl:Class`` /
    ``rdf:Property`` class column and, for fragment keys, the
    ``uri_match`` property sentinel.
    """
    index = InvertedIndex(
        dataset_id=dataset_id,
        built=built or "1970-01-01T00:00:00Z",
        config_digest=config.digest(),
    )
    prn = pagerank.mean_normalized()
    rdf_type = Atom.iri(RDF_TYPE)

    class_iris = {
        t.object.value
        for t in store.by_predicate(rdf_type)
        if t.object.is_iri and t.object.value not in (OWL_CLASS, RDF_PROPERTY)
    }
    class_iris |= {
        t.subject.value
        for t in store.by_object(Atom.iri(OWL_CLASS))
        if t.predicate == rdf_type and t.subject.is_iri
    }
    property_iris = {
        t.predicate.value for t in store if t.predicate.value != RDF_TYPE
    }
    property_iris |= {
        t.subject.value
        for t in store.by_object(Atom.iri(RDF_PROPERTY))
        if t.predicate == rdf_type and t.subject.is_iri
    }

    def score(iri: str) -> float:
        # Predicates that never occur as graph nodes default to the mean.
        return round(prn.get(iri, 1.0), 6)

    def indexable(predicate: str, literal: Atom) -> bool:
        if config.properties is not None:
            return predicate in config.properties
        return literal.datatype in (None, _XSD_STRING) and literal.lang is None

    untyped: set[str] = set()

    for triple in store:
        if not triple.object.is_literal or not triple.subject.is_iri:
            continue
        subject_iri = triple.subject.value
        if subject_iri in class_iris or subject_iri in property_iris:
            continue
        if not indexable(triple.predicate.value, triple.object):
            continue
        raw_words = triple.object.value.split()
        explicit = config.properties is not None and triple.predicate.value in config.properties
        if len(raw_words) > config.long_literal_words and not explicit:
            continue
        types = [a.value for a in store.types_of(triple.subject) if a.is_iri]
        if not types:
            untyped.add(subject_iri)
            continue
        cls = sorted(types)[0]
        words = normalize_words(triple.object.value)
        for key in _ngrams(words, config.max_ngram):
            index._insert(
                IndexEntry(key, subject_iri, cls, triple.predicate.value, score(subject_iri))
            )

    def index_metadata(iri: str, cls_column: str) -> None:
        for t in store.by_subject(Atom.iri(iri)):
            if t.object.is_literal and indexable(t.predicate.value, t.object):
                for key in _ngrams(normalize_words(t.object.value), config.max_ngram):
                    index._insert(IndexEntry(key, iri, cls_column, t.predicate.value, score(iri)))
        if config.uri_fragments:
            key = normalize_key(" ".join(tokenize_uri_fragment(iri)))
            if key:
                index._insert(IndexEntry(key, iri, cls_column, URI_MATCH, score(iri)))

    for iri in sorted(class_iris):
        index_metadata(iri, OWL_CLASS)
    for iri in sorted(property_iris - class_iris):
        index_metadata(iri, RDF_PROPERTY)

    index._finalize()
    if diagnostics is not None:
        diagnostics.extend(sorted(untyped))
    return index


def dataset_timestamp(path: str) -> str:
    """Deterministic build timestamp: the source file's mtime in UTC."""
    mtime = os.stat(path).st_mtime
    return datetime.fromtimestamp(int(mtime), tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def save_index(index: InvertedIndex, path: str) -> None:
    lines = [
        f"{INDEX_HEADER} {index.dataset_id} {index.config_digest}",
        f"#built {index.built}",
        f"#maxpr {index.max_pagerank:.6f}",
    ]
    entries = index.all_entries()
    lines.append(f"#entries {len(entries)}")
    for e in entries:
        lines.append(f"{e.key}\t{e.uri}\t{e.cls}\t{e.prop}\t{e.pagerank:.6f}")
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)


def load_index(path: str, expect_digest: str | None = None) -> InvertedIndex:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith(INDEX_HEADER + " "):
        raise StoreLoadError(f"{path}: not an index file (missing {INDEX_HEADER!r})")
    head = lines[0].split(" ")
    if len(head) != 4:
        raise StoreLoadError(f"{path}: malformed index header")
    index = InvertedIndex(dataset_id=head[2], config_digest=head[3])
    if expect_digest is not None and head[3] != expect_digest:
        raise StoreLoadError(
            f"{path}: config digest mismatch (file {head[3]}, expected {expect_digest})"
        )
    declared = None
    count = 0
    for raw in lines[1:]:
        if raw.startswith("#built "):
            index.built = raw[len("#built ") :]
            continue
        if raw.startswith("#maxpr "):
            continue
        if raw.startswith("#entries "):
            declared = int(raw[len("#entries ") :])
            continue
        if not raw or raw.startswith("#"):
            continue
        fields = raw.split("\t")
        if len(fields) != 5:
            raise StoreLoadError(f"{path}: corrupt entry line: {raw!r}")
        try:
            pr = float(fields[4])
        except ValueError as exc:
            raise StoreLoadError(f"{path}: bad pagerank in line {raw!r}") from exc
        index._insert(IndexEntry(fields[0], fields[1], fields[2], fields[3], pr))
        count += 1
    if declared is not None and declared != count:
        raise StoreLoadError(
            f"{path}: truncated index ({count} entries, header declares {declared})"
        )
    index._finalize()
    return index

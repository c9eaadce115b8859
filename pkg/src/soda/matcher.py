"""Question tokenization and candidate ranking.

Tokens are the longest normalized question windows with an inverted-index
hit (greedy left-to-right; single words fall back to edit-distance-1 fuzzy
keys). Candidates group index entries that describe the same thing and are
scored by string similarity blended with PageRank; word embeddings act
purely as a discard filter for spurious matches.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from soda.embeddings import EmbeddingTable, cosine_unit_interval
from soda.index import InvertedIndex, IndexEntry
from soda.rdf import OWL_CLASS, RDF_PROPERTY
from soda.textnorm import STOPWORDS, porter_stem

INSTANCE_GROUP = "instance_group"
CLASS_MATCH = "class_match"
PROPERTY_MATCH = "property_match"


@dataclass(frozen=True, slots=True)
class Token:
    """A question span resolved against the index vocabulary."""

    text: str
    normalized: str
    start: int
    end: int  # exclusive word offset


@dataclass(frozen=True)
class CandidateMatch:
    token: Token
    kind: str
    cls: str
    prop: str
    uris: tuple[str, ...]
    match_values: tuple[str, ...]
    string_sim: float
    pagerank_norm: float
    score: float
    semantic_sim: float | None = None


@dataclass
class MatchMatrix:
    """Per-token ranked candidate lists (rows of the combination space)."""

    tokens: list[Token]
    candidates: list[list[CandidateMatch]]

    def __post_init__(self):
        assert len(self.tokens) == len(self.candidates)


@dataclass(frozen=True)
class MatcherConfig:
    alpha: float = 0.7
    semantic_threshold: float = 0.4
    top_n: int = 5
    fuzzy: bool = True
    max_window: int = 4
    ablation: bool = False  # string similarity only, no PageRank term


_QUESTION_WORD = re.compile(r"[A-Za-z0-9]+(?:['][A-Za-z0-9]+)?")


def question_words(question: str) -> list[str]:
    return _QUESTION_WORD.findall(question)


def extract_tokens(
    question: str,
    index: InvertedIndex,
    config: MatcherConfig = MatcherConfig(),
    extra_keys: frozenset[str] | set[str] = frozenset(),
) -> list[Token]:
    """Greedy longest-window tokenization against the index.

    Stopwords and words with no hit (exact, fuzzy, or in ``extra_keys``,
    which carries rewrite-rule triggers) are skipped. Returned tokens do
    not overlap and are ordered by start offset.
    """
    words = question_words(question)
    content: list[tuple[int, str]] = []  # (original offset, normalized word)
    for offset, word in enumerate(words):
        lowered = word.lower()
        if lowered in STOPWORDS:
            continue
        content.append((offset, porter_stem(lowered)))

    tokens: list[Token] = []
    i = 0
    while i < len(content):
        matched = False
        for n in range(min(config.max_window, len(content) - i), 0, -1):
            key = " ".join(norm for _, norm in content[i : i + n])
            if index.lookup(key) or key in extra_keys:
                start = content[i][0]
                end = content[i + n - 1][0] + 1
                tokens.append(Token(" ".join(words[start:end]), key, start, end))
                i += n
                matched = True
                break
        if matched:
            continue
        word_norm = content[i][1]
        if config.fuzzy and index.fuzzy_lookup(word_norm):
            offset = content[i][0]
            tokens.append(Token(words[offset], word_norm, offset, offset + 1))
        i += 1
    return tokens


def skipped_words(question: str, tokens: list[Token]) -> list[str]:
    """Non-stopword question words not covered by any token."""
    words = question_words(question)
    covered = set()
    for t in tokens:
        covered.update(range(t.start, t.end))
    return [
        w
        for i, w in enumerate(words)
        if i not in covered and w.lower() not in STOPWORDS
    ]


def string_similarity(a: str, b: str) -> float:
    """Normalized character-level Levenshtein similarity in [0, 1]."""
    if a == b:
        return 1.0
    if not a or not b:
        return 0.0
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return 1.0 - prev[-1] / max(len(a), len(b))


def semantic_similarity(a: str, b: str, emb: EmbeddingTable | None) -> float | None:
    """Cosine of mean word vectors, mapped to [0, 1]; None when either
    phrase has an out-of-vocabulary content word or no table is loaded."""
    if emb is None:
        return None
    va = emb.phrase_vector(a)
    vb = emb.phrase_vector(b)
    if va is None or vb is None:
        return None
    return cosine_unit_interval(va, vb)


def candidate_entries(
    index: InvertedIndex, token: Token, config: MatcherConfig = MatcherConfig()
) -> list[IndexEntry]:
    """Exact entries for the token key, falling back to fuzzy keys."""
    entries = index.lookup(token.normalized)
    if entries or not config.fuzzy or " " in token.normalized:
        return entries
    return index.fuzzy_lookup(token.normalized)


def rank_candidates(
    token: Token,
    entries: list[IndexEntry],
    emb: EmbeddingTable | None,
    config: MatcherConfig = MatcherConfig(),
    max_pagerank: float = 1.0,
) -> list[CandidateMatch]:
    """Group equivalent entries and rank the groups.

    Instance entries group by (class, property); class and property
    entries group by their own URI (label and fragment keys of one class
    are a single candidate). Groups whose semantic similarity is known and
    below the threshold are discarded.
    """
    groups: dict[tuple, list[IndexEntry]] = {}
    for e in entries:
        if e.cls == OWL_CLASS:
            gkey = (CLASS_MATCH, e.uri, "")
        elif e.cls == RDF_PROPERTY:
            gkey = (PROPERTY_MATCH, e.uri, "")
        else:
            gkey = (INSTANCE_GROUP, e.cls, e.prop)
        groups.setdefault(gkey, []).append(e)

    denom = max_pagerank if max_pagerank > 0 else 1.0
    out: list[CandidateMatch] = []
    for gkey in sorted(groups):
        kind = gkey[0]
        members = groups[gkey]
        uris = tuple(sorted({e.uri for e in members}))
        values = tuple(sorted({e.key for e in members}))
        if kind == CLASS_MATCH:
            cls = uris[0]
            prop = sorted({e.prop for e in members})[0]
        elif kind == PROPERTY_MATCH:
            cls = RDF_PROPERTY
            prop = uris[0]
        else:
            cls, prop = gkey[1], gkey[2]
        string_sim = max(string_similarity(token.normalized, v) for v in values)
        sem = None
        if emb is not None:
            sims = [
                s
                for v in values
                if (s := semantic_similarity(token.text, v, emb)) is not None
            ]
            if sims:
                sem = max(sims)
        if sem is not None and sem < config.semantic_threshold:
            continue
        pagerank_norm = min(max(e.pagerank for e in members) / denom, 1.0)
        if config.ablation:
            score = string_sim
        else:
            score = config.alpha * string_sim + (1.0 - config.alpha) * pagerank_norm
        out.append(
            CandidateMatch(
                token=token,
                kind=kind,
                cls=cls,
                prop=prop,
                uris=uris,
                match_values=values,
                string_sim=string_sim,
                pagerank_norm=pagerank_norm,
                score=score,
                semantic_sim=sem,
            )
        )

    out.sort(key=lambda c: (-c.score, c.cls, c.prop))
    return out[: config.top_n]


def build_match_matrix(
    question: str,
    index: InvertedIndex,
    emb: EmbeddingTable | None = None,
    config: MatcherConfig = MatcherConfig(),
    extra_keys: frozenset[str] | set[str] = frozenset(),
) -> MatchMatrix:
    """Tokenize and rank candidates for every token."""
    tokens = extract_tokens(question, index, config, extra_keys)
    candidates = [
        rank_candidates(
            t, candidate_entries(index, t, config), emb, config, index.max_pagerank
        )
        for t in tokens
    ]
    return MatchMatrix(tokens, candidates)

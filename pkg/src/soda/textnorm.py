"""Text normalization shared by the indexer and the matcher.

Keywords follow one pipeline everywhere: lowercase, split on punctuation,
drop stopwords, Porter-stem each word. Index keys and question windows are
normalized identically, so equality of normalized forms is the lookup
contract.
"""

from __future__ import annotations

import re

# Classic English stopword list (Snowball). Deliberately compact: words not
# on this list that miss the index are skipped as unmatched instead.
STOPWORDS = frozenset(
    """
    i me my myself we our ours ourselves you your yours yourself yourselves
    he him his himself she her hers herself it its itself they them their
    theirs themselves what which who whom this that these those am is are
    was were be been being have has had having do does did doing a an the
    and but if or because as until while of at by for with about against
    between into through during before after above below to from up down in
    out on off over under again further then once here there all any both
    each few more most other some such no nor not only own same so than too
    very s t can will just don should now
    """.split()
)

_WORD_SPLIT = re.compile(r"[^a-z0-9]+")
_CAMEL = re.compile(r"(?<=[a-z])(?=[A-Z])|(?<=[A-Z])(?=[A-Z][a-z])")
_LETTER_RUN = re.compile(r"[a-zA-Z]+")

_VOWELS = "aeiou"


def _is_consonant(word: str, i: int) -> bool:
    ch = word[i]
    if ch in _VOWELS:
        return False
    if ch == "y":
        return i == 0 or not _is_consonant(word, i - 1)
    return True


def _measure(stem: str) -> int:
    """Number of vowel-consonant sequences ("m" in Porter's definition)."""
    m = 0
    prev_vowel = False
    for i in range(len(stem)):
        if _is_consonant(stem, i):
            if prev_vowel:
                m += 1
            prev_vowel = False
        else:
            prev_vowel = True
    return m


def _contains_vowel(stem: str) -> bool:
    return any(not _is_consonant(stem, i) for i in range(len(stem)))


def _ends_double_consonant(word: str) -> bool:
    return (
        len(word) >= 2
        and word[-1] == word[-2]
        and _is_consonant(word, len(word) - 1)
    )


def _ends_cvc(word: str) -> bool:
    if len(word) < 3:
        return False
    if not (
        _is_consonant(word, len(word) - 3)
        and not _is_consonant(word, len(word) - 2)
        and _is_consonant(word, len(word) - 1)
    ):
        return False
    return word[-1] not in "wxy"


def porter_stem(word: str) -> str:
    """The 1980 Porter stemming algorithm, original rule set.

    Known limitations are accepted as-is (e.g. "gaseous" does not reduce
    to "gas"); the point is a stable, widely understood normal form.
    """
    w = word.lower()
    if len(w) <= 2:
        return w

    # Step 1a
    if w.endswith("sses"):
        w = w[:-2]
    elif w.endswith("ies"):
        w = w[:-2]
    elif w.endswith("ss"):
        pass
    elif w.endswith("s"):
        w = w[:-1]

    # Step 1b
    if w.endswith("eed"):
        if _measure(w[:-3]) > 0:
            w = w[:-1]
    else:
        fired = False
        if w.endswith("ed") and _contains_vowel(w[:-2]):
            w = w[:-2]
            fired = True
        elif w.endswith("ing") and _contains_vowel(w[:-3]):
            w = w[:-3]
            fired = True
        if fired:
            if w.endswith(("at", "bl", "iz")):
                w = w + "e"
            elif _ends_double_consonant(w) and w[-1] not in "lsz":
                w = w[:-1]
            elif _measure(w) == 1 and _ends_cvc(w):
                w = w + "e"

    # Step 1c
    if w.endswith("y") and _contains_vowel(w[:-1]):
        w = w[:-1] + "i"

    # Step 2
    for suffix, repl in (
        ("ational", "ate"), ("tional", "tion"), ("enci", "ence"),
        ("anci", "ance"), ("izer", "ize"), ("abli", "able"), ("alli", "al"),
        ("entli", "ent"), ("eli", "e"), ("ousli", "ous"), ("ization", "ize"),
        ("ation", "ate"), ("ator", "ate"), ("alism", "al"),
        ("iveness", "ive"), ("fulness", "ful"), ("ousness", "ous"),
        ("aliti", "al"), ("iviti", "ive"), ("biliti", "ble"),
    ):
        if w.endswith(suffix):
            if _measure(w[: -len(suffix)]) > 0:
                w = w[: -len(suffix)] + repl
            break

    # Step 3
    for suffix, repl in (
        ("icate", "ic"), ("ative", ""), ("alize", "al"), ("iciti", "ic"),
        ("ical", "ic"), ("ful", ""), ("ness", ""),
    ):
        if w.endswith(suffix):
            if _measure(w[: -len(suffix)]) > 0:
                w = w[: -len(suffix)] + repl
            break

    # Step 4
    for suffix in (
        "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement",
        "ment", "ent", "ion", "ou", "ism", "ate", "iti", "ous", "ive", "ize",
    ):
        if w.endswith(suffix):
            stem = w[: -len(suffix)]
            if _measure(stem) > 1:
                if suffix == "ion" and not stem.endswith(("s", "t")):
                    break
                w = stem
            break

    # Step 5a
    if w.endswith("e"):
        stem = w[:-1]
        m = _measure(stem)
        if m > 1 or (m == 1 and not _ends_cvc(stem)):
            w = stem

    # Step 5b
    if _measure(w) > 1 and _ends_double_consonant(w) and w.endswith("l"):
        w = w[:-1]

    return w


def normalize_words(text: str) -> list[str]:
    """Lowercase, split on punctuation, drop stopwords, stem.

    Returns the normalized content-word sequence; order is preserved so
    contiguous N-grams of the result are meaningful.
    """
    words = [t for t in _WORD_SPLIT.split(text.lower()) if t]
    return [porter_stem(t) for t in words if t not in STOPWORDS]


def normalize_key(text: str) -> str:
    """Normalize a phrase to its index-key form (stemmed, space-joined)."""
    return " ".join(normalize_words(text))


def uri_local_name(uri: str) -> str:
    """Fragment after the last '#' or '/', or the full URI when absent."""
    for sep in ("#", "/"):
        idx = uri.rfind(sep)
        if idx >= 0:
            return uri[idx + 1 :]
    return uri


def tokenize_uri_fragment(uri: str) -> list[str]:
    """Split a URI's local name into lowercase keywords.

    Split points are camel-case boundaries, punctuation (-, _, .) and
    letter/digit boundaries; digit-only runs are dropped. A fragment with
    no letters yields an empty list.
    """
    fragment = uri_local_name(uri)
    words: list[str] = []
    for chunk in re.split(r"[-_.\s]+", fragment):
        for piece in _CAMEL.split(chunk):
            for run in _LETTER_RUN.findall(piece):
                words.append(run.lower())
    return words

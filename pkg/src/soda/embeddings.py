"""Word-embedding table for the semantic discard filter.

Any word2vec text-format file works: a ``count dim`` header followed by
``word v1 ... vd`` lines. Vectors are unit-normalized at load; phrases are
averaged over their content words.
"""

from __future__ import annotations

import numpy as np

from soda.errors import StoreLoadError
from soda.textnorm import STOPWORDS


class EmbeddingTable:
    def __init__(self, vectors: dict[str, np.ndarray], dimension: int):
        self.dimension = dimension
        self.vectors = vectors

    def __len__(self) -> int:
        return len(self.vectors)

    def __contains__(self, word: str) -> bool:
        return word in self.vectors

    def phrase_vector(self, phrase: str) -> np.ndarray | None:
        """Mean vector of the phrase's content words.

        None when any content word is out of vocabulary (the caller then
        falls back to lexical evidence only).
        """
        words = [w for w in phrase.lower().split() if w not in STOPWORDS]
        if not words:
            return None
        vecs = []
        for w in words:
            v = self.vectors.get(w)
            if v is None:
                return None
            vecs.append(v)
        return np.mean(vecs, axis=0)


def cosine_unit_interval(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine of two vectors mapped from [-1, 1] onto [0, 1]."""
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.5
    cos = float(np.dot(a, b) / (na * nb))
    return (max(-1.0, min(1.0, cos)) + 1.0) / 2.0


def load_word2vec_text(path: str) -> EmbeddingTable:
    """Load a word2vec text-format embedding file."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise StoreLoadError(f"{path}: missing word2vec 'count dim' header")
        try:
            count, dim = int(header[0]), int(header[1])
        except ValueError as exc:
            raise StoreLoadError(f"{path}: bad word2vec header") from exc
        vectors: dict[str, np.ndarray] = {}
        for lineno, line in enumerate(fh, start=2):
            parts = line.rstrip("\n").split(" ")
            if len(parts) != dim + 1:
                raise StoreLoadError(f"{path}:{lineno}: expected {dim} components")
            vec = np.array([float(x) for x in parts[1:]], dtype=np.float64)
            norm = np.linalg.norm(vec)
            if norm > 0:
                vec = vec / norm
            vectors[parts[0]] = vec
    if len(vectors) != count:
        raise StoreLoadError(f"{path}: header declares {count} words, found {len(vectors)}")
    return EmbeddingTable(vectors, dim)

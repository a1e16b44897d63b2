"""Embedding-backed semantic similarity and exact top-k fact retrieval.

The unification score of two sentences is their embedding cosine clamped
to [0, 1]; retrieval ranks every stored fact by that score (exact search,
ties broken by fact id).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol, Sequence

import numpy as np

from .errors import DimMismatchError, EmptyFactbaseError, ProviderError, ZeroVectorError
from .factbase import Factbase


class EmbeddingProvider(Protocol):
    def embed(self, texts: Sequence[str]) -> Sequence[Sequence[float]]: ...


@dataclass(frozen=True)
class RetrievalHit:
    fact_id: str
    score: float


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DimMismatchError(f"dim {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ZeroVectorError("cosine of an all-zero vector")
    return float(np.dot(u, v) / (nu * nv))


def clamp_unit(x: float) -> float:
    return min(1.0, max(0.0, x))


class CachedEmbedder:
    """Memoizes provider vectors by exact text (providers may be
    case-sensitive, so no normalization happens here)."""

    def __init__(self, provider: EmbeddingProvider):
        self.provider = provider
        self._cache: dict[str, np.ndarray] = {}

    def embed_one(self, text: str) -> np.ndarray:
        return self.embed_many([text])[0]

    def embed_many(self, texts: Sequence[str], batch_size: int = 256) -> list[np.ndarray]:
        missing = [t for t in dict.fromkeys(texts) if t not in self._cache]
        for start in range(0, len(missing), batch_size):
            chunk = missing[start : start + batch_size]
            try:
                vectors = self.provider.embed(chunk)
            except ProviderError:
                raise
            except Exception as exc:
                raise ProviderError(f"embedding provider failed: {exc}") from exc
            if len(vectors) != len(chunk):
                raise ProviderError(
                    f"embedding provider returned {len(vectors)} vectors for {len(chunk)} texts"
                )
            for text, vec in zip(chunk, vectors):
                arr = np.asarray(vec, dtype=np.float64)
                if arr.ndim != 1 or arr.size == 0 or not np.all(np.isfinite(arr)):
                    raise ProviderError(f"embedding provider returned a bad vector for {text!r}")
                self._cache[text] = arr
        dims = {self._cache[t].shape[0] for t in texts}
        if len(dims) > 1:
            raise ProviderError(f"embedding provider returned mixed dimensions {sorted(dims)}")
        return [self._cache[t] for t in texts]


def unification_score(h: str, f: str, provider: EmbeddingProvider) -> float:
    """max(0, cos(embed(h), embed(f))); identical texts score 1.0."""
    if not h or not f:
        raise ValueError("unification_score requires non-empty texts")
    embedder = provider if isinstance(provider, CachedEmbedder) else CachedEmbedder(provider)
    vh, vf = embedder.embed_many([h, f])
    return clamp_unit(cosine(vh, vf))


@dataclass
class RetrievalIndex:
    """Exact nearest-neighbor index: one unit vector per fact, immutable
    after build and shareable across concurrent searches."""

    fact_ids: tuple[str, ...]
    matrix: np.ndarray = field(repr=False)  # rows unit-normalized
    embedder: CachedEmbedder = field(repr=False)

    def __len__(self) -> int:
        return len(self.fact_ids)


def build_index(factbase: Factbase, provider: EmbeddingProvider) -> RetrievalIndex:
    if len(factbase) == 0:
        raise EmptyFactbaseError("cannot index an empty factbase")
    embedder = provider if isinstance(provider, CachedEmbedder) else CachedEmbedder(provider)
    sentences = [fact.sentence for fact in factbase.facts]
    vectors = embedder.embed_many(sentences)
    matrix = np.vstack(vectors)
    norms = np.linalg.norm(matrix, axis=1)
    if np.any(norms == 0.0):
        bad = factbase.facts[int(np.argmin(norms))].id
        raise ProviderError(f"zero embedding vector for fact {bad}")
    matrix = matrix / norms[:, None]
    return RetrievalIndex(
        fact_ids=tuple(fact.id for fact in factbase.facts),
        matrix=matrix,
        embedder=embedder,
    )


def retrieve_top_k(index: RetrievalIndex, h: str, k: int) -> list[RetrievalHit]:
    """Top-k facts by unification score, score descending then fact id
    ascending; saturates at the factbase size."""
    if k < 1:
        raise ValueError("k must be >= 1")
    query = index.embedder.embed_one(h)
    qnorm = float(np.linalg.norm(query))
    if qnorm == 0.0:
        raise ProviderError(f"zero embedding vector for query {h!r}")
    raw = index.matrix @ (query / qnorm)
    scores = [clamp_unit(float(s)) for s in raw]
    order = sorted(range(len(index.fact_ids)), key=lambda i: (-scores[i], index.fact_ids[i]))
    return [RetrievalHit(fact_id=index.fact_ids[i], score=scores[i]) for i in order[:k]]

"""Dynamic decomposition of a hypothesis into candidate premise pairs.

Three generation routes feed one pool: free sampling, template-guided
sampling (first premise shaped by a masked pattern), and retrieval
conditioning (first premise forced to a stored fact). The pool is
deduplicated, gated by the two-premise entailment filter, and ordered
with grounded candidates first so the search hits the factbase early.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, Sequence

from .entailment import EntailmentScorer, filter_two_premise
from .errors import ProviderError, UnknownFactIdError
from .factbase import EMPTY_TEMPLATE, Factbase, InfillTemplate, matches_template, normalize
from .similarity import RetrievalHit
from .stats import SearchStats

FREE = "free"
TEMPLATED = "templated"
RETRIEVAL_CONDITIONED = "retrieval_conditioned"

_ORIGIN_PRIORITY = {RETRIEVAL_CONDITIONED: 0, TEMPLATED: 1, FREE: 2}
DEDUP_SEPARATOR = "␟"


class GeneratorProvider(Protocol):
    def generate(
        self,
        hypothesis: str,
        template: str,
        forced_f1: str | None,
        num_samples: int,
        nucleus_p: float,
    ) -> Sequence[dict[str, str]]: ...


@dataclass(frozen=True)
class Origin:
    kind: str  # FREE | TEMPLATED | RETRIEVAL_CONDITIONED
    pattern: str | None = None
    fact_id: str | None = None
    retrieval_score: float | None = None

    @property
    def priority(self) -> int:
        return _ORIGIN_PRIORITY[self.kind]


@dataclass(frozen=True)
class DecompositionCandidate:
    f1: str
    f2: str
    origin: Origin

    @property
    def dedup_key(self) -> str:
        return normalize(self.f1) + DEDUP_SEPARATOR + normalize(self.f2)


@dataclass(frozen=True)
class GenerationConfig:
    """Sampling knobs; defaults follow the reference configuration."""

    free_samples: int = 100
    per_template_samples: int = 10
    templates: tuple[InfillTemplate, ...] = ()
    retrieval_k: int = 10
    per_retrieved_f2_samples: int = 100
    nucleus_p: float = 0.95

    def __post_init__(self):
        if min(self.free_samples, self.per_template_samples, self.retrieval_k,
               self.per_retrieved_f2_samples) < 0:
            raise ValueError("sample counts must be >= 0")
        if not 0.0 < self.nucleus_p <= 1.0:
            raise ValueError("nucleus_p must be in (0, 1]")


def _call_generator(
    provider: GeneratorProvider,
    hypothesis: str,
    template: str,
    forced_f1: str | None,
    num_samples: int,
    nucleus_p: float,
    stats: SearchStats | None,
) -> list[dict[str, str]]:
    if stats is not None:
        stats.provider_calls["generate"] += 1
    try:
        raw = list(provider.generate(hypothesis, template, forced_f1, num_samples, nucleus_p))
    except ProviderError:
        raise
    except Exception as exc:
        raise ProviderError(f"generator failed for template {template!r}: {exc}") from exc
    if len(raw) > num_samples:
        raise ProviderError(
            f"generator returned {len(raw)} candidates for num_samples={num_samples}"
        )
    return raw


def _collect(
    raw: Sequence[dict[str, str]],
    origin: Origin,
    stats: SearchStats | None,
) -> list[DecompositionCandidate]:
    out = []
    for pair in raw:
        f1 = (pair.get("f1") or "").strip()
        f2 = (pair.get("f2") or "").strip()
        if not f1 or not f2:
            if stats is not None:
                stats.invalid_candidates += 1
            continue
        out.append(DecompositionCandidate(f1=f1, f2=f2, origin=origin))
    return out


def generate_free(
    h: str,
    cfg: GenerationConfig,
    provider: GeneratorProvider,
    stats: SearchStats | None = None,
    deadline=None,
) -> list[DecompositionCandidate]:
    """One provider call against the empty template."""
    if cfg.free_samples == 0:
        return []
    if deadline is not None:
        deadline.check()
    raw = _call_generator(
        provider, h, EMPTY_TEMPLATE.pattern, None, cfg.free_samples, cfg.nucleus_p, stats
    )
    return _collect(raw, Origin(kind=FREE), stats)


def generate_templated(
    h: str,
    cfg: GenerationConfig,
    provider: GeneratorProvider,
    stats: SearchStats | None = None,
    deadline=None,
) -> list[DecompositionCandidate]:
    """One provider call per template; first premises that do not match
    the template's wildcard shape are dropped and counted."""
    out: list[DecompositionCandidate] = []
    if cfg.per_template_samples == 0:
        return out
    for template in cfg.templates:
        if deadline is not None:
            deadline.check()
        raw = _call_generator(
            provider, h, template.pattern, None, cfg.per_template_samples, cfg.nucleus_p, stats
        )
        origin = Origin(kind=TEMPLATED, pattern=template.pattern)
        for cand in _collect(raw, origin, stats):
            if not matches_template(cand.f1, template.pattern):
                if stats is not None:
                    stats.template_mismatches += 1
                continue
            out.append(cand)
    return out


def generate_retrieval_conditioned(
    h: str,
    hits: Sequence[RetrievalHit],
    cfg: GenerationConfig,
    provider: GeneratorProvider,
    factbase: Factbase,
    stats: SearchStats | None = None,
    deadline=None,
) -> list[DecompositionCandidate]:
    """Force-decode the top retrieved facts as first premises, generating
    only the second premise."""
    out: list[DecompositionCandidate] = []
    if cfg.per_retrieved_f2_samples == 0 or cfg.retrieval_k == 0:
        return out
    for hit in hits[: cfg.retrieval_k]:
        if deadline is not None:
            deadline.check()
        if hit.fact_id not in factbase:
            raise UnknownFactIdError(f"retrieved unknown fact id {hit.fact_id!r}")
        sentence = factbase.sentence(hit.fact_id)
        raw = _call_generator(
            provider,
            h,
            EMPTY_TEMPLATE.pattern,
            sentence,
            cfg.per_retrieved_f2_samples,
            cfg.nucleus_p,
            stats,
        )
        for pair in raw:
            if (pair.get("f1") or "") != sentence:
                raise ProviderError(
                    f"generator violated forced first premise for fact {hit.fact_id}"
                )
        origin = Origin(kind=RETRIEVAL_CONDITIONED, fact_id=hit.fact_id, retrieval_score=hit.score)
        out.extend(_collect(raw, origin, stats))
    return out


def propose_decompositions(
    h: str,
    cfg: GenerationConfig,
    provider: GeneratorProvider,
    hits: Sequence[RetrievalHit],
    factbase: Factbase,
    scorers: Sequence[EntailmentScorer],
    threshold: float,
    thresholds: Sequence[float] | None = None,
    stats: SearchStats | None = None,
    deadline=None,
) -> list[DecompositionCandidate]:
    """Full pipeline: generate via all three routes, drop trivial
    self-decompositions, dedup (grounded origins win), filter, and order
    by (origin priority, score, dedup key)."""
    grounded = generate_retrieval_conditioned(h, hits, cfg, provider, factbase, stats, deadline)
    templated = generate_templated(h, cfg, provider, stats, deadline)
    free = generate_free(h, cfg, provider, stats, deadline)

    h_norm = normalize(h)
    pool: list[DecompositionCandidate] = []
    seen: set[str] = set()
    for cand in [*grounded, *templated, *free]:  # priority order for dedup
        if normalize(cand.f1) == h_norm or normalize(cand.f2) == h_norm:
            if stats is not None:
                stats.self_decompositions_dropped += 1
            continue
        key = cand.dedup_key
        if key in seen:
            if stats is not None:
                stats.duplicates_removed += 1
            continue
        seen.add(key)
        pool.append(cand)

    survivors = filter_two_premise(
        [(c.f1, c.f2, h) for c in pool], scorers, threshold, thresholds, stats, deadline
    )
    if stats is not None:
        stats.candidates_filtered += len(pool) - len(survivors)

    ranked = []
    for idx, judgment in survivors:
        cand = pool[idx]
        sort_score = (
            cand.origin.retrieval_score
            if cand.origin.kind == RETRIEVAL_CONDITIONED
            else judgment.mean_score
        )
        ranked.append((cand.origin.priority, -sort_score, cand.dedup_key, cand))
    ranked.sort(key=lambda entry: entry[:3])
    return [entry[3] for entry in ranked]

"""Conjunctive entailment filtering for single- and two-premise hops.

Scorers run sequentially: each one only sees the survivors of the
previous, and an item survives the whole gate iff every scorer rates it
at or above threshold (a score of exactly 0.7 passes a 0.7 threshold).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, Sequence

from .errors import ScorerError
from .stats import SearchStats

ONE_PREMISE = "one_premise"
TWO_PREMISE = "two_premise"


@dataclass(frozen=True)
class EntailmentItem:
    premises: tuple[str, ...]
    hypothesis: str


class EntailmentScorer(Protocol):
    mode: str

    def score(self, items: Sequence[EntailmentItem]) -> Sequence[float]: ...


@dataclass(frozen=True)
class EntailmentJudgment:
    per_scorer_scores: tuple[float, ...]
    passed: bool

    @property
    def mean_score(self) -> float:
        if not self.per_scorer_scores:
            return 0.0
        return sum(self.per_scorer_scores) / len(self.per_scorer_scores)


def _score_batch(scorer, items: list[EntailmentItem], scorer_pos: int) -> list[float]:
    try:
        scores = list(scorer.score(items))
    except ScorerError:
        raise
    except Exception as exc:
        raise ScorerError(f"scorer #{scorer_pos} ({type(scorer).__name__}) failed: {exc}") from exc
    if len(scores) != len(items):
        raise ScorerError(
            f"scorer #{scorer_pos} ({type(scorer).__name__}) returned "
            f"{len(scores)} scores for {len(items)} items"
        )
    return [float(s) for s in scores]


def _filter(
    items: list[EntailmentItem],
    scorers: Sequence[EntailmentScorer],
    threshold: float,
    mode: str,
    thresholds: Sequence[float] | None,
    stats: SearchStats | None,
    deadline=None,
) -> list[tuple[int, EntailmentJudgment]]:
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold {threshold} outside [0, 1]")
    for pos, scorer in enumerate(scorers):
        if scorer.mode != mode:
            raise ValueError(f"scorer #{pos} has mode {scorer.mode!r}, expected {mode!r}")
    if thresholds is not None and len(thresholds) != len(scorers):
        raise ValueError("per-scorer thresholds must align with scorers")

    alive = list(range(len(items)))
    collected: dict[int, list[float]] = {i: [] for i in alive}
    stat_key = "entail_one" if mode == ONE_PREMISE else "entail_two"
    for pos, scorer in enumerate(scorers):
        if not alive:
            break
        if deadline is not None:
            deadline.check()
        cutoff = thresholds[pos] if thresholds is not None else threshold
        batch = [items[i] for i in alive]
        if stats is not None:
            stats.provider_calls[stat_key] += 1
        scores = _score_batch(scorer, batch, pos)
        survivors = []
        for idx, score in zip(alive, scores):
            collected[idx].append(score)
            if score >= cutoff:
                survivors.append(idx)
        alive = survivors
    return [(i, EntailmentJudgment(tuple(collected[i]), passed=True)) for i in alive]


def filter_single_premise(
    pairs: Sequence[tuple[str, str]],
    scorers: Sequence[EntailmentScorer],
    threshold: float,
    thresholds: Sequence[float] | None = None,
    stats: SearchStats | None = None,
    deadline=None,
) -> list[tuple[int, EntailmentJudgment]]:
    """Whittle (premise, hypothesis) pairs; returns the indices of the
    survivors in input order, each with its full judgment."""
    items = [EntailmentItem(premises=(f,), hypothesis=h) for f, h in pairs]
    return _filter(items, scorers, threshold, ONE_PREMISE, thresholds, stats, deadline)


def filter_two_premise(
    triples: Sequence[tuple[str, str, str]],
    scorers: Sequence[EntailmentScorer],
    threshold: float,
    thresholds: Sequence[float] | None = None,
    stats: SearchStats | None = None,
    deadline=None,
) -> list[tuple[int, EntailmentJudgment]]:
    """Same gate over ordered (f1, f2, hypothesis) triples. Callers are
    expected to deduplicate before filtering."""
    items = [EntailmentItem(premises=(f1, f2), hypothesis=h) for f1, f2, h in triples]
    return _filter(items, scorers, threshold, TWO_PREMISE, thresholds, stats, deadline)

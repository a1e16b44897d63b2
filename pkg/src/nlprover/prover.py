"""Budgeted backward-chaining proof search.

Three inference moves close a goal:

1. fact unification: retrieve stored facts and keep those the one-premise
   filters accept; the leaf carries the retrieval unification score.
2. two-premise decomposition: a generated (f1, f2) pair, both recursed.
3. retrieved-first-premise decomposition: f1 is a stored fact, only f2 is
   recursed; the grounded premise contributes nothing to the score.

A proof's score is the minimum unification score across its steps, which
makes branch-and-bound pruning sound: a partial proof can never finish
above its running minimum. Fact unification has strict precedence; a goal
is only decomposed when no retrieved fact survives the filters.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .entailment import filter_single_premise
from .errors import IncompleteProofError, ProviderError
from .factbase import Factbase, normalize
from .providers import ProviderSuite
from .rulegen import (
    RETRIEVAL_CONDITIONED,
    DecompositionCandidate,
    GenerationConfig,
    propose_decompositions,
)
from .similarity import RetrievalHit, RetrievalIndex, retrieve_top_k
from .stats import SearchStats


class SearchTimeout(Exception):
    """Internal signal; prove() converts it into timed_out=True."""


class Deadline:
    """Wall-clock budget checked between provider calls and expansions;
    an in-flight call may overrun by its own latency."""

    def __init__(self, timeout_seconds: float):
        self.expires_at = time.monotonic() + timeout_seconds

    def expired(self) -> bool:
        return time.monotonic() >= self.expires_at

    def check(self) -> None:
        if self.expired():
            raise SearchTimeout


@dataclass(frozen=True)
class Goal:
    sentence: str
    depth: int = 0


@dataclass(frozen=True)
class ProofNode:
    """Either a fact leaf (fact_id set) or a decomposition (candidate set
    with one child for a grounded first premise, two otherwise)."""

    goal: Goal
    fact_id: str | None = None
    fact_sentence: str | None = None
    unif_score: float | None = None
    candidate: DecompositionCandidate | None = None
    children: tuple["ProofNode", ...] = ()

    @property
    def is_fact_leaf(self) -> bool:
        return self.fact_id is not None

    @staticmethod
    def fact(goal: Goal, fact_id: str, sentence: str, unif_score: float) -> "ProofNode":
        return ProofNode(goal=goal, fact_id=fact_id, fact_sentence=sentence, unif_score=unif_score)

    @staticmethod
    def decomposition(
        goal: Goal, candidate: DecompositionCandidate, children: Sequence["ProofNode"]
    ) -> "ProofNode":
        return ProofNode(goal=goal, candidate=candidate, children=tuple(children))


def proof_score(node: ProofNode) -> float:
    """Leaf -> its unification score; two-premise node -> min over both
    children; grounded-first-premise node -> the single child's score."""
    if node.is_fact_leaf:
        if node.unif_score is None:
            raise IncompleteProofError("fact leaf without a unification score")
        return node.unif_score
    if node.candidate is None:
        raise IncompleteProofError(f"open goal {node.goal.sentence!r}")
    if node.candidate.origin.kind == RETRIEVAL_CONDITIONED:
        if len(node.children) != 1:
            raise IncompleteProofError("grounded decomposition needs exactly one child")
        return proof_score(node.children[0])
    if len(node.children) != 2:
        raise IncompleteProofError("two-premise decomposition needs exactly two children")
    return min(proof_score(child) for child in node.children)


def tree_height(node: ProofNode) -> int:
    if node.is_fact_leaf:
        return 1
    return 1 + max(tree_height(child) for child in node.children)


def canonical_form(node: ProofNode) -> str:
    """Compact deterministic rendering used for tie-breaking."""
    if node.is_fact_leaf:
        return f"(fact {node.goal.sentence!r} {node.fact_id} {node.unif_score!r})"
    kids = " ".join(canonical_form(child) for child in node.children)
    cand = node.candidate
    return (
        f"(decomp {node.goal.sentence!r} {cand.origin.kind} "
        f"{cand.f1!r} {cand.f2!r} {kids})"
    )


@dataclass(frozen=True)
class Proof:
    root: ProofNode
    score: float

    @staticmethod
    def of(root: ProofNode) -> "Proof":
        return Proof(root=root, score=proof_score(root))


@dataclass(frozen=True)
class SearchBudget:
    timeout_seconds: float = 90.0
    max_depth: int = 4
    max_proofs: int = 3

    def __post_init__(self):
        if self.timeout_seconds <= 0:
            raise ValueError("timeout_seconds must be > 0")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.max_proofs < 1:
            raise ValueError("max_proofs must be >= 1")


@dataclass
class SearchOutcome:
    hypothesis: str
    proofs: list[Proof]
    timed_out: bool
    stats: SearchStats

    @property
    def best_score(self) -> float | None:
        return self.proofs[0].score if self.proofs else None


@dataclass
class EngineConfig:
    """Search-facing knobs beyond the raw budget."""

    generation: GenerationConfig = field(default_factory=GenerationConfig)
    threshold: float = 0.7
    rule1_top_k: int = 20
    one_premise_thresholds: tuple[float, ...] | None = None
    two_premise_thresholds: tuple[float, ...] | None = None


def prune_check(partial_min: float, score_floor: float) -> bool:
    """A branch is hopeless when its running minimum cannot strictly beat
    score_floor: the lowest retained score once the proof list is full,
    0.0 before that (never prune without a full list)."""
    return partial_min < score_floor


def try_fact_unification(
    goal: Goal,
    index: RetrievalIndex,
    factbase: Factbase,
    scorers: Sequence,
    threshold: float,
    k: int,
    thresholds: Sequence[float] | None = None,
    stats: SearchStats | None = None,
    deadline: Deadline | None = None,
    hits: Sequence[RetrievalHit] | None = None,
) -> list[ProofNode]:
    """Close a goal against stored facts: retrieve top-k, keep survivors
    of the one-premise filters, each as a leaf carrying its retrieval
    score, best first."""
    if not goal.sentence.strip():
        raise ValueError("goal sentence must be non-empty")
    if hits is None:
        if stats is not None:
            stats.provider_calls["embed"] += 1
        hits = retrieve_top_k(index, goal.sentence, k)
    else:
        hits = list(hits)[:k]
    pairs = [(factbase.sentence(hit.fact_id), goal.sentence) for hit in hits]
    survivors = filter_single_premise(pairs, scorers, threshold, thresholds, stats, deadline)
    if stats is not None:
        stats.candidates_filtered += len(pairs) - len(survivors)
    return [
        ProofNode.fact(goal, hits[i].fact_id, pairs[i][0], hits[i].score) for i, _ in survivors
    ]


class _Retained:
    """Top-k proof list ordered by score desc, then shallower tree, then
    canonical text."""

    def __init__(self, max_proofs: int):
        self.max_proofs = max_proofs
        self.entries: list[tuple[tuple, Proof]] = []

    def offer(self, proof: Proof) -> None:
        key = (-proof.score, tree_height(proof.root), canonical_form(proof.root))
        self.entries.append((key, proof))
        self.entries.sort(key=lambda entry: entry[0])
        del self.entries[self.max_proofs :]

    def floor(self) -> float:
        if len(self.entries) < self.max_proofs:
            return 0.0
        return self.entries[-1][1].score

    def proofs(self) -> list[Proof]:
        return [proof for _, proof in self.entries]


class _Search:
    def __init__(
        self,
        budget: SearchBudget,
        providers: ProviderSuite,
        index: RetrievalIndex,
        factbase: Factbase,
        config: EngineConfig,
        pruning: bool,
    ):
        self.budget = budget
        self.providers = providers
        self.index = index
        self.factbase = factbase
        self.config = config
        self.pruning = pruning
        self.stats = SearchStats()
        self.deadline = Deadline(budget.timeout_seconds)
        self.retained = _Retained(budget.max_proofs)

    def run(self, hypothesis: str) -> None:
        root = Goal(sentence=hypothesis, depth=0)
        for node, score in self._prove_goal(root, frozenset(), 1.0):
            self.retained.offer(Proof(root=node, score=score))

    def _should_prune(self, partial_min: float) -> bool:
        if self.pruning and prune_check(partial_min, self.retained.floor()):
            self.stats.branches_pruned += 1
            return True
        return False

    def _retrieve(self, sentence: str) -> list[RetrievalHit]:
        self.stats.provider_calls["embed"] += 1
        k = max(self.config.rule1_top_k, self.config.generation.retrieval_k, 1)
        return retrieve_top_k(self.index, sentence, k)

    def _prove_goal(
        self, goal: Goal, ancestors: frozenset[str], partial_min: float
    ) -> Iterator[tuple[ProofNode, float]]:
        self.deadline.check()
        key = normalize(goal.sentence)
        if key in ancestors:
            self.stats.cycles_blocked += 1
            return
        self.stats.goals_expanded += 1

        try:
            hits = self._retrieve(goal.sentence)
            leaves = try_fact_unification(
                goal,
                self.index,
                self.factbase,
                self.providers.one_premise_scorers,
                self.config.threshold,
                self.config.rule1_top_k,
                thresholds=self.config.one_premise_thresholds,
                stats=self.stats,
                deadline=self.deadline,
                hits=hits,
            )
        except ProviderError:
            self.stats.provider_errors += 1
            return
        if leaves:
            # Fact unification has precedence: never decompose this goal.
            for leaf in leaves:
                if self._should_prune(min(partial_min, leaf.unif_score)):
                    continue
                yield leaf, leaf.unif_score
            return

        if goal.depth >= self.budget.max_depth:
            return

        try:
            candidates = propose_decompositions(
                goal.sentence,
                self.config.generation,
                self.providers.generator,
                hits,
                self.factbase,
                self.providers.two_premise_scorers,
                self.config.threshold,
                self.config.two_premise_thresholds,
                self.stats,
                self.deadline,
            )
        except ProviderError:
            self.stats.provider_errors += 1
            return

        child_ancestors = ancestors | {key}
        child_depth = goal.depth + 1
        for candidate in candidates:
            self.deadline.check()
            if self._should_prune(partial_min):
                continue
            if candidate.origin.kind == RETRIEVAL_CONDITIONED:
                for child, child_score in self._prove_goal(
                    Goal(candidate.f2, child_depth), child_ancestors, partial_min
                ):
                    yield ProofNode.decomposition(goal, candidate, (child,)), child_score
            else:
                for first, s1 in self._prove_goal(
                    Goal(candidate.f1, child_depth), child_ancestors, partial_min
                ):
                    bound = min(partial_min, s1)
                    if self._should_prune(bound):
                        continue
                    for second, s2 in self._prove_goal(
                        Goal(candidate.f2, child_depth), child_ancestors, bound
                    ):
                        node = ProofNode.decomposition(goal, candidate, (first, second))
                        yield node, min(s1, s2)


def prove(
    h: str,
    budget: SearchBudget,
    providers: ProviderSuite,
    index: RetrievalIndex,
    factbase: Factbase,
    config: EngineConfig | None = None,
    pruning: bool = True,
) -> SearchOutcome:
    """Search for up to budget.max_proofs proofs of h within the time and
    depth budget. Provider failures abandon their branch; only the
    deadline ends the search early."""
    config = config or EngineConfig()
    search = _Search(budget, providers, index, factbase, config, pruning)
    timed_out = False
    try:
        search.run(h)
    except SearchTimeout:
        timed_out = True
    return SearchOutcome(
        hypothesis=h,
        proofs=search.retained.proofs(),
        timed_out=timed_out,
        stats=search.stats,
    )

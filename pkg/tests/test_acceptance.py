"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line
(run with -s or -rP to see them on success)."""

import math
import random
import time
from contextlib import contextmanager
from pathlib import Path

from fakes import (
    FnScorer,
    MappedEmbedder,
    ScriptedGenerator,
    SlowProvider,
    make_factbase,
    random_setup,
    unit,
)
from nlprover.cli import main as cli_main
from nlprover.config import curated_templates
from nlprover.entailment import ONE_PREMISE, TWO_PREMISE, filter_two_premise
from nlprover.factbase import CONTENT, FILL, Column, RelationTable, extract_templates
from nlprover.providers import ProviderSuite
from nlprover.prover import (
    EngineConfig,
    Goal,
    ProofNode,
    Proof,
    SearchBudget,
    proof_score,
    prove,
)
from nlprover.rulegen import (
    FREE,
    RETRIEVAL_CONDITIONED,
    DecompositionCandidate,
    GenerationConfig,
    Origin,
    generate_templated,
)
from nlprover.serialize import (
    dumps,
    loads,
    outcome_from_dict,
    outcome_to_dict,
    proof_to_dict,
    serialize_proof_text,
)
from nlprover.similarity import build_index
from nlprover.stats import SearchStats

DATA = Path(__file__).parent / "data"


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {name}: FAIL")
        raise
    print(f"ACCEPTANCE {name}: PASS")


def test_pruning_soundness_over_random_kbs():
    with criterion("pruning-soundness"):
        started = time.monotonic()
        pruned_branches = 0
        for seed in range(200):
            h, budget, providers, index, fb, config = random_setup(seed, max_depth_cap=3)
            on = prove(h, budget, providers, index, fb, config, pruning=True)
            off = prove(h, budget, providers, index, fb, config, pruning=False)
            assert not on.timed_out and not off.timed_out
            assert [p.score for p in on.proofs] == [p.score for p in off.proofs]
            assert [proof_to_dict(p) for p in on.proofs] == [
                proof_to_dict(p) for p in off.proofs
            ]
            pruned_branches += on.stats.branches_pruned
        elapsed = time.monotonic() - started
        assert elapsed < 60.0, f"sweep took {elapsed:.1f}s"
        assert pruned_branches > 0, "pruning never fired; sweep is vacuous"


def test_score_semantics_exact():
    with criterion("score-semantics"):
        goal = Goal("g", 0)
        leaf95 = ProofNode.fact(goal, "kb#0", "g", 0.95)
        assert proof_score(leaf95) == 0.95

        def mk(kind, children, **kw):
            cand = DecompositionCandidate(f1="f1", f2="f2", origin=Origin(kind=kind, **kw))
            return ProofNode.decomposition(goal, cand, children)

        child = lambda s: ProofNode.fact(Goal("c", 1), "kb#1", "c", s)
        two_premise = mk(FREE, [child(0.9), child(0.7)])
        assert proof_score(two_premise) == 0.7
        grounded = mk(
            RETRIEVAL_CONDITIONED, [child(0.8)], fact_id="kb#2", retrieval_score=0.4
        )
        assert proof_score(grounded) == 0.8


def test_rule_precedence_no_decomposition():
    with criterion("rule-precedence"):
        sentences = ["copper conducts electricity", "metals carry current"]
        vectors = {s: unit([1.0 + i, float(i), 0.5]) for i, s in enumerate(sentences)}
        fb = make_factbase(sentences)
        embedder = MappedEmbedder(vectors, dim=3, default=[0.0, 0.0, 1.0])
        index = build_index(fb, embedder)
        generator = ScriptedGenerator({"copper conducts electricity": [("a", "b")]})
        providers = ProviderSuite(
            embedder=embedder,
            generator=generator,
            one_premise_scorers=(FnScorer(ONE_PREMISE, default=1.0),),
            two_premise_scorers=(FnScorer(TWO_PREMISE, default=1.0),),
        )
        outcome = prove(
            "copper conducts electricity", SearchBudget(), providers, index, fb,
            EngineConfig(generation=GenerationConfig(
                free_samples=5, per_template_samples=0, templates=(),
                retrieval_k=2, per_retrieved_f2_samples=2)),
        )
        assert outcome.proofs

        def count_decompositions(node):
            if node.is_fact_leaf:
                return 0
            return 1 + sum(count_decompositions(c) for c in node.children)

        assert all(count_decompositions(p.root) == 0 for p in outcome.proofs)
        assert generator.calls == []


def _chain_setup(levels):
    """KB where the only proof needs a goal chain a1..a_levels."""
    facts = [f"stored support {i}" for i in range(levels + 1)]
    vectors = {}
    for i, fact in enumerate(facts):
        base = [0.0] * (levels + 2)
        base[i] = 1.0
        vectors[fact] = base
    script = {}
    accepted = {}
    root = "the chained root claim"
    prev = root
    for i in range(1, levels + 1):
        a, b = f"branch goal {i}", f"side goal {i}"
        bvec = [0.0] * (levels + 2)
        bvec[i] = 0.9
        bvec[levels + 1] = math.sqrt(1 - 0.81)
        vectors[b] = unit(bvec)
        accepted[(facts[i], b)] = True
        script[prev] = [(a, b)]
        prev = a
    # the deepest branch goal unifies with fact 0
    avec = [0.0] * (levels + 2)
    avec[0] = 0.95
    avec[levels + 1] = math.sqrt(1 - 0.95**2)
    vectors[prev] = unit(avec)
    accepted[(facts[0], prev)] = True
    rvec = [0.0] * (levels + 2)
    rvec[levels + 1] = 1.0
    vectors[root] = rvec

    fb = make_factbase(facts)
    embedder = MappedEmbedder(vectors, default=rvec)
    index = build_index(fb, embedder)

    def one_fn(premises, h):
        return 1.0 if accepted.get((premises[0], h)) else 0.0

    providers = ProviderSuite(
        embedder=embedder,
        generator=ScriptedGenerator(script),
        one_premise_scorers=(FnScorer(ONE_PREMISE, one_fn),),
        two_premise_scorers=(FnScorer(TWO_PREMISE, default=1.0),),
    )
    config = EngineConfig(generation=GenerationConfig(
        free_samples=3, per_template_samples=0, templates=(),
        retrieval_k=0, per_retrieved_f2_samples=0))
    return root, providers, index, fb, config


def test_budget_compliance():
    with criterion("budget-compliance"):
        # timeout: slow providers, 2 s budget, and a root that cannot
        # fact-unify, so the search grinds through template generation
        from nlprover.stubs import StubEmbeddingProvider, StubGeneratorProvider

        fb = make_factbase([f"background fact number {i}" for i in range(5)])
        latency = 0.05
        slow = ProviderSuite(
            embedder=SlowProvider(StubEmbeddingProvider(seed=1), latency),
            generator=SlowProvider(StubGeneratorProvider(seed=1), latency),
            one_premise_scorers=(SlowProvider(FnScorer(ONE_PREMISE, default=0.0), latency),),
            two_premise_scorers=(SlowProvider(FnScorer(TWO_PREMISE, default=1.0), latency),),
        )
        index = build_index(fb, slow.embedder)
        wide = EngineConfig(
            generation=GenerationConfig(
                free_samples=10,
                per_template_samples=5,
                templates=tuple(curated_templates()),
                retrieval_k=5,
                per_retrieved_f2_samples=5,
            ),
            threshold=0.2,
            rule1_top_k=3,
        )
        started = time.monotonic()
        outcome = prove(
            "the sun gives plants energy to grow",
            SearchBudget(timeout_seconds=2.0, max_depth=4, max_proofs=3),
            slow, index, fb, wide,
        )
        elapsed = time.monotonic() - started
        assert outcome.timed_out
        assert elapsed >= 2.0
        assert elapsed <= 2.0 + latency + 0.25, f"overran budget: {elapsed:.2f}s"

        # depth: a proof requiring depth 5 never appears under max_depth 4
        root, providers, index, fb, config = _chain_setup(5)
        shallow = prove(root, SearchBudget(max_depth=4), providers, index, fb, config)
        assert shallow.proofs == []

        def deepest(node):
            if node.is_fact_leaf:
                return node.goal.depth
            return max(deepest(c) for c in node.children)

        deep = prove(root, SearchBudget(max_depth=5), providers, index, fb, config)
        assert deep.proofs
        assert max(deepest(p.root) for p in deep.proofs) == 5
        for budget_depth in (4, 5):
            outcome = prove(
                root, SearchBudget(max_depth=budget_depth), providers, index, fb, config
            )
            for proof in outcome.proofs:
                assert deepest(proof.root) <= budget_depth


def test_metrics_fixture_exact():
    with criterion("metrics-fixture"):
        from test_qa import question, record_for
        from nlprover.qa import compute_metrics, gold_map

        q1, q2, q3, q4 = (question(f"q{i}", gold="A") for i in range(1, 5))
        records = [
            record_for(q1, {"A": 0.9, "B": 0.5}),
            record_for(q2, {"B": 0.4}),
            record_for(q3, {}),
            record_for(q4, {"A": 0.6, "B": 0.8}),
        ]
        report = compute_metrics(records, gold_map([q1, q2, q3, q4]))
        assert report.accuracy_overall == 0.25
        assert report.answered_rate == 0.75
        assert report.proof_recall == 0.50
        assert report.proof_precision == 0.40
        assert report.outscored_rate == 0.25


def test_template_machinery():
    with criterion("template-machinery"):
        templates = curated_templates()
        assert len(templates) == 50
        assert all("<mask>" in t.pattern for t in templates)

        kindof = RelationTable(
            name="KINDOF",
            columns=(
                Column("HYPONYM", CONTENT),
                Column("is a kind of", FILL),
                Column("HYPERNYM", CONTENT),
            ),
            rows=(),
        )
        assert extract_templates(kindof).pattern == "<mask> is a kind of <mask>"

        pattern = templates[2]
        gen = ScriptedGenerator(
            {"h": [("a robin is a kind of bird", "x"), ("robins can fly", "y")]}
        )
        stats = SearchStats()
        out = generate_templated(
            "h",
            GenerationConfig(per_template_samples=5, templates=(pattern,)),
            gen,
            stats=stats,
        )
        assert [c.f1 for c in out] == ["a robin is a kind of bird"]
        assert stats.template_mismatches == 1


def test_filter_properties_thousand_batches():
    with criterion("filter-properties"):
        rng = random.Random(2024)
        shrink_checked = 0
        for batch_index in range(1000):
            n = rng.randrange(0, 10)
            batch = [(f"p{i}", f"q{i}", f"h{batch_index}") for i in range(n)]
            tables = [
                {((f"p{i}", f"q{i}"), f"h{batch_index}"): rng.random() for i in range(n)}
                for _ in range(rng.randrange(1, 4))
            ]
            scorers = [
                FnScorer(TWO_PREMISE, lambda p, h, t=t: t[(p, h)]) for t in tables
            ]
            t_low = rng.random()
            t_high = min(1.0, t_low + rng.random() * (1.0 - t_low))
            low = {i for i, _ in filter_two_premise(batch, scorers, t_low)}
            high = {i for i, _ in filter_two_premise(batch, scorers, t_high)}
            assert high <= low  # threshold monotonicity
            extra_table = {((f"p{i}", f"q{i}"), f"h{batch_index}"): rng.random() for i in range(n)}
            more = {
                i
                for i, _ in filter_two_premise(
                    batch,
                    scorers + [FnScorer(TWO_PREMISE, lambda p, h: extra_table[(p, h)])],
                    t_low,
                )
            }
            assert more <= low  # conjunction shrinkage
            shrink_checked += 1
        assert shrink_checked == 1000
        # boundary: exactly 0.7 survives a 0.7 threshold
        at_boundary = filter_two_premise(
            [("f1", "f2", "h")], [FnScorer(TWO_PREMISE, default=0.7)], 0.7
        )
        assert len(at_boundary) == 1


def test_serialization_golden_and_round_trip():
    with criterion("serialization"):
        bird = Proof.of(
            ProofNode.fact(Goal("a bird is an animal", 0), "kb#0", "a bird is an animal", 1.0)
        )
        assert serialize_proof_text(bird) == (
            "([?-'a bird is an animal'] 'a bird is an animal')"
        )

        grounded = ProofNode.decomposition(
            Goal("frictional force between two sticks causes them to increase in temperature", 0),
            DecompositionCandidate(
                f1="friction causes the temperature of an object to increase",
                f2="friction is the force between two sticks",
                origin=Origin(
                    kind=RETRIEVAL_CONDITIONED, fact_id="kb#0", retrieval_score=0.9
                ),
            ),
            (
                ProofNode.decomposition(
                    Goal("friction is the force between two sticks", 1),
                    DecompositionCandidate(
                        f1="friction occurs when two objects surfaces move against each other",
                        f2="sticks are objects",
                        origin=Origin(
                            kind=RETRIEVAL_CONDITIONED, fact_id="kb#1", retrieval_score=0.8
                        ),
                    ),
                    (
                        ProofNode.fact(
                            Goal("sticks are objects", 2),
                            "kb#2",
                            "a stick is a kind of object",
                            0.85,
                        ),
                    ),
                ),
            ),
        )
        text = serialize_proof_text(Proof.of(grounded))
        expected = (
            "([?-'frictional force between two sticks causes them to increase in temperature']\n"
            "  'friction causes the temperature of an object to increase'\n"
            "  ([?-'friction is the force between two sticks']\n"
            "    'friction occurs when two objects surfaces move against each other'\n"
            "    ([?-'sticks are objects'] 'a stick is a kind of object')))"
        )
        assert text == expected

        # structured round-trip is byte-identical
        outcome = prove_like_outcome(grounded)
        first = dumps(outcome_to_dict(outcome))
        second = dumps(outcome_to_dict(outcome_from_dict(loads(first))))
        assert first == second


def prove_like_outcome(root_node):
    from nlprover.prover import SearchOutcome

    return SearchOutcome(
        hypothesis=root_node.goal.sentence,
        proofs=[Proof.of(root_node)],
        timed_out=False,
        stats=SearchStats(goals_expanded=3),
    )


def test_determinism_toy_evaluation(tmp_path):
    with criterion("determinism"):
        outputs = []
        for run in range(2):
            out = tmp_path / f"run{run}.json"
            code = cli_main(
                [
                    "--factbase", str(DATA / "KINDS.tsv"),
                    "--factbase", str(DATA / "toy_facts.txt"),
                    "--templates", str(DATA / "toy_templates.txt"),
                    "--timeout", "60",
                    "--max-depth", "2",
                    "--stub-seed", "7",
                    "--out", str(out),
                    "evaluate",
                    "--questions", str(DATA / "toy_questions.jsonl"),
                ]
            )
            assert code == 0
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]
        report = loads(outputs[0].decode("utf-8"))["report"]
        assert report["counts"]["questions"] == 5

from nlprover.prover import Goal, Proof, ProofNode, SearchOutcome
from nlprover.rulegen import FREE, RETRIEVAL_CONDITIONED, DecompositionCandidate, Origin
from nlprover.serialize import (
    answer_record_from_dict,
    answer_record_to_dict,
    dumps,
    loads,
    outcome_from_dict,
    outcome_to_dict,
    proof_from_dict,
    proof_to_dict,
    report_to_dict,
    serialize_proof_text,
)
from nlprover.stats import SearchStats


def leaf(goal_text, fact_sentence, score, depth=0, fact_id="kb#0"):
    return ProofNode.fact(Goal(goal_text, depth), fact_id, fact_sentence, score)


def decomp(goal_text, kind, f1, f2, children, depth=0, **kw):
    cand = DecompositionCandidate(f1=f1, f2=f2, origin=Origin(kind=kind, **kw))
    return ProofNode.decomposition(Goal(goal_text, depth), cand, children)


class TestProofText:
    def test_smallest_tree(self):
        proof = Proof.of(leaf("a bird is an animal", "a bird is an animal", 1.0))
        assert serialize_proof_text(proof) == "([?-'a bird is an animal'] 'a bird is an animal')"

    def test_two_premise_with_two_leaves(self):
        node = decomp(
            "the kidneys filter wastes",
            FREE,
            "a kidney filters blood",
            "blood contains wastes",
            [
                leaf("a kidney filters blood", "a kidney is used for filtering blood", 0.9, 1),
                leaf("blood contains wastes", "blood moves chemical waste", 0.8, 1, "kb#1"),
            ],
        )
        expected = (
            "([?-'the kidneys filter wastes']\n"
            "  ([?-'a kidney filters blood'] 'a kidney is used for filtering blood')\n"
            "  ([?-'blood contains wastes'] 'blood moves chemical waste'))"
        )
        assert serialize_proof_text(Proof.of(node)) == expected

    def test_grounded_first_premise_renders_bare(self):
        node = decomp(
            "friction makes sticks hot",
            RETRIEVAL_CONDITIONED,
            "friction causes heat",
            "sticks rub together",
            [leaf("sticks rub together", "rubbing sticks is friction", 0.8, 1)],
            fact_id="kb#2",
            retrieval_score=0.7,
        )
        expected = (
            "([?-'friction makes sticks hot']\n"
            "  'friction causes heat'\n"
            "  ([?-'sticks rub together'] 'rubbing sticks is friction'))"
        )
        assert serialize_proof_text(Proof.of(node)) == expected

    def test_friction_tree_structure(self):
        # three-level chain of grounded-first-premise steps, mirroring the
        # canonical worked example
        innermost = leaf("sticks are objects", "a stick is a kind of object", 0.9, 2, "kb#3")
        mid = decomp(
            "friction is the force between two sticks",
            RETRIEVAL_CONDITIONED,
            "friction occurs when two objects surfaces move against each other",
            "sticks are objects",
            [innermost],
            depth=1,
            fact_id="kb#1",
            retrieval_score=0.8,
        )
        root = decomp(
            "frictional force between two sticks causes them to increase in temperature",
            RETRIEVAL_CONDITIONED,
            "friction causes the temperature of an object to increase",
            "friction is the force between two sticks",
            [mid],
            fact_id="kb#0",
            retrieval_score=0.9,
        )
        text = serialize_proof_text(Proof.of(root))
        lines = text.splitlines()
        # every query goal is wrapped, grounded facts are bare quoted lines
        assert lines[0].startswith("([?-'frictional force")
        assert lines[1].strip() == "'friction causes the temperature of an object to increase'"
        assert lines[2].strip().startswith("([?-'friction is the force")
        assert lines[3].strip() == (
            "'friction occurs when two objects surfaces move against each other'"
        )
        assert lines[4].strip().startswith("([?-'sticks are objects']")
        # indentation tracks recursion depth (two spaces per level)
        assert lines[1].startswith("  '")
        assert lines[2].startswith("  (")
        assert lines[3].startswith("    '")
        assert lines[4].startswith("    (")
        # wrapped goals match bare facts in count: 3 goals, 2 bare + 1 inline
        assert text.count("[?-") == 3
        assert text.count("'a stick is a kind of object'") == 1

    def test_every_leaf_sentence_appears_verbatim(self):
        node = decomp(
            "goal one", FREE, "f1", "f2",
            [
                leaf("f1", "first support sentence", 0.9, 1),
                leaf("f2", "second support sentence", 0.8, 1, "kb#1"),
            ],
        )
        text = serialize_proof_text(Proof.of(node))
        assert "'first support sentence'" in text
        assert "'second support sentence'" in text

    def test_generated_proofs_render_all_leaf_sentences(self):
        from fakes import random_setup
        from nlprover.prover import prove
        from nlprover.rulegen import RETRIEVAL_CONDITIONED

        def leaf_sentences(node):
            if node.is_fact_leaf:
                yield node.fact_sentence
                return
            if node.candidate.origin.kind == RETRIEVAL_CONDITIONED:
                yield node.candidate.f1
            for child in node.children:
                yield from leaf_sentences(child)

        rendered_any = False
        for seed in range(10):
            h, budget, providers, index, fb, config = random_setup(seed)
            outcome = prove(h, budget, providers, index, fb, config)
            for proof in outcome.proofs:
                rendered_any = True
                text = serialize_proof_text(proof)
                for sentence in leaf_sentences(proof.root):
                    assert f"'{sentence}'" in text
        assert rendered_any


class TestStructuredRoundTrip:
    def outcome(self):
        node = decomp(
            "g", RETRIEVAL_CONDITIONED, "stored", "made",
            [leaf("made", "supporting fact", 0.625, 1)],
            fact_id="kb#0", retrieval_score=0.5,
        )
        return SearchOutcome(
            hypothesis="g",
            proofs=[Proof.of(node)],
            timed_out=False,
            stats=SearchStats(goals_expanded=3),
        )

    def test_serialize_parse_serialize_byte_identical(self):
        doc = outcome_to_dict(self.outcome())
        first = dumps(doc)
        second = dumps(outcome_to_dict(outcome_from_dict(loads(first))))
        assert first == second

    def test_proof_round_trip_preserves_scores_exactly(self):
        proof = self.outcome().proofs[0]
        reloaded = proof_from_dict(loads(dumps(proof_to_dict(proof))))
        assert reloaded.score == proof.score
        assert reloaded.root == proof.root

    def test_empty_outcome_serializes(self):
        outcome = SearchOutcome(hypothesis="h", proofs=[], timed_out=True, stats=SearchStats())
        doc = outcome_to_dict(outcome)
        assert doc["timed_out"] is True
        assert doc["proofs"] == []
        round_tripped = outcome_from_dict(loads(dumps(doc)))
        assert round_tripped.timed_out is True
        assert round_tripped.proofs == []

    def test_report_contains_table_columns(self):
        from nlprover.qa import EvalReport

        report = EvalReport(
            accuracy_overall=0.25, accuracy_easy=0.5, accuracy_challenge=0.0,
            answered_rate=0.75, proof_precision=0.4, proof_recall=0.5,
            outscored_rate=0.25, counts={"questions": 4},
        )
        doc = report_to_dict(report)
        for column in (
            "answered_rate", "proof_precision", "proof_recall",
            "accuracy_overall", "accuracy_easy", "accuracy_challenge",
            "outscored_rate",
        ):
            assert column in doc

    def test_answer_record_round_trip(self):
        from nlprover.qa import AnswerRecord, OptionResult

        record = AnswerRecord(
            question_id="q9",
            per_option=[
                OptionResult(label="A", hypothesis="h a", outcome=self.outcome()),
                OptionResult(label="B", hypothesis=None, outcome=None),
            ],
            prediction="A",
            ambiguous_tie=False,
        )
        doc = answer_record_to_dict(record)
        first = dumps(doc)
        second = dumps(answer_record_to_dict(answer_record_from_dict(loads(first))))
        assert first == second
        assert loads(first)["per_option"][0]["best_score"] == 0.625

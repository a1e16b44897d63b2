"""Multiple-choice QA harness: declarativize options, prove each one
under its own budget, pick the best-proved option, and score a corpus.

Metric definitions (all question-level rates use every question as the
denominator; an unanswered question counts as incorrect):

* accuracy: prediction equals the gold label.
* answered rate: at least one option has a proof.
* proof recall: the gold option has at least one proof.
* proof precision: over all proved question-option pairs, the fraction
  whose option is the gold one.
* outscored rate: the gold option has a proof but some wrong option's
  best proof scores strictly higher.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .errors import MalformedQuestionError, MissingGoldError, ProviderError
from .factbase import Factbase, read_text
from .providers import ProviderSuite, QA2DProvider
from .prover import EngineConfig, Proof, SearchBudget, SearchOutcome, prove
from .similarity import RetrievalIndex

EASY = "easy"
CHALLENGE = "challenge"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class MCOption:
    label: str
    text: str


@dataclass(frozen=True)
class MCQuestion:
    id: str
    stem: str
    options: tuple[MCOption, ...]
    gold_label: str
    difficulty: str = UNKNOWN

    def gold_option(self) -> MCOption:
        return next(opt for opt in self.options if opt.label == self.gold_label)


@dataclass
class OptionResult:
    label: str
    hypothesis: str | None
    outcome: SearchOutcome | None

    @property
    def best_proof(self) -> Proof | None:
        if self.outcome is None or not self.outcome.proofs:
            return None
        return self.outcome.proofs[0]

    @property
    def best_score(self) -> float | None:
        proof = self.best_proof
        return proof.score if proof else None


@dataclass
class AnswerRecord:
    question_id: str
    per_option: list[OptionResult]
    prediction: str | None
    ambiguous_tie: bool = False


@dataclass
class EvalReport:
    accuracy_overall: float
    accuracy_easy: float
    accuracy_challenge: float
    answered_rate: float
    proof_precision: float
    proof_recall: float
    outscored_rate: float
    counts: dict[str, int] = field(default_factory=dict)
    zero_denominators: tuple[str, ...] = ()


def load_questions(file: str | Path) -> list[MCQuestion]:
    """One JSON record per line: {id, stem, options: [{label, text}, ...],
    gold, difficulty?}."""
    path = Path(file)
    questions: list[MCQuestion] = []
    for lineno, line in enumerate(read_text(path).splitlines(), start=1):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedQuestionError(f"invalid JSON: {exc}", path=str(path), line=lineno)
        questions.append(_question_from_doc(doc, str(path), lineno))
    return questions


def _question_from_doc(doc: dict, path: str | None = None, lineno: int | None = None) -> MCQuestion:
    def bad(message: str) -> MalformedQuestionError:
        return MalformedQuestionError(message, path=path, line=lineno)

    if not isinstance(doc, dict):
        raise bad("question record is not an object")
    qid = doc.get("id")
    stem = doc.get("stem")
    gold = doc.get("gold")
    raw_options = doc.get("options")
    if not qid or not isinstance(qid, str):
        raise bad("missing question id")
    if not stem or not isinstance(stem, str):
        raise bad(f"question {qid}: missing stem")
    if not isinstance(raw_options, list) or len(raw_options) < 2:
        raise bad(f"question {qid}: needs at least two options")
    options = []
    labels: set[str] = set()
    for raw in raw_options:
        label = raw.get("label") if isinstance(raw, dict) else None
        text = raw.get("text") if isinstance(raw, dict) else None
        if not label or not isinstance(text, str) or not text:
            raise bad(f"question {qid}: option missing label or text")
        if label in labels:
            raise bad(f"question {qid}: duplicate option label {label!r}")
        labels.add(label)
        options.append(MCOption(label=label, text=text))
    if not gold or gold not in labels:
        raise bad(f"question {qid}: gold label missing or not among options")
    difficulty = str(doc.get("difficulty", UNKNOWN)).lower()
    if difficulty not in (EASY, CHALLENGE):
        difficulty = UNKNOWN
    return MCQuestion(
        id=qid, stem=stem, options=tuple(options), gold_label=gold, difficulty=difficulty
    )


def answer_question(
    question: MCQuestion,
    budget: SearchBudget,
    providers: ProviderSuite,
    index: RetrievalIndex,
    factbase: Factbase,
    config: EngineConfig | None = None,
    qa2d: QA2DProvider | None = None,
    pruning: bool = True,
) -> AnswerRecord:
    """Prove every option under its own full budget; the prediction is the
    option with the strictly highest best proof score. A declarativization
    failure leaves that option unproved without aborting the question."""
    converter = qa2d or providers.qa2d
    if converter is None:
        raise ProviderError("no qa2d provider configured")
    per_option: list[OptionResult] = []
    for option in question.options:
        try:
            hypothesis = converter.declarativize(question.stem, option.text)
            if not hypothesis or not hypothesis.strip():
                raise ProviderError("qa2d produced an empty hypothesis")
        except Exception:  # any conversion failure leaves the option unproved
            per_option.append(OptionResult(label=option.label, hypothesis=None, outcome=None))
            continue
        outcome = prove(hypothesis, budget, providers, index, factbase, config, pruning)
        per_option.append(OptionResult(label=option.label, hypothesis=hypothesis, outcome=outcome))
    prediction, ambiguous = _pick_prediction(per_option)
    return AnswerRecord(
        question_id=question.id,
        per_option=per_option,
        prediction=prediction,
        ambiguous_tie=ambiguous,
    )


def _pick_prediction(per_option: Sequence[OptionResult]) -> tuple[str | None, bool]:
    best_label: str | None = None
    best_score: float | None = None
    tie = False
    for result in per_option:
        score = result.best_score
        if score is None:
            continue
        if best_score is None or score > best_score:
            best_label, best_score, tie = result.label, score, False
        elif score == best_score:
            tie = True  # earlier option kept
    return best_label, tie


def compute_metrics(
    records: Sequence[AnswerRecord], gold: Mapping[str, MCQuestion]
) -> EvalReport:
    """Corpus metrics over answer records; `gold` maps question id to its
    question (for the gold label and difficulty split)."""
    counts = {
        "questions": len(records),
        "easy": 0,
        "challenge": 0,
        "correct": 0,
        "correct_easy": 0,
        "correct_challenge": 0,
        "answered": 0,
        "gold_option_proved": 0,
        "proved_options": 0,
        "proved_gold_options": 0,
        "outscored": 0,
    }
    for record in records:
        question = gold.get(record.question_id)
        if question is None:
            raise MissingGoldError(f"no gold question for record {record.question_id!r}")
        is_easy = question.difficulty == EASY
        is_challenge = question.difficulty == CHALLENGE
        counts["easy"] += is_easy
        counts["challenge"] += is_challenge

        proved = [r for r in record.per_option if r.best_score is not None]
        gold_result = next(
            (r for r in record.per_option if r.label == question.gold_label), None
        )
        gold_score = gold_result.best_score if gold_result else None

        if proved:
            counts["answered"] += 1
        counts["proved_options"] += len(proved)
        counts["proved_gold_options"] += sum(r.label == question.gold_label for r in proved)
        if gold_score is not None:
            counts["gold_option_proved"] += 1
            if any(
                r.label != question.gold_label and r.best_score is not None
                and r.best_score > gold_score
                for r in record.per_option
            ):
                counts["outscored"] += 1
        if record.prediction == question.gold_label:
            counts["correct"] += 1
            counts["correct_easy"] += is_easy
            counts["correct_challenge"] += is_challenge

    flags: list[str] = []

    def ratio(numerator: int, denominator: int, name: str) -> float:
        if denominator == 0:
            flags.append(name)
            return 0.0
        return numerator / denominator

    report = EvalReport(
        accuracy_overall=ratio(counts["correct"], counts["questions"], "accuracy_overall"),
        accuracy_easy=ratio(counts["correct_easy"], counts["easy"], "accuracy_easy"),
        accuracy_challenge=ratio(
            counts["correct_challenge"], counts["challenge"], "accuracy_challenge"
        ),
        answered_rate=ratio(counts["answered"], counts["questions"], "answered_rate"),
        proof_precision=ratio(
            counts["proved_gold_options"], counts["proved_options"], "proof_precision"
        ),
        proof_recall=ratio(counts["gold_option_proved"], counts["questions"], "proof_recall"),
        outscored_rate=ratio(counts["outscored"], counts["questions"], "outscored_rate"),
        counts=counts,
    )
    report.zero_denominators = tuple(flags)
    return report


def gold_map(questions: Sequence[MCQuestion]) -> dict[str, MCQuestion]:
    return {question.id: question for question in questions}

"""Proof and report serialization.

The text rendering wraps every query goal as ([?-'<sentence>'] ...) with
its justification inside: a fact leaf puts the matched sentence inline,
a grounded first premise appears as a bare quoted sentence, and recursed
sub-goals nest with two-space indentation per depth.

The structured form is schema-versioned JSON that round-trips losslessly;
dumps() is canonical (sorted keys), so serialize-parse-serialize is
byte-identical.
"""

from __future__ import annotations

import json
from typing import Any

from .qa import AnswerRecord, EvalReport, OptionResult
from .prover import Goal, Proof, ProofNode, SearchOutcome
from .rulegen import RETRIEVAL_CONDITIONED, DecompositionCandidate, Origin
from .stats import SearchStats

SCHEMA_VERSION = 1


def serialize_proof_text(proof: Proof) -> str:
    return _render(proof.root, 0)


def _render(node: ProofNode, depth: int) -> str:
    pad = "  " * depth
    head = f"{pad}([?-'{node.goal.sentence}']"
    if node.is_fact_leaf:
        return f"{head} '{node.fact_sentence}')"
    lines = [head]
    if node.candidate.origin.kind == RETRIEVAL_CONDITIONED:
        lines.append(f"{'  ' * (depth + 1)}'{node.candidate.f1}'")
    for child in node.children:
        lines.append(_render(child, depth + 1))
    return "\n".join(lines) + ")"


def dumps(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def loads(text: str) -> Any:
    return json.loads(text)


# ---------------------------------------------------------------- to dicts


def origin_to_dict(origin: Origin) -> dict:
    return {
        "kind": origin.kind,
        "pattern": origin.pattern,
        "fact_id": origin.fact_id,
        "retrieval_score": origin.retrieval_score,
    }


def candidate_to_dict(candidate: DecompositionCandidate) -> dict:
    return {"f1": candidate.f1, "f2": candidate.f2, "origin": origin_to_dict(candidate.origin)}


def proof_node_to_dict(node: ProofNode) -> dict:
    doc: dict[str, Any] = {
        "goal": {"sentence": node.goal.sentence, "depth": node.goal.depth},
    }
    if node.is_fact_leaf:
        doc["justification"] = {
            "type": "fact",
            "fact_id": node.fact_id,
            "fact_sentence": node.fact_sentence,
            "unif_score": node.unif_score,
        }
    else:
        doc["justification"] = {
            "type": "decomposition",
            "candidate": candidate_to_dict(node.candidate),
            "children": [proof_node_to_dict(child) for child in node.children],
        }
    return doc


def proof_to_dict(proof: Proof) -> dict:
    return {"score": proof.score, "root": proof_node_to_dict(proof.root)}


def outcome_to_dict(outcome: SearchOutcome) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "kind": "search_outcome",
        "hypothesis": outcome.hypothesis,
        "timed_out": outcome.timed_out,
        "proofs": [proof_to_dict(proof) for proof in outcome.proofs],
        "stats": outcome.stats.as_dict(),
    }


def answer_record_to_dict(record: AnswerRecord) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "kind": "answer_record",
        "question_id": record.question_id,
        "prediction": record.prediction,
        "ambiguous_tie": record.ambiguous_tie,
        "per_option": [
            {
                "label": result.label,
                "hypothesis": result.hypothesis,
                "best_score": result.best_score,
                "outcome": outcome_to_dict(result.outcome) if result.outcome else None,
            }
            for result in record.per_option
        ],
    }


def report_to_dict(report: EvalReport) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "kind": "eval_report",
        "answered_rate": report.answered_rate,
        "proof_precision": report.proof_precision,
        "proof_recall": report.proof_recall,
        "accuracy_overall": report.accuracy_overall,
        "accuracy_easy": report.accuracy_easy,
        "accuracy_challenge": report.accuracy_challenge,
        "outscored_rate": report.outscored_rate,
        "counts": dict(report.counts),
        "zero_denominators": list(report.zero_denominators),
    }


# -------------------------------------------------------------- from dicts


def origin_from_dict(doc: dict) -> Origin:
    return Origin(
        kind=doc["kind"],
        pattern=doc.get("pattern"),
        fact_id=doc.get("fact_id"),
        retrieval_score=doc.get("retrieval_score"),
    )


def candidate_from_dict(doc: dict) -> DecompositionCandidate:
    return DecompositionCandidate(
        f1=doc["f1"], f2=doc["f2"], origin=origin_from_dict(doc["origin"])
    )


def proof_node_from_dict(doc: dict) -> ProofNode:
    goal = Goal(sentence=doc["goal"]["sentence"], depth=int(doc["goal"]["depth"]))
    just = doc["justification"]
    if just["type"] == "fact":
        return ProofNode.fact(goal, just["fact_id"], just["fact_sentence"], just["unif_score"])
    candidate = candidate_from_dict(just["candidate"])
    children = tuple(proof_node_from_dict(child) for child in just["children"])
    return ProofNode.decomposition(goal, candidate, children)


def proof_from_dict(doc: dict) -> Proof:
    return Proof(root=proof_node_from_dict(doc["root"]), score=doc["score"])


def outcome_from_dict(doc: dict) -> SearchOutcome:
    return SearchOutcome(
        hypothesis=doc["hypothesis"],
        proofs=[proof_from_dict(p) for p in doc["proofs"]],
        timed_out=bool(doc["timed_out"]),
        stats=SearchStats.from_dict(doc.get("stats", {})),
    )


def answer_record_from_dict(doc: dict) -> AnswerRecord:
    per_option = [
        OptionResult(
            label=entry["label"],
            hypothesis=entry.get("hypothesis"),
            outcome=outcome_from_dict(entry["outcome"]) if entry.get("outcome") else None,
        )
        for entry in doc["per_option"]
    ]
    return AnswerRecord(
        question_id=doc["question_id"],
        per_option=per_option,
        prediction=doc.get("prediction"),
        ambiguous_tie=bool(doc.get("ambiguous_tie", False)),
    )


def report_from_dict(doc: dict) -> EvalReport:
    return EvalReport(
        accuracy_overall=doc["accuracy_overall"],
        accuracy_easy=doc["accuracy_easy"],
        accuracy_challenge=doc["accuracy_challenge"],
        answered_rate=doc["answered_rate"],
        proof_precision=doc["proof_precision"],
        proof_recall=doc["proof_recall"],
        outscored_rate=doc["outscored_rate"],
        counts={k: int(v) for k, v in doc.get("counts", {}).items()},
        zero_denominators=tuple(doc.get("zero_denominators", ())),
    )

"""Backward-chaining inference engine over natural-language statements.

Proves a hypothesis against an immutable fact store by weakly unifying it
with retrieved facts or decomposing it into generated premise pairs, with
entailment filters gating every hop and a min-aggregated score per proof.
"""

from .entailment import (
    ONE_PREMISE,
    TWO_PREMISE,
    EntailmentItem,
    EntailmentJudgment,
    filter_single_premise,
    filter_two_premise,
)
from .errors import EngineError
from .factbase import (
    EMPTY_TEMPLATE,
    MASK,
    Fact,
    Factbase,
    InfillTemplate,
    RelationTable,
    extract_templates,
    ingest_tables,
    load_templates,
    normalize,
    render_row,
)
from .providers import ProviderSuite
from .prover import (
    EngineConfig,
    Goal,
    Proof,
    ProofNode,
    SearchBudget,
    SearchOutcome,
    proof_score,
    prove,
    prune_check,
    try_fact_unification,
)
from .qa import (
    AnswerRecord,
    EvalReport,
    MCOption,
    MCQuestion,
    answer_question,
    compute_metrics,
    load_questions,
)
from .rulegen import (
    DecompositionCandidate,
    GenerationConfig,
    Origin,
    generate_free,
    generate_retrieval_conditioned,
    generate_templated,
    propose_decompositions,
)
from .serialize import serialize_proof_text
from .similarity import (
    RetrievalHit,
    RetrievalIndex,
    build_index,
    cosine,
    retrieve_top_k,
    unification_score,
)

__version__ = "0.1.0"

__all__ = [
    "AnswerRecord",
    "DecompositionCandidate",
    "EMPTY_TEMPLATE",
    "EngineConfig",
    "EngineError",
    "EntailmentItem",
    "EntailmentJudgment",
    "EvalReport",
    "Fact",
    "Factbase",
    "GenerationConfig",
    "Goal",
    "InfillTemplate",
    "MASK",
    "MCOption",
    "MCQuestion",
    "ONE_PREMISE",
    "Origin",
    "Proof",
    "ProofNode",
    "ProviderSuite",
    "RelationTable",
    "RetrievalHit",
    "RetrievalIndex",
    "SearchBudget",
    "SearchOutcome",
    "TWO_PREMISE",
    "answer_question",
    "build_index",
    "compute_metrics",
    "cosine",
    "extract_templates",
    "filter_single_premise",
    "filter_two_premise",
    "generate_free",
    "generate_retrieval_conditioned",
    "generate_templated",
    "ingest_tables",
    "load_questions",
    "load_templates",
    "normalize",
    "proof_score",
    "propose_decompositions",
    "prove",
    "prune_check",
    "render_row",
    "retrieve_top_k",
    "serialize_proof_text",
    "try_fact_unification",
    "unification_score",
]

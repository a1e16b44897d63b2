"""Model backends: the seeded stub and real-model adapters.

STUB needs nothing beyond the standard library. REAL wraps locally hosted
pretrained models behind the same four operations; the heavy imports are
deferred so the service starts instantly in stub deployments.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from . import stub_math

ONE_PREMISE = "one_premise"
TWO_PREMISE = "two_premise"

STUB = "stub"
REAL = "real"


@dataclass
class ServiceConfig:
    mode: str = STUB
    seed: int = 0
    embed_dim: int = 32
    host: str = "127.0.0.1"
    port: int = 8091
    # REAL-mode model identifiers; configuration, not code
    models: dict[str, str] = field(
        default_factory=lambda: {
            "embed": "sentence-transformers/msmarco-distilbert-base-v4",
            "generate": "t5-large",
            "entail": "cross-encoder/nli-deberta-v3-base",
            "qa2d": "t5-base",
        }
    )


class StubBackend:
    """Deterministic responses; identical seed means identical answers."""

    def __init__(self, config: ServiceConfig):
        self.seed = config.seed
        self.dim = config.embed_dim

    def embed(self, texts: Sequence[str]) -> list[list[float]]:
        return [stub_math.stub_embedding(self.seed, t, self.dim) for t in texts]

    def generate(
        self,
        hypothesis: str,
        template: str,
        forced_premise: str | None,
        num_samples: int,
        nucleus_p: float,
    ) -> list[dict[str, str]]:
        return stub_math.stub_generate(
            self.seed, hypothesis, template, forced_premise, num_samples
        )

    def entail(self, mode: str, items: Sequence[dict]) -> list[float]:
        return [
            stub_math.stub_entailment_score(
                self.seed, mode, item["premises"], item["hypothesis"]
            )
            for item in items
        ]

    def qa2d(self, question: str, answer: str) -> str:
        return stub_math.stub_qa2d(question, answer)


class RealBackend:
    """Adapters over locally hosted pretrained models (optional extra)."""

    def __init__(self, config: ServiceConfig):
        try:
            from sentence_transformers import CrossEncoder, SentenceTransformer
            from transformers import pipeline
        except ImportError as exc:
            raise RuntimeError(
                "real mode needs the 'real' extra installed "
                "(pip install model-service[real])"
            ) from exc
        self._encoder = SentenceTransformer(config.models["embed"])
        self._cross = CrossEncoder(config.models["entail"])
        self._generator = pipeline("text2text-generation", model=config.models["generate"])
        self._qa2d = pipeline("text2text-generation", model=config.models["qa2d"])

    def embed(self, texts: Sequence[str]) -> list[list[float]]:
        return [vec.tolist() for vec in self._encoder.encode(list(texts))]

    def generate(self, hypothesis, template, forced_premise, num_samples, nucleus_p):
        prompt = f"hypothesis: {hypothesis} template: {template or stub_math.MASK}"
        decode_kwargs = dict(
            do_sample=True,
            top_p=nucleus_p,
            num_return_sequences=max(1, min(num_samples, 32)),
        )
        if forced_premise is not None:
            prompt = f"{prompt} premise: {forced_premise}"
        outputs = self._generator(prompt, **decode_kwargs) if num_samples else []
        candidates = []
        for out in outputs:
            text = out["generated_text"]
            first, _, second = text.partition(" && ")
            f1 = forced_premise if forced_premise is not None else first.strip()
            f2 = (second or first).strip()
            if f1 and f2:
                candidates.append({"f1": f1, "f2": f2})
        return candidates[:num_samples]

    def entail(self, mode: str, items: Sequence[dict]) -> list[float]:
        pairs = [(" ".join(item["premises"]), item["hypothesis"]) for item in items]
        scores = self._cross.predict(pairs)
        return [float(min(1.0, max(0.0, s))) for s in scores]

    def qa2d(self, question: str, answer: str) -> str:
        out = self._qa2d(f"question: {question} answer: {answer}")
        text = out[0]["generated_text"].strip()
        return text or f"{question.rstrip('?')} {answer}".strip()


def make_backend(config: ServiceConfig):
    if config.mode == STUB:
        return StubBackend(config)
    if config.mode == REAL:
        return RealBackend(config)
    raise ValueError(f"unknown service mode {config.mode!r}")

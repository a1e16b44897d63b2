"""Remote provider clients and the provider bundle the engine consumes.

Each provider kind speaks a small JSON-over-HTTP protocol:

* embed:    {"texts": [...]}                          -> {"vectors": [[...], ...]}
* generate: {"hypothesis", "template", "forced_premise",
             "num_samples", "nucleus_p"}              -> {"candidates": [{"f1","f2"}, ...]}
* entail:   {"mode", "items": [{"premises", "hypothesis"}, ...]} -> {"scores": [...]}
* qa2d:     {"question", "answer"}                    -> {"hypothesis": "..."}

An optional on-disk cache short-circuits repeated requests bit-exactly.
In-process stub providers (see stubs.py) satisfy the same contracts.
"""

from __future__ import annotations

import json
import urllib.error
import urllib.request
from dataclasses import dataclass
from typing import Protocol, Sequence

from .cache import ProviderCache, canonical_request_bytes
from .entailment import EntailmentItem, EntailmentScorer
from .errors import ProviderError, ScorerError
from .rulegen import GeneratorProvider
from .similarity import EmbeddingProvider


class QA2DProvider(Protocol):
    def declarativize(self, stem: str, answer: str) -> str: ...


@dataclass
class ProviderSuite:
    """Everything the proof search needs to invoke, in one place."""

    embedder: EmbeddingProvider
    generator: GeneratorProvider
    one_premise_scorers: tuple[EntailmentScorer, ...] = ()
    two_premise_scorers: tuple[EntailmentScorer, ...] = ()
    qa2d: QA2DProvider | None = None


class _HttpChannel:
    def __init__(self, endpoint: str, kind: str, cache: ProviderCache | None = None,
                 timeout: float = 60.0):
        self.endpoint = endpoint.rstrip("/")
        self.kind = kind
        self.cache = cache
        self.timeout = timeout

    def post(self, payload: dict) -> dict:
        body = canonical_request_bytes(payload)
        if self.cache is not None:
            hit = self.cache.get(self.kind, body)
            if hit is not None:
                return self._parse(hit)
        request = urllib.request.Request(
            self.endpoint,
            data=body,
            headers={"Content-Type": "application/json"},
            method="POST",
        )
        try:
            with urllib.request.urlopen(request, timeout=self.timeout) as response:
                raw = response.read()
        except urllib.error.HTTPError as exc:
            detail = ""
            try:
                detail = json.loads(exc.read().decode("utf-8")).get("error", "")
            except Exception:
                pass
            raise ProviderError(
                f"{self.kind} endpoint {self.endpoint} returned {exc.code}"
                + (f": {detail}" if detail else "")
            ) from exc
        except (urllib.error.URLError, OSError, TimeoutError) as exc:
            raise ProviderError(f"{self.kind} endpoint {self.endpoint} unreachable: {exc}") from exc
        doc = self._parse(raw)
        if self.cache is not None:
            self.cache.put(self.kind, body, raw)
        return doc

    def _parse(self, raw: bytes) -> dict:
        try:
            doc = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ProviderError(f"{self.kind} endpoint returned invalid JSON") from exc
        if not isinstance(doc, dict):
            raise ProviderError(f"{self.kind} endpoint returned a non-object response")
        return doc


class HTTPEmbeddingProvider:
    def __init__(self, endpoint: str, cache: ProviderCache | None = None, timeout: float = 60.0):
        self._channel = _HttpChannel(endpoint, "embed", cache, timeout)

    def embed(self, texts: Sequence[str]) -> list[list[float]]:
        doc = self._channel.post({"texts": list(texts)})
        vectors = doc.get("vectors")
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            raise ProviderError("embed response missing one vector per input text")
        dims = {len(v) for v in vectors}
        if len(dims) > 1:
            raise ProviderError(f"embed response has mixed vector lengths {sorted(dims)}")
        return [[float(x) for x in vec] for vec in vectors]


class HTTPGeneratorProvider:
    def __init__(self, endpoint: str, cache: ProviderCache | None = None, timeout: float = 60.0):
        self._channel = _HttpChannel(endpoint, "generate", cache, timeout)

    def generate(
        self,
        hypothesis: str,
        template: str,
        forced_f1: str | None,
        num_samples: int,
        nucleus_p: float,
    ) -> list[dict[str, str]]:
        doc = self._channel.post(
            {
                "hypothesis": hypothesis,
                "template": template,
                "forced_premise": forced_f1,
                "num_samples": num_samples,
                "nucleus_p": nucleus_p,
            }
        )
        candidates = doc.get("candidates")
        if not isinstance(candidates, list):
            raise ProviderError("generate response missing candidates list")
        out = []
        for cand in candidates:
            if not isinstance(cand, dict) or "f1" not in cand or "f2" not in cand:
                raise ProviderError("generate candidate missing f1/f2 fields")
            out.append({"f1": str(cand["f1"]), "f2": str(cand["f2"])})
        return out


class HTTPEntailmentScorer:
    def __init__(self, endpoint: str, mode: str, cache: ProviderCache | None = None,
                 timeout: float = 60.0):
        self.mode = mode
        self._channel = _HttpChannel(endpoint, "entail", cache, timeout)

    def score(self, items: Sequence[EntailmentItem]) -> list[float]:
        try:
            doc = self._channel.post(
                {
                    "mode": self.mode,
                    "items": [
                        {"premises": list(item.premises), "hypothesis": item.hypothesis}
                        for item in items
                    ],
                }
            )
        except ProviderError as exc:
            raise ScorerError(str(exc)) from exc
        scores = doc.get("scores")
        if not isinstance(scores, list) or len(scores) != len(items):
            raise ScorerError("entail response missing one score per item")
        out = []
        for s in scores:
            value = float(s)
            if not 0.0 <= value <= 1.0:
                raise ScorerError(f"entail score {value} outside [0, 1]")
            out.append(value)
        return out


class HTTPQA2DProvider:
    def __init__(self, endpoint: str, cache: ProviderCache | None = None, timeout: float = 60.0):
        self._channel = _HttpChannel(endpoint, "qa2d", cache, timeout)

    def declarativize(self, stem: str, answer: str) -> str:
        doc = self._channel.post({"question": stem, "answer": answer})
        hypothesis = doc.get("hypothesis")
        if not isinstance(hypothesis, str) or not hypothesis.strip():
            raise ProviderError("qa2d response missing a non-empty hypothesis")
        return hypothesis

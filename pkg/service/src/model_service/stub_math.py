"""Deterministic, model-free response math for STUB mode.

Everything derives from sha256 over (seed, request content), so identical
seeds give identical responses across processes and restarts. These
functions intentionally mirror the inference engine's in-process stub
providers bit for bit; the contract tests compare the two directly.
"""

from __future__ import annotations

import hashlib
import math
import re
from typing import Sequence

MASK = "<mask>"

_SEP = "\x1f"
_TOKEN_RE = re.compile(r"[a-z0-9]+")


def hash_floats(seed: int, parts: Sequence[str], n: int) -> list[float]:
    """Expand (seed, parts) into n floats in [0, 1) via counter-mode sha256."""
    key = _SEP.join(parts)
    out: list[float] = []
    counter = 0
    while len(out) < n:
        digest = hashlib.sha256(f"{seed}|{counter}|{key}".encode("utf-8")).digest()
        for i in range(0, 32, 8):
            if len(out) >= n:
                break
            out.append(int.from_bytes(digest[i : i + 8], "big") / 2.0**64)
        counter += 1
    return out


def stub_embedding(seed: int, text: str, dim: int = 32) -> list[float]:
    """Unit vector derived from the text hash; equal texts embed equally."""
    raw = [2.0 * u - 1.0 for u in hash_floats(seed, ["embed", text], dim)]
    norm = math.sqrt(sum(x * x for x in raw))
    if norm == 0.0:
        raw = [1.0] + [0.0] * (dim - 1)
        norm = 1.0
    return [x / norm for x in raw]


def _tokens(text: str) -> set[str]:
    return set(_TOKEN_RE.findall(text.lower()))


def stub_entailment_score(seed: int, mode: str, premises: Sequence[str], hypothesis: str) -> float:
    """Token-overlap score with a small hash-noise component, in [0, 1]."""
    premise_tokens: set[str] = set()
    for premise in premises:
        premise_tokens |= _tokens(premise)
    hyp_tokens = _tokens(hypothesis)
    overlap = len(hyp_tokens & premise_tokens) / len(hyp_tokens) if hyp_tokens else 0.0
    noise = hash_floats(seed, ["entail", mode, *premises, hypothesis], 1)[0]
    return min(1.0, max(0.0, 0.8 * overlap + 0.2 * noise))


def stub_generate(
    seed: int,
    hypothesis: str,
    template: str,
    forced_premise: str | None,
    num_samples: int,
    max_candidates: int = 6,
) -> list[dict[str, str]]:
    """Deterministic premise-pair recombinations of the hypothesis."""
    words = hypothesis.split()
    target = max(0, min(num_samples, max_candidates))
    out: list[dict[str, str]] = []
    seen: set[tuple[str, str]] = set()
    attempt = 0
    while len(out) < target and attempt < target * 4:
        draws = hash_floats(
            seed,
            ["generate", hypothesis, template, forced_premise or "", str(attempt)],
            4,
        )
        attempt += 1
        f2 = _rotate(words, draws[1])
        if forced_premise is not None:
            f1 = forced_premise
        elif template and template != MASK and MASK in template:
            f1 = _fill_template(template, words, draws)
        else:
            split = 1 + int(draws[0] * (len(words) - 1)) if len(words) >= 2 else 1
            f1 = " ".join(words[:split]) or hypothesis
            f2 = " ".join(words[split:]) or _rotate(words, draws[1])
        f1, f2 = f1.strip(), f2.strip()
        if not f1 or not f2 or (f1, f2) in seen:
            continue
        seen.add((f1, f2))
        out.append({"f1": f1, "f2": f2})
    return out


def _rotate(words: list[str], draw: float) -> str:
    if len(words) < 2:
        return (" ".join(words) + " holds").strip() or "something holds"
    k = 1 + int(draw * (len(words) - 1))
    k = min(k, len(words) - 1)
    return " ".join(words[k:] + words[:k])


def _fill_template(template: str, words: list[str], draws: list[float]) -> str:
    pool = words or ["something"]
    filled = template
    slot = 0
    while MASK in filled:
        draw = draws[(2 + slot) % len(draws)]
        start = int(draw * len(pool)) % len(pool)
        span = " ".join(pool[start : start + 2]) or pool[0]
        filled = filled.replace(MASK, span, 1)
        slot += 1
    return " ".join(filled.split())


def stub_qa2d(stem: str, answer: str) -> str:
    """Rule-based splice of question stem and candidate answer."""
    lead = stem.strip().rstrip("?").strip()
    out = f"{lead} {answer.strip()}".strip()
    return out or "statement"

"""Run configuration: defaults, config-file loading, and engine assembly.

A run resolves every provider kind (embed, generate, entail, qa2d) to
either the in-process seeded stub or an HTTP endpoint. The config file is
JSON mirroring RunConfig field names; command-line flags win over it.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .cache import ProviderCache
from .entailment import ONE_PREMISE, TWO_PREMISE
from .errors import ConfigError
from .factbase import Factbase, InfillTemplate, ingest_tables, load_templates
from .providers import (
    HTTPEmbeddingProvider,
    HTTPEntailmentScorer,
    HTTPGeneratorProvider,
    HTTPQA2DProvider,
    ProviderSuite,
)
from .prover import EngineConfig, SearchBudget
from .rulegen import GenerationConfig
from .similarity import CachedEmbedder, RetrievalIndex, build_index
from .stubs import (
    StubEmbeddingProvider,
    StubEntailmentScorer,
    StubGeneratorProvider,
    StubQA2DProvider,
)

PROVIDER_KINDS = ("embed", "generate", "entail", "qa2d")
CACHE_ENV_VAR = "PROVER_CACHE_DIR"
STUB = "stub"


def curated_templates() -> list[InfillTemplate]:
    """The packaged 50-pattern template list."""
    with resources.as_file(
        resources.files("nlprover.data").joinpath("curated_templates.txt")
    ) as path:
        return load_templates(path)


@dataclass
class RunConfig:
    factbase_paths: list[str] = field(default_factory=list)
    template_path: str | None = None  # None -> packaged curated templates
    endpoints: dict[str, list[str]] = field(
        default_factory=lambda: {kind: [STUB] for kind in PROVIDER_KINDS}
    )
    stub_seed: int = 0
    stub_embed_dim: int = 32
    cache_dir: str | None = None
    timeout_seconds: float = 90.0
    max_depth: int = 4
    max_proofs: int = 3
    threshold: float = 0.7
    rule1_top_k: int = 20
    free_samples: int = 100
    per_template_samples: int = 10
    retrieval_k: int = 10
    per_retrieved_f2_samples: int = 100
    nucleus_p: float = 0.95
    pruning: bool = True

    def budget(self) -> SearchBudget:
        return SearchBudget(
            timeout_seconds=self.timeout_seconds,
            max_depth=self.max_depth,
            max_proofs=self.max_proofs,
        )

    def generation(self, templates: tuple[InfillTemplate, ...]) -> GenerationConfig:
        return GenerationConfig(
            free_samples=self.free_samples,
            per_template_samples=self.per_template_samples,
            templates=templates,
            retrieval_k=self.retrieval_k,
            per_retrieved_f2_samples=self.per_retrieved_f2_samples,
            nucleus_p=self.nucleus_p,
        )


def load_run_config(path: str | Path | None = None, overrides: dict | None = None) -> RunConfig:
    config = RunConfig()
    if path is not None:
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError(f"config {path} is not a JSON object")
        _apply(config, doc, source=str(path))
    if overrides:
        _apply(config, overrides, source="flags")
    if config.cache_dir is None:
        config.cache_dir = os.environ.get(CACHE_ENV_VAR) or None
    for kind in PROVIDER_KINDS:
        urls = config.endpoints.get(kind)
        if not urls:
            raise ConfigError(f"provider kind {kind!r} resolves to nothing")
    return config


def _apply(config: RunConfig, doc: dict, source: str) -> None:
    for key, value in doc.items():
        if value is None:
            continue
        if key == "endpoints":
            if not isinstance(value, dict):
                raise ConfigError(f"{source}: endpoints must map kind to url(s)")
            for kind, urls in value.items():
                if kind not in PROVIDER_KINDS:
                    raise ConfigError(f"{source}: unknown provider kind {kind!r}")
                config.endpoints[kind] = [urls] if isinstance(urls, str) else list(urls)
        elif hasattr(config, key):
            current = getattr(config, key)
            try:
                setattr(config, key, type(current)(value) if current is not None else value)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"{source}: bad value for {key}: {exc}") from exc
        else:
            raise ConfigError(f"{source}: unknown config key {key!r}")


@dataclass
class Engine:
    """A fully assembled run: fact store, index, providers, and knobs."""

    factbase: Factbase
    index: RetrievalIndex
    providers: ProviderSuite
    config: EngineConfig
    budget: SearchBudget
    pruning: bool = True


def build_providers(config: RunConfig) -> ProviderSuite:
    cache = ProviderCache(config.cache_dir) if config.cache_dir else None

    def first(kind: str) -> str:
        urls = config.endpoints[kind]
        if len(urls) != 1:
            # only entail may repeat (each endpoint adds one filter to the
            # conjunction)
            raise ConfigError(f"provider kind {kind!r} must resolve to exactly one endpoint")
        return urls[0]

    if first("embed") == STUB:
        embedder = StubEmbeddingProvider(seed=config.stub_seed, dim=config.stub_embed_dim)
    else:
        embedder = HTTPEmbeddingProvider(first("embed"), cache=cache)

    if first("generate") == STUB:
        generator = StubGeneratorProvider(seed=config.stub_seed)
    else:
        generator = HTTPGeneratorProvider(first("generate"), cache=cache)

    one_premise = []
    two_premise = []
    for url in config.endpoints["entail"]:
        if url == STUB:
            one_premise.append(StubEntailmentScorer(ONE_PREMISE, seed=config.stub_seed))
            two_premise.append(StubEntailmentScorer(TWO_PREMISE, seed=config.stub_seed))
        else:
            one_premise.append(HTTPEntailmentScorer(url, ONE_PREMISE, cache=cache))
            two_premise.append(HTTPEntailmentScorer(url, TWO_PREMISE, cache=cache))

    if first("qa2d") == STUB:
        qa2d = StubQA2DProvider(seed=config.stub_seed)
    else:
        qa2d = HTTPQA2DProvider(first("qa2d"), cache=cache)

    return ProviderSuite(
        embedder=embedder,
        generator=generator,
        one_premise_scorers=tuple(one_premise),
        two_premise_scorers=tuple(two_premise),
        qa2d=qa2d,
    )


def build_engine(config: RunConfig) -> Engine:
    if not config.factbase_paths:
        raise ConfigError("no factbase paths configured")
    factbase = ingest_tables(config.factbase_paths)
    providers = build_providers(config)
    embedder = CachedEmbedder(providers.embedder)
    providers.embedder = embedder
    index = build_index(factbase, embedder)
    templates = (
        tuple(load_templates(config.template_path))
        if config.template_path
        else tuple(curated_templates())
    )
    engine_config = EngineConfig(
        generation=config.generation(templates),
        threshold=config.threshold,
        rule1_top_k=config.rule1_top_k,
    )
    return Engine(
        factbase=factbase,
        index=index,
        providers=providers,
        config=engine_config,
        budget=config.budget(),
        pruning=config.pruning,
    )

"""Exception types shared across the engine.

The CLI maps these onto exit codes: ConfigError -> 2, DataError -> 3,
ProviderError -> 4.
"""


class EngineError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(EngineError):
    """Invalid run configuration (bad flag, unresolvable provider, ...)."""


class DataError(EngineError):
    """Malformed or unusable input data."""


class MalformedTableError(DataError):
    """Table file with a bad header or a ragged row."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        loc = f"{path}:{line}" if path and line is not None else (path or "")
        super().__init__(f"{loc}: {message}" if loc else message)
        self.path = path
        self.line = line


class EmptyFactbaseError(DataError):
    """Ingest produced zero facts."""


class EmptyRowError(DataError):
    """A table row with only empty cells was rendered."""


class MalformedTemplateError(DataError):
    """Template line without a mask token or with a bad support count."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        loc = f"{path}:{line}" if path and line is not None else (path or "")
        super().__init__(f"{loc}: {message}" if loc else message)
        self.path = path
        self.line = line


class MalformedQuestionError(DataError):
    """Question record missing required fields or internally inconsistent."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        loc = f"{path}:{line}" if path and line is not None else (path or "")
        super().__init__(f"{loc}: {message}" if loc else message)
        self.path = path
        self.line = line


class MissingGoldError(DataError):
    """An answer record has no matching gold question."""


class DimMismatchError(EngineError):
    """Cosine of two vectors with different dimensionality."""


class ZeroVectorError(EngineError):
    """Cosine of an all-zero vector is undefined."""


class UnknownFactIdError(EngineError):
    """A referenced fact id is not present in the factbase."""


class IncompleteProofError(EngineError):
    """Proof tree with an open goal cannot be scored."""


class ProviderError(EngineError):
    """A pluggable provider failed or violated its contract."""


class ScorerError(ProviderError):
    """An entailment scorer failed; identifies the scorer."""


class CacheIOError(EngineError):
    """Provider cache could not be read or written."""

    def __init__(self, message: str, path: str | None = None):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path

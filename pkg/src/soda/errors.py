"""Exception types raised across the engine."""

from __future__ import annotations


class SodaError(Exception):
    """Base class for all engine errors."""


class ParseError(SodaError):
    """Malformed input data; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EvaluationError(SodaError):
    """Invalid query evaluated against a store."""


class TransportError(SodaError):
    """Remote endpoint failure (network, status, or malformed payload)."""

    def __init__(self, message: str, endpoint: str = "", status: int | None = None):
        self.endpoint = endpoint
        self.status = status
        super().__init__(message)


class QueryTimeoutError(TransportError):
    """Remote endpoint did not answer within the allotted time."""


class StoreLoadError(SodaError):
    """Persisted artifact could not be loaded (corrupt, wrong version)."""


class RuleError(SodaError):
    """Rewrite-rule file failed validation."""


class UnmatchedQuestionError(SodaError):
    """No question word matched the index vocabulary."""

    def __init__(self, skipped: list[str]):
        self.skipped = list(skipped)
        super().__init__(
            "no index match for any question word (skipped: %s)" % ", ".join(skipped)
        )


class NoInterpretationError(SodaError):
    """No candidate combination produced a connected query graph."""


class ConjunctionUnsupportedError(NoInterpretationError):
    """Multiple instance groups of one class in a single question."""


class GenerationError(SodaError):
    """Query graph cannot be serialized to SPARQL."""


class BenchmarkError(SodaError):
    """Benchmark file failed to load or validate."""


class ConfigError(SodaError):
    """Bad configuration value or mismatched artifacts."""

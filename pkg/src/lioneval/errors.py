"""Exception types shared across the toolkit."""


class LionEvalError(Exception):
    """Base class for all toolkit domain errors."""


class ManifestError(LionEvalError):
    """Manifest file cannot be parsed or violates an invariant."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = path if line is None else f"{path}:{line}"
            prefix += ": "
        super().__init__(prefix + message)


class ConfigError(LionEvalError):
    """Tool or corpus configuration is invalid."""


class PlanError(LionEvalError):
    """Balancing plan cannot be constructed from the corpus."""


class SamplingError(LionEvalError):
    """Replication/subsampling called with unsatisfiable arguments."""


class ScoringError(LionEvalError):
    """Scoring is undefined for the given inputs (e.g. empty reference)."""


class ProtocolError(LionEvalError):
    """Transcriber child process violated the wire protocol."""


class HarnessError(LionEvalError):
    """Benchmark run could not be started or completed."""

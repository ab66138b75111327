"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class UnsupportedParameterError(ValueError):
    """Parameter combination the analytic path does not support.

    Raised for non-integer or large Nakagami shapes; the Monte Carlo
    simulator handles those cases instead.
    """


class DegenerateConditionError(ValueError):
    """Conditioning event has (numerically) zero probability."""


class StaleCacheError(RuntimeError):
    """Cached CDF table is corrupt or was built for different parameters."""


class ScenarioFormatError(ValueError):
    """Scenario file is malformed; the message names the offending field."""

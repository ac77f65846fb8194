"""Exception hierarchy.

Every error carries the name of the pipeline stage that raised it so the
command-line front end can report where a failure came from.
"""


class WatchRiskError(Exception):
    """Base class for all package errors."""

    module = "watchrisk"


class IngestError(WatchRiskError, ValueError):
    """A score record or CSV row could not be parsed."""

    module = "scores"

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ScoreRangeError(IngestError):
    """A score fell outside ``[0, score_max]`` or was not finite."""


class ConfigError(WatchRiskError, ValueError):
    """Invalid or inconsistent configuration."""

    module = "config"


class InsufficientDataError(WatchRiskError, ValueError):
    """Not enough scores to build the requested estimate."""

    module = "entropy"


class IncompatibleHistogramError(WatchRiskError, ValueError):
    """Two histograms do not share a bin grid."""

    module = "entropy"

"""Exception hierarchy shared across the package.

Every error carries a stable machine-readable ``code`` (e.g.
``WEIGHT_SUM_INVALID``, ``MALFORMED_XML``) so callers and tests can match
on the condition instead of on message wording.
"""

from __future__ import annotations


class AuditError(Exception):
    """Base class for all domain errors raised by this package."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class ValidationError(AuditError):
    """Invalid domain object: weights, configuration, or record invariants."""


class ParseError(AuditError):
    """A report file could not be parsed into raw metrics."""

    def __init__(self, code: str, message: str, source: str = "<string>", line: int | None = None):
        super().__init__(code, message)
        self.source = source
        self.line = line

    def location(self) -> str:
        if self.line is not None:
            return f"{self.source}:{self.line}"
        return self.source


class ScoringError(AuditError):
    """A score could not be computed from otherwise valid raw metrics."""


class AnalysisError(AuditError):
    """Assessments cannot be compared (mismatched weights, too few points)."""


class RunnerError(AuditError):
    """An external tool invocation failed or produced no usable report."""


class StoreError(AuditError):
    """History persistence failed."""

"""Exception types shared across the package.

The CLI maps these onto process exit codes, so the split matters:
schema/validation problems are distinct from instances that are
well-formed but mathematically degenerate.
"""

from __future__ import annotations


class QpsError(Exception):
    """Base class for all package-specific errors."""


class SchemaError(QpsError, ValueError):
    """Malformed input: missing entries, bad keys, values outside [0, 1]."""


class SizeError(QpsError, ValueError):
    """Variable count outside the supported range 2..14."""


class DegenerateInstanceError(QpsError, ValueError):
    """Instance on which the requested construction is undefined.

    Raised for an all-zero marginal vector (trace of R vanishes) and for
    conditioning on a deterministic variable.
    """


class IncompleteCoverageError(QpsError, ValueError):
    """Context samples do not cover every unary index and pair."""

    def __init__(self, missing: list[str]):
        self.missing = list(missing)
        super().__init__("uncovered contexts: " + ", ".join(self.missing))

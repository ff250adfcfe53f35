"""Error taxonomy shared by all modules.

The CLI maps these onto exit statuses: ParseError and ValidationError are
bad requests (status 2), CapExceeded is a refused computation (status 3),
CheckFailed is a mathematical check that did not hold (status 1).
"""


class GenwaitError(Exception):
    """Base class for all package errors."""


class ParseError(GenwaitError):
    """Malformed textual input (cycle notation, builder specs, JSON files)."""


class ValidationError(GenwaitError):
    """Structurally valid input that violates a mathematical precondition,
    e.g. a non-normal kernel, an action that is not by automorphisms, or a
    trivial group passed to a statistics operation."""


class CapExceeded(GenwaitError):
    """A configured resource cap would be exceeded.  Caps abort loudly;
    results are never silently truncated."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class IterationCapExceeded(CapExceeded):
    """A sampling loop ran past its iteration budget (diagnostic, since a
    correct sampler terminates with probability one)."""


class CheckFailed(GenwaitError):
    """An internal cross-check or a verified formula failed to hold."""


class PrecisionExhausted(GenwaitError):
    """A real-number comparison stayed unresolved at the maximum working
    precision.  Exact rational fast paths make this unreachable for the
    quantities the package actually compares; kept as a loud failsafe."""

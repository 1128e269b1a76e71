"""Exception hierarchy.

Two families matter to callers: ValidationError (bad input, CLI exit 2) and
Undetermined (a computation that refused to certify its result, CLI exit 3).
Everything else is an internal error (exit 4).
"""


class GreenlinkerError(Exception):
    """Base class for package errors."""


class ValidationError(GreenlinkerError):
    """Invalid input: malformed polynomial, loop schema, job spec, ..."""


class OverflowDetected(GreenlinkerError):
    """A raw evaluation overflowed double precision.

    Orbit code avoids this by switching to incremental log form; seeing this
    exception means a caller evaluated a polynomial far outside its safe range.
    """


class Undetermined(GreenlinkerError):
    """A result could not be certified at the requested depth/resolution."""


class RootFindingError(Undetermined):
    """Simultaneous root iteration failed to meet the residual target.

    Carries the best iterates found so far in ``best``.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class LoopStraddlesJulia(Undetermined):
    """A loop sample failed to escape: the loop touches or straddles the
    Julia set at the working sampling resolution.  ``t`` is the offending
    loop parameter."""

    def __init__(self, message, t):
        super().__init__(message)
        self.t = t


class StabilizationFailure(Undetermined):
    """Winding stabilization W_{n+1} = d * W_n kept failing after the
    refinement budget was exhausted."""


class PerturbationRequired(Undetermined):
    """A critical value sits on (or within margin of) a loop that is about
    to be lifted; the caller may jitter the loop and retry.  ``critical_value``
    is the offending point."""

    def __init__(self, message, critical_value):
        super().__init__(message)
        self.critical_value = critical_value


class UnsupportedExactMode(ValidationError):
    """Exact linking was requested where only the Monte-Carlo estimate is
    available (rational restriction at infinity)."""

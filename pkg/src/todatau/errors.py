"""Exception types shared across the package."""


class TodaTauError(Exception):
    """Base class for all errors raised by this package."""


class TruncationExhausted(TodaTauError):
    """A result has an empty validity window, or an expansion could not
    terminate inside the configured truncation windows."""


class PreconditionError(TodaTauError):
    """An operation was called on data that violates its contract
    (non-invertible leading term, incompatible variable sets, ...)."""


class DegreeOverflow(TodaTauError):
    """The x-degree of a polynomial exceeded its cap.  Unlike the series
    truncations this is treated as a correctness signal, not a truncation."""


class InternalConsistencyError(TodaTauError):
    """A structural identity that should hold by construction failed
    (e.g. a conjugated Lax operator grew support outside {-1, 0, 1})."""


class IntegrabilityError(TodaTauError):
    """The compatibility residual of the tau-function system is nonzero,
    i.e. the input pair is not a wave pair."""

"""Exception hierarchy shared by every module of the package."""


class FockMajError(Exception):
    """Base class for all errors raised by fockmaj."""


class InvalidParameter(FockMajError, ValueError):
    """A scalar parameter lies outside its admissible range."""


class DegenerateState(FockMajError, ValueError):
    """A state vector has no nonzero amplitude and cannot be normalized."""


class InvalidState(FockMajError, ValueError):
    """A state or amplitude matrix violates its normalization invariant."""


class InvalidDistribution(FockMajError, ValueError):
    """A probability vector has negative entries or does not sum to one."""


class NotCompletelyPositive(FockMajError, ValueError):
    """Channel parameters violate the complete-positivity condition.

    Attributes
    ----------
    deficit : float
        ``|tau - 1| - noise``, the amount of missing noise.
    """

    def __init__(self, message, deficit):
        super().__init__(message)
        self.deficit = deficit


class TruncationError(FockMajError):
    """The requested truncation cannot reach the configured tail tolerance.

    Attributes
    ----------
    required : int or None
        Smallest dimension that would satisfy the tolerance, when known.
    """

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class InconclusiveTruncation(FockMajError):
    """A comparison is meaningless because omitted tail mass exceeds the tolerance."""


class PreconditionViolated(FockMajError, ValueError):
    """An input does not satisfy a documented precondition."""


class ProtocolInconsistent(FockMajError):
    """An LOCC protocol failed its completeness check."""

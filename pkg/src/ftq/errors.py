"""Exception hierarchy shared by all ftq modules.

Two top-level categories matter for the CLI exit codes: bad inputs
(ValidationError, exit 2) and failures that occur while computing
(NumericalError, exit 3).
"""


class ValidationError(ValueError):
    """An input violates a documented precondition or invariant."""


class NumericalError(RuntimeError):
    """A computation failed or produced an inconsistent result."""


class ChannelFileError(ValidationError):
    """Base class for channel-spec file problems."""


class ChannelParseError(ChannelFileError):
    """The channel-spec file is not valid JSON or misses required keys."""


class ChannelDimensionError(ChannelFileError):
    """Kraus operators in the file disagree with the declared dimensions."""


class ChannelCompletenessError(ChannelFileError):
    """The Kraus operators do not sum to the identity within tolerance."""


class SupportError(NumericalError):
    """sigma has a zero eigendirection that overlaps rho beyond tolerance."""


class MonotonicityError(NumericalError):
    """Coherent information increased with noise strength during bisection."""

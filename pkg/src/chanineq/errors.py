"""Exception types raised across the package."""


class ChanineqError(ValueError):
    """Base class for input errors raised by this package."""


class NotHermitian(ChanineqError):
    pass


class DimensionMismatch(ChanineqError):
    pass


class ShapeMismatch(ChanineqError):
    pass


class NotTracePreserving(ChanineqError):
    pass


class NotCP(ChanineqError):
    pass


class BadRank(ChanineqError):
    pass


class BadProbability(ChanineqError):
    pass


class InvalidState(ChanineqError):
    pass


class InvalidEnsemble(ChanineqError):
    pass


class NotIsometry(ChanineqError):
    pass


class RankMismatch(ChanineqError):
    pass


class PureState(ChanineqError):
    """Raised when an equality criterion is asked about a rank-one state."""


class InvalidParams(ChanineqError):
    """Gaussian channel parameters violating shape or the noise inequality."""


class NotOneMode(ChanineqError):
    pass


class SchemaError(ChanineqError):
    """A JSON document does not match its schema.

    ``path`` is a JSON-path-like location such as ``kraus[1]``.
    """

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


class NumericalError(RuntimeError):
    """An iterative routine failed to converge within its limits."""

"""Exception types raised across the package."""


class StreamPlanError(Exception):
    """Base class for every error raised by streamplan."""


class OutOfDomain(StreamPlanError):
    pass


class Masked(StreamPlanError):
    """Query point lies in a land/invalid cell."""


class ParseError(StreamPlanError, ValueError):
    pass


class DimensionMismatch(ParseError):
    pass


class ValidationError(StreamPlanError, ValueError):
    pass


class DegeneratePair(StreamPlanError):
    """P and Q are closer than the arrival threshold."""


class EmptyLine(StreamPlanError):
    pass


class MaskRejectionExhausted(StreamPlanError):
    pass


class NoPath(StreamPlanError):
    pass

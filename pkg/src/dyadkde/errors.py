"""Exception types. Class names are the stable identifiers the CLI prints."""


class DyadKDEError(Exception):
    """Base class for every library-specific error."""


# -- data construction / ingestion ----------------------------------------

class SelfLoop(DyadKDEError):
    pass


class DuplicateEdge(DyadKDEError):
    pass


class VertexOutOfRange(DyadKDEError):
    pass


class NonFiniteInput(DyadKDEError):
    pass


# -- estimation ------------------------------------------------------------

class NonPositiveBandwidth(DyadKDEError):
    pass


class EmptyNetwork(DyadKDEError):
    pass


class SampleTooSmall(DyadKDEError):
    pass


class ZeroSpreadSample(DyadKDEError):
    pass


class IncompleteSampleRequiresIncompletePath(DyadKDEError):
    pass


# -- inference -------------------------------------------------------------

class NonPositiveModifiedVariance(DyadKDEError):
    pass


class BracketFailure(DyadKDEError):
    pass


# Errors caused by malformed user input (CLI exit code 2); everything else
# derived from DyadKDEError is a domain error (CLI exit code 3).
INPUT_ERRORS = (SelfLoop, DuplicateEdge, VertexOutOfRange, NonFiniteInput)

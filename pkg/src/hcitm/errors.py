"""Exception hierarchy shared by all modules."""


class HypergraphError(ValueError):
    """Base class for every error raised by :mod:`hcitm`."""


class EmptyEdge(HypergraphError):
    pass


class DuplicateMember(HypergraphError):
    pass


class ThresholdOutOfRange(HypergraphError):
    pass


class ParseError(HypergraphError):
    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class UnknownNode(HypergraphError, KeyError):
    pass


class UnknownId(HypergraphError, KeyError):
    pass


class SizeMismatch(HypergraphError):
    pass


class EdgeAlreadyActive(HypergraphError):
    pass


class NonConvergence(HypergraphError, RuntimeError):
    pass


class NotAFixedPoint(HypergraphError):
    pass


class NotIncident(HypergraphError):
    pass


class SameNode(HypergraphError):
    pass


class DepthTooLarge(HypergraphError):
    pass


class NoConvergence(HypergraphError, RuntimeError):
    pass


class InvalidProbability(HypergraphError):
    pass


class KTooLarge(HypergraphError):
    pass

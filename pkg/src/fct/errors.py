"""Exception hierarchy.

``DomainRefusal`` subclasses mark inputs outside the range where a closed-form
construction is known; the CLI maps them to exit code 2.
"""


class FctError(Exception):
    """Base class for all package errors."""


# algebra
class MissingAssignment(FctError, KeyError):
    pass


class ZeroPolynomial(FctError, ValueError):
    pass


class PolynomialSyntaxError(FctError, ValueError):
    pass


class UnknownVariable(FctError, KeyError):
    pass


# graph
class SchemaError(FctError, ValueError):
    pass


class DuplicateLabel(SchemaError):
    pass


class DanglingEdge(SchemaError):
    pass


class UnknownNode(FctError, KeyError):
    pass


# dimension
class KeyMismatch(FctError, ValueError):
    pass


class InvalidLabeling(FctError, ValueError):
    pass


# invariants
class BadSize(FctError, ValueError):
    pass


class UnknownVertex(FctError, KeyError):
    pass


class GraphMismatch(FctError, ValueError):
    pass


class DomainRefusal(FctError):
    """The requested construction is not available for this graph."""


class NotTwoFactor(DomainRefusal):
    pass


class OverlapTooLarge(DomainRefusal):
    pass


class OverlapNotTwo(DomainRefusal):
    pass


# oracle
class DiagonalVariable(FctError, ValueError):
    pass


class CapExceeded(FctError):
    pass


class LiftFailed(FctError):
    """Some modular kernel vectors had no small rational preimage."""

    def __init__(self, message, failures=()):
        super().__init__(message)
        self.failures = list(failures)

"""Exception hierarchy.

Two families: ``ValidationError`` for inputs that violate a precondition
(CLI exit code 2) and ``NumericalFailure`` for computations that could not
produce a result (CLI exit code 3).
"""


class QpecError(Exception):
    """Base class of all errors raised by this package."""


class ValidationError(QpecError, ValueError):
    pass


class NumericalFailure(QpecError, RuntimeError):
    pass


class NotPrimePower(ValidationError):
    pass


class DivisionByZero(ValidationError, ZeroDivisionError):
    pass


class EmptySet(ValidationError):
    pass


class ZeroScalar(ValidationError):
    pass


class BadOutputCardinality(ValidationError):
    pass


class BadDistribution(ValidationError):
    pass


class InfeasibleDegreeSequence(ValidationError):
    pass


class EmptyIntersection(NumericalFailure):
    """A decoder message became empty; the transmitted symbol was lost."""


class ComplexityCapExceeded(ValidationError):
    pass


class SingularMatrix(NumericalFailure):
    pass


class Infeasible(NumericalFailure):
    def __init__(self, message, binding_point=None):
        super().__init__(message)
        self.binding_point = binding_point


class Unbounded(NumericalFailure):
    pass


class BracketFailure(NumericalFailure):
    pass


class NoHorizon(NumericalFailure):
    pass

"""Exception types raised across the package."""


class DiracMaxwellError(Exception):
    """Base class for all package errors."""


class NotUnitary(DiracMaxwellError):
    pass


class NotTransverse(DiracMaxwellError):
    """A field frame carries a component along its propagation axis."""


class InvalidSpec(DiracMaxwellError):
    pass


class CflViolation(DiracMaxwellError):
    pass


class NumericalBlowup(DiracMaxwellError):
    pass


class NoEigenvector(DiracMaxwellError):
    """The plane-wave algebraic system has only the trivial solution."""


class InsufficientSamples(DiracMaxwellError):
    pass


class EmptyRegion(DiracMaxwellError):
    pass


class NoConvergence(DiracMaxwellError):
    """Fixed-point solve did not converge; the iteration trace is attached."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace if trace is not None else []

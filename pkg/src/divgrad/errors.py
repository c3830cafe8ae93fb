"""Exception types raised across the package."""


class DivgradError(Exception):
    """Base class for all package errors."""


class DomainError(DivgradError, ValueError):
    """An argument lies outside the domain of a function (e.g. x <= 0)."""


class ShapeError(DivgradError, ValueError):
    """Vector or matrix dimensions do not agree."""


class ParamError(DivgradError, ValueError):
    """A divergence parameter falls inside an exclusion zone."""


class InadmissibleParams(ParamError):
    """Deformed-logarithm parameters violate the admissible ranges."""


class InfeasibleCase(ParamError):
    """The requested sign pattern of (alpha, beta - 1, alpha + beta - 1) cannot occur."""


class LineSearchFailure(DivgradError, RuntimeError):
    """Backtracking exhausted without satisfying the sufficient-decrease test."""


class NonDescent(DivgradError, RuntimeError):
    """A gradient decomposition cannot drive the requested algorithm."""


class BracketError(DivgradError, RuntimeError):
    """No interior minimum was found on the scan bracket."""

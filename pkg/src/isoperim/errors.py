"""Exception types shared across the package."""


class IsoperimError(Exception):
    """Base class for all package errors."""


class ChartDomainError(IsoperimError, ValueError):
    """A chart point lies outside the coordinate rectangle."""


class UnsupportedDimensionError(IsoperimError, ValueError):
    """Operation not available in this ambient dimension."""


class MissingEmbeddingError(IsoperimError, ValueError):
    """Operation requires an isometric embedding but none is configured."""


class InvalidDomainError(IsoperimError, ValueError):
    """Domain region or boundary parametrization is unusable."""


class InvalidMeshError(IsoperimError, ValueError):
    """Mesh violates a structural invariant (degenerate element, bad index)."""


class InvalidFieldError(IsoperimError, ValueError):
    """Vector field is not usable here (e.g. not tangent in embedded mode)."""


class InvalidScaleError(IsoperimError, ValueError):
    """Varifold scaling factor must be nonnegative."""


class NumericError(IsoperimError, ArithmeticError):
    """A numeric routine produced a non-finite or unusable result."""


class ContainmentError(IsoperimError, ValueError):
    """Surface is not contained in the required domain."""


class TopologyError(IsoperimError, RuntimeError):
    """Flow produced a self-intersecting or otherwise broken curve."""


class OffsetTooLargeError(IsoperimError, ValueError):
    """Tube offset makes the offset curves non-simple."""


class PreconditionError(IsoperimError, ValueError):
    """A documented operation precondition does not hold."""


class FlowInconclusiveError(IsoperimError, RuntimeError):
    """Flow stalled without meeting the convergence criteria."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class InsufficientDataError(IsoperimError, ValueError):
    """Not enough refinement levels (or samples) for the requested table."""


class ConfigError(IsoperimError, ValueError):
    """Scenario configuration failed to parse or validate."""

    def __init__(self, message, kind="validation"):
        super().__init__(message)
        self.kind = kind  # "parse" or "validation"

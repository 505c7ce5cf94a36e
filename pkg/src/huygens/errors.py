"""Exception hierarchy shared by the whole package."""


class HuygensError(Exception):
    """Base class for every error raised by this package."""


class ModeMismatchError(HuygensError, TypeError):
    """Exact and floating coefficients were combined in one operation."""


class InvalidKDataError(HuygensError, ValueError):
    """The integer sequence or phase list violates a structural invariant."""


class DegenerateWronskianError(HuygensError, ArithmeticError):
    """The full Wronskian of the basis functions vanishes identically."""


class DivisionByZeroFunctionError(HuygensError, ZeroDivisionError):
    """Division by a trigonometric polynomial that is identically zero."""


class NearSingularEvaluation(HuygensError, ArithmeticError):
    """A denominator is too close to zero at the requested point.

    ``magnitude`` is the offending denominator value relative to its
    coefficient norm; ``distance`` (when known) is the angular distance in
    radians to the nearest located zero.
    """

    def __init__(self, message, magnitude=None, distance=None):
        super().__init__(message)
        self.magnitude = magnitude
        self.distance = distance


class OriginError(HuygensError, ValueError):
    """A point at the origin was passed where polar coordinates are needed."""


class NonPositiveTimeError(HuygensError, ValueError):
    pass


class SingularRayError(HuygensError, ValueError):
    """The segment from xi to x passes too close to a singular line."""


class QuadratureFailure(HuygensError, ArithmeticError):
    pass

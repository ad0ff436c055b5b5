class RegionViolationError(ValueError):
    """Raised when an overlap point (gamma, delta, epsilon) lies outside the admissible region."""


class SizeCapExceededError(ValueError):
    """Raised when an exact computation is requested beyond its enumeration cap."""


class QuadratureError(RuntimeError):
    """Raised when adaptive quadrature cannot reach the requested tolerance."""

    def __init__(self, message: str, abs_error: float):
        super().__init__(f"{message} (achieved error estimate {abs_error:.3e})")
        self.abs_error = abs_error

"""Exception hierarchy shared by every fracgreen module."""


class FracGreenError(Exception):
    """Base class for all library errors."""


class GammaPoleError(FracGreenError, ValueError):
    def __init__(self, z):
        super().__init__(f"gamma pole at z={z}")
        self.z = z


class GammaOverflowError(FracGreenError, OverflowError):
    """Gamma value too large for a double; ``log_value`` carries log Gamma(z)."""

    def __init__(self, z, log_value):
        super().__init__(f"gamma overflow at z={z} (log gamma = {log_value})")
        self.z = z
        self.log_value = log_value


class HParamsError(FracGreenError, ValueError):
    pass


class SeriesConditionError(FracGreenError, ValueError):
    pass


class SeriesConvergenceError(FracGreenError, ArithmeticError):
    """Raised when a series hits its term cap; ``partial`` holds the partial sum."""

    def __init__(self, message, partial, terms_used):
        super().__init__(message)
        self.partial = partial
        self.terms_used = terms_used


class AsymptoticInapplicableError(FracGreenError, ValueError):
    pass


class NoEvaluationMethodError(FracGreenError, ValueError):
    pass


class ParameterError(FracGreenError, ValueError):
    pass


class CausalityError(FracGreenError, ValueError):
    pass


class SingularPointError(FracGreenError, ValueError):
    pass


class QuadratureError(FracGreenError, ArithmeticError):
    """Quadrature did not reach tolerance; ``estimate`` is the best value found."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class MellinStripError(FracGreenError, ValueError):
    pass


class FarFieldError(FracGreenError, ValueError):
    pass


class GridError(FracGreenError, ValueError):
    pass

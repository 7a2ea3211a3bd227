"""Exception and warning types shared across the package."""


class ValidationError(ValueError):
    """Invalid configuration or input (CLI exit code 1)."""


class NotAMemberError(ValidationError):
    """Signal lies outside the class an operation requires."""


class DivergenceError(ArithmeticError):
    """A weighted integral or tail estimate failed to converge (CLI exit code 2)."""


class NonConvergenceError(DivergenceError):
    """Truncated pairing integral did not settle within tolerance."""


class SpectralLeakageWarning(RuntimeWarning):
    """Transfer function is not negligible at the synthesis band edge."""


class SaturationWarning(RuntimeWarning):
    """An exponent was clamped to avoid floating-point overflow."""

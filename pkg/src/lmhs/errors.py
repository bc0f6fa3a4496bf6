"""Exception types shared across the package."""


class LmhsError(Exception):
    """Base class for all errors raised by this package."""


# exact linear algebra
class NotUnipotent(LmhsError):
    pass


class NotNilpotent(LmhsError):
    pass


class DimensionMismatch(LmhsError):
    pass


class ZetaProductError(LmhsError):
    """Two transcendental entries were multiplied (the coefficient ring forbids it)."""


# geometry
class NotCalabiYau(LmhsError):
    pass


class UnknownGeometry(LmhsError):
    pass


class ConstraintViolated(LmhsError):
    def __init__(self, failures):
        self.failures = list(failures)
        super().__init__("; ".join(self.failures))


# numerics
class DomainError(LmhsError, ValueError):
    pass


class NoConvergence(LmhsError):
    pass


class DivergenceDetected(LmhsError):
    pass


class ToleranceExceeded(LmhsError):
    def __init__(self, message, residuals=None):
        self.residuals = dict(residuals or {})
        super().__init__(message)


class InsufficientPrecision(LmhsError):
    pass


class NoMatch(LmhsError):
    pass


class IllConditioned(LmhsError):
    pass


class NormalizationFailed(LmhsError):
    pass


class ConfigError(LmhsError):
    pass

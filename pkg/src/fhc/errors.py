"""Exception types shared across the package."""


class FHCError(Exception):
    """Base class for all package errors."""


class InvalidParameter(FHCError, ValueError):
    pass


class DegenerateDenominator(FHCError, ZeroDivisionError):
    pass


class NonConvergence(FHCError, RuntimeError):
    pass


class NoPositiveResolventRoot(FHCError, RuntimeError):
    pass


class SpectralError(FHCError, RuntimeError):
    pass


class SizeGuardExceeded(FHCError, RuntimeError):
    pass

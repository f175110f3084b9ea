class GpxError(Exception):
    exit_code = 3


class InvalidInput(GpxError, ValueError):
    exit_code = 2


class DomainError(GpxError, ValueError):
    exit_code = 2


class TruncationError(GpxError):
    """Profile does not settle to its asymptotes within the grid."""


class UnboundedDip(GpxError):
    pass


class BranchError(GpxError):
    pass


class IntegratorError(GpxError):
    pass


class RegimeError(GpxError):
    pass


class SingularCoefficients(GpxError):
    pass


class QuadratureError(GpxError):
    pass


class UnsupportedProfile(GpxError):
    exit_code = 2

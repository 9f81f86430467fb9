class DomainError(Exception):
    """Base class for domain exceptions."""

    pass


class ValidationError(DomainError):
    """Raised when an experiment configuration or solver input is invalid."""

    pass


class SolverError(DomainError):
    """Raised when a numerical computation cannot be completed."""

    pass


class RankDeficiencyError(SolverError):
    """Raised when a basis is numerically rank-deficient."""

    pass


class SingularSystemError(SolverError):
    """Raised when a triangular or small dense system is numerically singular.

    ``iteration`` is set when the failure happens inside an iterative solve.
    """

    def __init__(self, message: str, iteration: int | None = None):
        super().__init__(message)
        self.iteration = iteration


class ZeroStartError(SolverError):
    """Raised when the Arnoldi start vector vanishes."""

    pass


class BreakdownError(SolverError):
    """Raised when a flexible cycle exhausts its space before the Krylov steps finish."""

    pass

"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the requested operation."""


class ConvergenceError(RuntimeError):
    """An iterative routine hit its evaluation cap without converging."""

"""Exception types shared across the package."""


class KerrChainError(Exception):
    """Base class for all package errors."""


class DomainError(KerrChainError, ValueError):
    """Parameters outside the region where a formula or model is defined."""


class ConvergenceError(KerrChainError, RuntimeError):
    """An iterative procedure (bisection, eigensolver, truncation) did not converge."""


class CapacityError(KerrChainError, MemoryError):
    """A truncated Fock space would exceed the configured memory budget."""


class GaugeError(KerrChainError, RuntimeError):
    """Neighbouring eigenvectors overlap too weakly to be phase-aligned."""


class DegenerateInputWarning(UserWarning):
    """Input sits on a trivial point where a correction vanishes identically."""

"""Exception types shared across the package."""


class PauliPropError(Exception):
    """Base class for all package errors."""


class ValidationError(PauliPropError, ValueError):
    """Bad input: malformed files, mismatched sizes, violated preconditions."""


class TermExplosionError(PauliPropError, RuntimeError):
    """Propagation exceeded the configured term-count safety cap."""


class ConvergenceError(PauliPropError, RuntimeError):
    """An iterative numeric routine failed to converge."""

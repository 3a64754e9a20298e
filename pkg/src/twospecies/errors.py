"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class ConfigurationError(ValueError):
    """Inconsistent grid, step, or experiment parameters."""


class DegenerateInputError(ValueError):
    """Initial data the model is not defined for (e.g. no species-2 mass)."""


class DegenerateKernelError(DegenerateInputError):
    """The renewal kernel puts (almost) all of its mass at the origin."""


class HorizonError(RuntimeError):
    """A time lies at or beyond the point where species 2 is exhausted."""

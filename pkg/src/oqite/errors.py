"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Malformed or schema-violating experiment configuration."""


class StepSizeError(RuntimeError):
    """A time step too large for the first-order update to stay valid.

    Raised when the norm constant of an imaginary-time step collapses or
    when an ansatz weight would turn negative beyond tolerance.
    """


class DegenerateTraceError(RuntimeError):
    """The trace surrogate of a vectorized state fell below threshold."""

from __future__ import annotations


class DimensionError(ValueError):
    """Shape mismatch, bad qubit index, or a Hilbert space above the dense budget."""


class CodeSpaceError(ValueError):
    """A state that should lie in the code space does not."""


class ConfigError(ValueError):
    """Invalid experiment configuration (CLI exit code 2)."""


class ScheduleOverflowError(ConfigError):
    """The circuit is too deep for the working period at the requested pulse width."""


class NumericalError(RuntimeError):
    """A numerical routine failed or left its tolerance envelope (CLI exit code 3)."""

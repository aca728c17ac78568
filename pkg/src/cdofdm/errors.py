"""Exception types shared across the simulator.

The CLI maps ConfigError to exit code 2 and GuardError subclasses to exit code 3.
"""


class ConfigError(ValueError):
    """Invalid or inconsistent configuration (unknown key, bad value, guard violation)."""


class GuardError(RuntimeError):
    """Numerical guard tripped during a run."""


class EqualizationSingularityError(GuardError):
    """Zero-forcing equalizer hit a deep fade; the affected trial must be erased, not clamped."""


class ZeroReferenceError(GuardError):
    """Radar reference division hit a (near-)zero transmit entry."""


class ErasureBudgetError(GuardError):
    """Too many trials erased by numerical guards for the result to be meaningful."""

"""Exception types raised by the library.

All of them derive from :class:`WqedError` so callers (and the CLI) can catch
the whole family at once.
"""


class WqedError(Exception):
    """Base class for library errors."""


class PoleError(WqedError, ZeroDivisionError):
    """A closed-form denominator is exactly zero."""


class FanoPoleError(PoleError):
    """The Fano parameters q and epsilon are undefined at this detuning."""


class UndefinedCorrelation(WqedError):
    """The independent-transport density vanishes, so eta is undefined."""


class NoMinimumInRange(WqedError):
    """The optimum search found its minimum on the boundary of the range."""


class RegionError(WqedError, ValueError):
    """Coordinates are not in the region required by the operation."""


class DimensionError(WqedError, MemoryError):
    """A lattice sector is larger than the configured memory budget."""


class ConvergenceError(WqedError, ArithmeticError):
    """A propagator step could not meet its error tolerance."""


class SignalTooSmall(WqedError):
    """The transmitted probability is too small for a reliable estimate."""


class ConfigError(WqedError, ValueError):
    """Invalid configuration, scan specification or command-line value."""

"""Exception hierarchy shared by the whole toolkit.

The CLI maps these onto process exit codes:
argument/config problems -> 2, I/O -> 3, numerical/contract -> 4.
"""


class CloseMicError(Exception):
    """Base class for all toolkit errors."""


class ArgumentError(CloseMicError, ValueError):
    """Invalid argument value or shape."""


class ConfigError(ArgumentError):
    """Malformed or inconsistent configuration file."""


class SingularityError(ArgumentError):
    """Geometry too close to the inverse-distance singularity."""


class CalibrationError(CloseMicError):
    """Level calibration is impossible (e.g. zero-energy source)."""


class ContractError(CloseMicError):
    """A caller violated an operation's contract."""


class UndefinedSirError(ContractError):
    """SIR is undefined for the given magnitude pair."""

"""Exception hierarchy shared by every module."""


class SpineBalanceError(Exception):
    """Base class for all package errors."""


class DomainError(SpineBalanceError, ValueError):
    """Non-finite or otherwise invalid numeric input."""


class FlexionRangeError(DomainError):
    """Flexion angle outside [-pi/2, pi/2]."""


class DegenerateSupportError(SpineBalanceError, ValueError):
    """The two stance footholds coincide, so no support line exists."""


class NoRootError(SpineBalanceError):
    """The balance distance does not change sign over the search range."""

    def __init__(self, message, lo=None, hi=None, dis_lo=None, dis_hi=None):
        super().__init__(message)
        self.lo = lo
        self.hi = hi
        self.dis_lo = dis_lo
        self.dis_hi = dis_hi


class ControllerParameterError(SpineBalanceError, ValueError):
    """Invalid spine controller parameters (e.g. balance target above amplitude)."""


class SteppingError(SpineBalanceError, ValueError):
    """Controller stepped off its time grid."""


class TraceFormatError(SpineBalanceError, ValueError):
    """Malformed trace file or sidecar."""

    def __init__(self, message, path=None, line=None):
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
        self.path = path
        self.line = line


class ConfigError(SpineBalanceError, ValueError):
    """Invalid experiment configuration."""


class TraceIOError(SpineBalanceError, OSError):
    """Reading or writing a trace file failed; the message names the path."""

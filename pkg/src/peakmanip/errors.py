"""Exception hierarchy shared by every module.

Each class carries the process exit code the command line front end uses.
"""


class ManipError(Exception):
    exit_code = 1


class ConfigurationError(ManipError, ValueError):
    """Invalid parameters or configuration."""

    exit_code = 2


class CapabilityError(ManipError):
    """The instance is too large for an exhaustive routine."""

    exit_code = 3


class DataError(ManipError, ValueError):
    """Input data is inconsistent (e.g. a partition that misses nodes)."""

    exit_code = 4


class ParseError(DataError):
    def __init__(self, message, path=None, lineno=None):
        self.path = path
        self.lineno = lineno
        where = ""
        if path is not None:
            where = f"{path}:"
        if lineno is not None:
            where += f"{lineno}:"
        super().__init__(f"{where} {message}" if where else message)

"""Exception types shared across mdtune."""


class MdtuneError(Exception):
    """Base class for all mdtune errors."""


class InvalidConfigError(MdtuneError):
    """A launch configuration or plan violates a hardware or engine constraint."""


class MissingDatumError(MdtuneError):
    """An economics calculation needs a price or power figure that was not declared.

    Hardware prices and idle powers are optional in the catalog; operations
    that need them fail loudly instead of assuming a default.
    """


class LogParseError(MdtuneError):
    """A recognized log line or block is present but malformed.

    Carries the byte offset of the offending text when known.
    """

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class ManifestError(MdtuneError):
    """A run manifest failed validation; the message names the field path."""

    def __init__(self, message, path=""):
        if path:
            message = f"{path}: {message}"
        super().__init__(message)
        self.path = path


class ExecutorError(MdtuneError):
    """The executor backing a sweep is unavailable or misconfigured."""


class RunFailure(MdtuneError):
    """A single benchmark run failed; sweeps record this and continue."""

"""Exception hierarchy shared across the package."""


class ResnapError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(ResnapError):
    """Input bytes are not well formed (broken XML, undecodable text)."""


class ValidationError(ResnapError):
    """Input is structurally readable but violates a data contract."""


class EmptyLogError(ResnapError):
    """The source contains no events at all."""


class ConfigError(ResnapError):
    """A configuration value is missing, unknown, or inconsistent."""


class CellTimeoutError(ResnapError):
    """A single experiment cell exceeded its wall-time budget."""

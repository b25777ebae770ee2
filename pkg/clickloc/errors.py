"""Exception hierarchy for clickloc."""


class ClickLocError(Exception):
    """Base class for all clickloc errors."""


class ConfigError(ClickLocError, ValueError):
    """Invalid parameter or configuration value."""

    def __init__(self, field: str, message: str) -> None:
        self.field = field
        super().__init__(f"{field}: {message}")


class ShapeError(ClickLocError, ValueError):
    """Dimension or length mismatch, or empty input."""


class NumericError(ClickLocError, ArithmeticError):
    """A factorization failed where none was expected."""


class DataFormatError(ClickLocError):
    """File content does not match the declared format."""


class ParseError(DataFormatError):
    """Malformed record in a text input."""

    def __init__(self, record_index: int, message: str) -> None:
        self.record_index = record_index
        super().__init__(f"record {record_index}: {message}")


class FormatError(DataFormatError):
    """Wrong magic, version or truncated binary artifact."""

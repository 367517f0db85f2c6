class DataError(Exception):
    """Bad or unusable input data (CLI exit code 2)."""


class ParseError(DataError):
    pass


class FormatError(DataError):
    """A binary file has the wrong magic, version or layout."""


class CapabilityError(RuntimeError):
    """The request exceeds what this implementation supports at desk scale."""


class NumericalError(RuntimeError):
    """A training objective became non-finite (CLI exit code 3)."""

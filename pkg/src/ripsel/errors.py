"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class RipselError(Exception):
    exit_code = 1


class ConfigurationError(RipselError, ValueError):
    exit_code = 1


class DataError(RipselError, ValueError):
    exit_code = 2


class ParseError(DataError):
    def __init__(self, message, row=None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row


class SchemaError(DataError):
    pass


class NumericalError(RipselError, ArithmeticError):
    exit_code = 3

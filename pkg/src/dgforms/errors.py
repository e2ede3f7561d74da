"""Exception hierarchy.

Each class carries the process exit code the command line front end uses
when the error escapes a subcommand.
"""


class DGFormsError(Exception):
    exit_code = 1


class ParseError(DGFormsError, ValueError):
    """Malformed textual input; ``position`` is a 0-based character offset."""

    exit_code = 2

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class PreconditionError(DGFormsError, ValueError):
    """A mathematical precondition was violated (zero divisor, bad length, ...)."""

    exit_code = 3


class ZeroDivisorError(PreconditionError, ZeroDivisionError):
    def __init__(self, message="zero divisor"):
        super().__init__(message)


class PrecisionError(DGFormsError, ArithmeticError):
    """A coefficient was requested that the available precision cannot certify."""

    exit_code = 4

    def __init__(self, message="insufficient precision"):
        super().__init__(message)


class VerificationError(DGFormsError, AssertionError):
    """An identity that must hold by theory failed on concrete data."""

    exit_code = 1

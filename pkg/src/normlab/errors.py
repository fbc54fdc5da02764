"""Exceptions shared across the package.

The command line maps these onto exit codes: configuration and parse
problems exit 2, resource-budget refusals exit 3, failed experiment
checks exit 1.
"""


class NormlabError(Exception):
    """Base class for all package errors."""


class SpecError(NormlabError):
    """A real-number spec is malformed or unsupported for the request."""


class InsufficientPrecisionError(NormlabError):
    """A digit source ran out of digits before the request was satisfied."""


class TieUnresolvableError(NormlabError):
    """An exact comparison could not be settled within the refinement cap.

    Raised instead of guessing when a near-test or digit extraction sits
    on a decision boundary that available precision cannot separate.
    """


class BudgetExceededError(NormlabError):
    """An enumeration or search would exceed its configured budget."""


class MachineParseError(NormlabError):
    """A transducer or martingale text file failed to parse."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class ConfigError(NormlabError):
    """An experiment config file failed to parse or validate."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class CodecInvalidError(NormlabError):
    """A codec failed its decode(encode(w)) == w obligation."""


class InvariantError(NormlabError):
    """A structural invariant of a user-supplied object does not hold."""


class CheckFailure(NormlabError):
    """An experiment check did not hold."""

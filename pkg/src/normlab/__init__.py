"""Exact digit streams, finite-state complexity, and normality experiments.

The package turns finite-state normality machinery into something that
runs at desk scale: exact digit streams for a catalog of computable
reals, block-frequency statistics, transducer output complexity,
finite-state betting martingales, representation-system complexities by
bounded brute force, compressor-based dimension estimates, and the
experiment drivers plus command line that tie them together.
"""

__version__ = "0.1.0"

from .errors import (
    BudgetExceededError,
    CheckFailure,
    CodecInvalidError,
    ConfigError,
    InsufficientPrecisionError,
    InvariantError,
    MachineParseError,
    NormlabError,
    SpecError,
    TieUnresolvableError,
)
from .numstream import (
    Champernowne,
    Complement,
    DigitFile,
    DigitPrefix,
    Interleave,
    Pseudorandom,
    Rational,
    RealSpec,
    Scale,
    SquareRoot,
    append_digit_cache,
    complement,
    digits,
    digits_to_int,
    int_to_digits,
    interleave_split,
    near_tester,
    parse_spec,
    prefix_value,
    read_digit_cache,
    scale,
    spec_to_str,
    within,
    write_digit_cache,
)

__all__ = [
    "__version__",
    "BudgetExceededError",
    "CheckFailure",
    "CodecInvalidError",
    "ConfigError",
    "InsufficientPrecisionError",
    "InvariantError",
    "MachineParseError",
    "NormlabError",
    "SpecError",
    "TieUnresolvableError",
    "Champernowne",
    "Complement",
    "DigitFile",
    "DigitPrefix",
    "Interleave",
    "Pseudorandom",
    "Rational",
    "RealSpec",
    "Scale",
    "SquareRoot",
    "append_digit_cache",
    "complement",
    "digits",
    "digits_to_int",
    "int_to_digits",
    "interleave_split",
    "near_tester",
    "parse_spec",
    "prefix_value",
    "read_digit_cache",
    "scale",
    "spec_to_str",
    "within",
    "write_digit_cache",
]

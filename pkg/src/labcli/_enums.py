"""Various enums used throughout the command line front end."""

from __future__ import annotations

from enum import Enum
from typing import TypeVar


class Verb(Enum):
    """The commands understood by the front end."""

    SPECTRUM = "spectrum"
    MEASURE = "measure"
    PERTURB = "perturb"
    EXTREMALITY = "extremality"
    DEFECT = "defect"
    NEVANLINNA = "nevanlinna"
    WEYL = "weyl"
    ASYMPTOTICS = "asymptotics"
    KV_CHECK = "kv-check"
    VERIFY = "verify"


class OutputFormat(Enum):
    """File format of a result artifact."""

    JSON = "json"
    CSV = "csv"


class Suite(Enum):
    """Invariant suites run by the verify verb."""

    MEASURES = "measures"
    JACOBI = "jacobi"
    DEBRANGES = "debranges"
    STURM = "sturm"
    BESSEL = "bessel"
    ALL = "all"


class ProblemKind(Enum):
    """The operator family a problem file describes."""

    JACOBI = "jacobi"
    STURM = "sturm"
    BESSEL = "bessel"


T = TypeVar("T", bound=Enum)
U = TypeVar("U", str, int, float)


def get_enum_member(enum_type: type[T], value: U | None) -> T:
    """
    Get the enum member for a given value.

    Args:
        enum_type (Type[T]): The enum type.
        value (U | None): The value to get the enum member for.

    Raises:
        ValueError: If the value is not a valid member of the enum.

    Returns:
        T: The enum member.
    """

    for member in enum_type:
        if member.value == value:
            return member
    error_msg = f"Value '{value}' is not a valid member of {enum_type.__name__}"
    raise ValueError(error_msg)

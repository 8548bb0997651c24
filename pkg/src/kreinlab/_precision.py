"""Working-precision helpers built on mpmath."""

from __future__ import annotations

from typing import ContextManager, Final

import mpmath
from mpmath import mp

from ._errors import DomainError

DEFAULT_PRECISION: Final[int] = 53
HIGH_PRECISION: Final[int] = 200


def check_precision(bits: int) -> int:
    """
    Validate a mantissa size in bits.

    Args:
        bits (int): The requested mantissa size.

    Raises:
        DomainError: If fewer than 53 bits are requested.

    Returns:
        int: The validated mantissa size.
    """

    if bits < DEFAULT_PRECISION:
        error_msg = f"precision must be at least {DEFAULT_PRECISION} bits, got {bits}"
        raise DomainError(error_msg)
    return bits


def workprec(bits: int) -> ContextManager[None]:
    """Return a context manager running mpmath at `bits` of mantissa."""

    return mp.workprec(check_precision(bits))  # pyright: ignore[reportUnknownMemberType]


def is_finite(value: mpmath.mpf | mpmath.mpc) -> bool:
    """Tell whether an mpmath value is finite (neither inf nor nan)."""

    return bool(mpmath.isfinite(mpmath.re(value)) and mpmath.isfinite(mpmath.im(value)))

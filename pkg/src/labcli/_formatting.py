"""Functions for formatting numbers and tables into strings."""

from __future__ import annotations

from typing import TYPE_CHECKING, Final

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

_NO_VALUE: Final[str] = "N/A"


def as_number(value: float | None) -> str:
    """
    Return the value with enough digits to round-trip through a float.

    Args:
        value (float | None): The value to be formatted.

    Returns:
        str: The shortest "%.17g" style representation. If the value is None, returns
            a placeholder string.
    """

    if value is None:
        return _NO_VALUE
    return f"{value:.17g}"


def as_complex(value: complex | None) -> list[float] | None:
    """Return a complex value as its JSON pair [re, im]."""

    if value is None:
        return None
    return [value.real, value.imag]


def as_error(value: float | None) -> str:
    """
    Return a measured error in compact scientific notation.

    Examples:
        0.000123 would be represented as "1.23e-04".
    """

    if value is None:
        return _NO_VALUE
    return f"{value:.2e}"


def as_csv(header: Sequence[str], rows: Iterable[Sequence[float | int]]) -> str:
    """
    Return rows of numbers as CSV text with a header line.

    Integers are written as such, floats with 17 significant digits.
    """

    lines: list[str] = [",".join(header)]
    lines.extend(
        ",".join(str(v) if isinstance(v, int) else as_number(v) for v in row)
        for row in rows
    )
    return "\n".join(lines) + "\n"


def as_table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    """Return a plain text table with left-aligned, space-padded columns."""

    widths: list[int] = [
        max(len(cell) for cell in column) for column in zip(header, *rows)
    ]
    lines: list[str] = [
        "  ".join(cell.ljust(width) for cell, width in zip(line, widths)).rstrip()
        for line in [header, *rows]
    ]
    return "\n".join(lines) + "\n"

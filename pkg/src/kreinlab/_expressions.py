"""
Parse the small expression language of problem files.

Jacobi coefficients are expressions in `k`, potentials and profiles are expressions in
`x` or piecewise-linear tables. Expressions go through sympy and are lambdified to
mpmath (sequences) or numpy (profiles).
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Any, Callable, Final, Union

import mpmath
import numpy as np
import sympy
from sympy.parsing.sympy_parser import (
    convert_xor,
    parse_expr,
    standard_transformations,
)

from ._errors import DomainError

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

_TRANSFORMATIONS: Final = (*standard_transformations, convert_xor)

_ALLOWED_FUNCTIONS: Final[dict[str, Any]] = {
    "exp": sympy.exp,
    "pow": sympy.Pow,
    "sqrt": sympy.sqrt,
    "sin": sympy.sin,
    "cos": sympy.cos,
    "log": sympy.log,
    "pi": sympy.pi,
}


class ExpressionError(DomainError):
    """An expression could not be parsed."""

    def __init__(self, text: str, reason: str) -> None:
        """
        Initialize the exception.

        Args:
            text: The offending expression.
            reason: Why it was rejected.
        """

        super().__init__(f"invalid expression '{text}': {reason}")


def parse(text: str, variable: str) -> sympy.Expr:
    """
    Parse `text` as an arithmetic expression in a single variable.

    Args:
        text (str): The expression, e.g. "2^k" or "sin(x)".
        variable (str): The only free symbol allowed.

    Raises:
        ExpressionError: If the text does not parse or uses other symbols.

    Returns:
        sympy.Expr: The parsed expression.
    """

    symbol: sympy.Symbol = sympy.Symbol(variable)
    local_dict: dict[str, Any] = {variable: symbol, **_ALLOWED_FUNCTIONS}
    try:
        expr: Any = parse_expr(
            text,
            local_dict=local_dict,
            global_dict={"__builtins__": {}, **vars(sympy)},
            transformations=_TRANSFORMATIONS,
        )
    except (SyntaxError, TypeError, NameError, sympy.SympifyError) as e:
        raise ExpressionError(text, str(e)) from e

    if not isinstance(expr, sympy.Expr):
        raise ExpressionError(text, "not an arithmetic expression")
    extra: set[sympy.Basic] = expr.free_symbols - {symbol}
    if extra:
        raise ExpressionError(
            text, f"unknown symbols {sorted(str(s) for s in extra)}"
        )
    return expr


def sequence(text: str) -> Callable[[int], mpmath.mpf]:
    """
    Compile an expression in `k` into a sequence generator evaluated by mpmath.

    Args:
        text (str): The expression in `k`.

    Returns:
        Callable[[int], mpmath.mpf]: k ↦ value at the current mpmath precision.
    """

    expr: sympy.Expr = parse(text, "k")
    func: Callable[..., Any] = sympy.lambdify(sympy.Symbol("k"), expr, "mpmath")

    def generator(k: int) -> mpmath.mpf:
        return mpmath.mpf(func(mpmath.mpf(k)))

    return generator


class Profile:
    """
    A real function on an interval, given as an expression in `x` or as a table.

    Tables are interpolated linearly between their nodes and held constant beyond.
    """

    def __init__(
        self,
        func: Callable[[NDArray[np.float64]], NDArray[np.float64]],
        *,
        text: str,
        constant: float | None = None,
        breakpoints: tuple[float, ...] = (),
        config: dict[str, Any] | None = None,
    ) -> None:
        """
        Initialize the profile. Use `from_config`, `from_expr` or `from_table`.

        Args:
            func: Vectorized evaluator.
            text: Human readable description, used in reports.
            constant: The value when the profile is constant, else None.
            breakpoints: Points where the profile may have a kink.
            config: The problem-file form, defaults to `{"expr": text}`.
        """

        self._func = func
        self._text: str = text
        self._constant: float | None = constant
        self._breakpoints: tuple[float, ...] = breakpoints
        self._config: dict[str, Any] = config if config is not None else {"expr": text}

    @classmethod
    def from_expr(cls, text: str) -> Profile:
        """Build a profile from an expression in `x`."""

        expr: sympy.Expr = parse(text, "x")
        if not expr.free_symbols:
            value: float = float(expr)  # pyright: ignore[reportArgumentType]
            return cls.constant_profile(value, text=text)
        func: Callable[..., Any] = sympy.lambdify(sympy.Symbol("x"), expr, "numpy")

        def evaluate(x: NDArray[np.float64]) -> NDArray[np.float64]:
            return np.asarray(func(x), dtype=np.float64)

        return cls(evaluate, text=text)

    @classmethod
    def from_table(cls, table: list[list[float]]) -> Profile:
        """
        Build a piecewise-linear profile from `[[x, v], ...]` rows.

        Raises:
            ExpressionError: If the table is empty or its nodes are not increasing.
        """

        nodes: NDArray[np.float64] = np.array([row[0] for row in table], dtype=float)
        values: NDArray[np.float64] = np.array([row[1] for row in table], dtype=float)
        if nodes.size == 0 or np.any(np.diff(nodes) <= 0):
            raise ExpressionError(str(table), "table nodes must be strictly increasing")

        def evaluate(x: NDArray[np.float64]) -> NDArray[np.float64]:
            return np.interp(x, nodes, values)

        constant: float | None = (
            float(values[0]) if np.all(values == values[0]) else None
        )
        return cls(
            evaluate,
            text=f"table[{nodes.size}]",
            constant=constant,
            breakpoints=tuple(float(n) for n in nodes),
            config={"table": [[float(r[0]), float(r[1])] for r in table]},
        )

    @classmethod
    def constant_profile(cls, value: float, *, text: str | None = None) -> Profile:
        """Build the constant profile x ↦ value."""

        def evaluate(x: NDArray[np.float64]) -> NDArray[np.float64]:
            return np.full(np.shape(x), value, dtype=np.float64)

        return cls(
            evaluate,
            text=text if text is not None else repr(value),
            constant=value,
        )

    @classmethod
    def from_config(cls, config: ProfileConfig | None) -> Profile:
        """
        Build a profile from its problem-file form.

        Args:
            config: `{"expr": str}`, `{"table": [[x, v], ...]}`, a number, or None
                for the zero profile.

        Raises:
            ExpressionError: If the configuration has neither key.

        Returns:
            Profile: The profile.
        """

        if config is None:
            return cls.constant_profile(0.0)
        if isinstance(config, (int, float)):
            return cls.constant_profile(float(config))
        if isinstance(config, str):
            return cls.from_expr(config)
        if "expr" in config:
            return cls.from_expr(str(config["expr"]))
        if "table" in config:
            return cls.from_table(config["table"])  # pyright: ignore[reportArgumentType]
        raise ExpressionError(str(config), "expected an 'expr' or a 'table' key")

    @property
    def text(self) -> str:
        """Human readable description."""

        return self._text

    @property
    def constant(self) -> float | None:
        """The constant value, or None when the profile varies."""

        return self._constant

    @property
    def breakpoints(self) -> tuple[float, ...]:
        """Points where the profile may fail to be smooth."""

        return self._breakpoints

    def __call__(self, x: ArrayLike) -> NDArray[np.float64]:
        return self._func(np.asarray(x, dtype=np.float64))

    def save_config(self) -> dict[str, Any]:
        """Return the problem-file form of the profile."""

        return dict(self._config)


ProfileConfig = Union[dict[str, Any], str, float, int]

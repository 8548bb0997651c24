"""Sign-change scanning and bracket refinement for real spectral functions."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Callable, Final

import numpy as np
from scipy.optimize import brentq  # pyright: ignore[reportUnknownVariableType]

from ._errors import BracketCountError

if TYPE_CHECKING:
    from numpy.typing import NDArray

VectorFunction = Callable[["NDArray[np.float64]"], "NDArray[np.float64]"]
GridMap = Callable[["NDArray[np.float64]"], "NDArray[np.float64]"]

INITIAL_POINTS: Final[int] = 512
MAX_POINTS: Final[int] = 1 << 20
REFINE_RTOL: Final[float] = 1e-12
REFINE_XTOL: Final[float] = 1e-15


def _linear(lo: float, hi: float) -> GridMap:
    def grid(s: NDArray[np.float64]) -> NDArray[np.float64]:
        return lo + (hi - lo) * s

    return grid


def _brackets(
    x: NDArray[np.float64], values: NDArray[np.float64]
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    positive: NDArray[np.bool_] = values >= 0
    change: NDArray[np.intp] = np.nonzero(positive[1:] != positive[:-1])[0]
    return x[change], x[change + 1]


def scan_brackets(
    func: VectorFunction,
    lo: float,
    hi: float,
    *,
    grid: GridMap | None = None,
    initial: int = INITIAL_POINTS,
    max_points: int = MAX_POINTS,
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """
    Bracket the sign changes of `func` on [lo, hi].

    The grid starts with `initial` points and doubles until the sign-change count has
    been the same for two consecutive refinements.

    Args:
        func (VectorFunction): Vectorized real function.
        lo (float): Lower end of the interval.
        hi (float): Upper end of the interval.
        grid (GridMap | None): Map from [0, 1] onto [lo, hi]; linear if None.
        initial (int): Number of points of the first grid.
        max_points (int): Refinement stops with an error past this size.

    Raises:
        BracketCountError: If the count does not stabilize before `max_points`.

    Returns:
        tuple[NDArray, NDArray]: Left and right ends of the brackets, increasing.
    """

    mapping: GridMap = grid if grid is not None else _linear(lo, hi)
    counts: list[int] = []
    points: int = initial
    stable: int = 0
    brackets: tuple[NDArray[np.float64], NDArray[np.float64]] = (
        np.empty(0),
        np.empty(0),
    )
    while points <= max_points:
        x: NDArray[np.float64] = mapping(np.linspace(0.0, 1.0, points))
        brackets = _brackets(x, func(x))
        count: int = int(brackets[0].size)
        stable = stable + 1 if counts and counts[-1] == count else 0
        counts.append(count)
        logging.debug(
            "Scan of [%g, %g] on %d points: %d brackets", lo, hi, points, count
        )
        if stable >= 2:  # noqa: PLR2004
            return brackets
        points *= 2
    raise BracketCountError(lo, hi, counts)


def refine_scalar(
    func: Callable[[float], float],
    left: float,
    right: float,
    *,
    rtol: float = REFINE_RTOL,
    xtol: float = REFINE_XTOL,
) -> float:
    """Refine one bracketed root with Brent's method."""

    return float(brentq(func, left, right, xtol=xtol, rtol=rtol))


def refine_batch(
    func: VectorFunction,
    left: NDArray[np.float64],
    right: NDArray[np.float64],
    *,
    rtol: float = REFINE_RTOL,
    xtol: float = REFINE_XTOL,
    max_iter: int = 200,
) -> NDArray[np.float64]:
    """
    Refine many brackets at once with the Illinois variant of regula falsi.

    Each iteration evaluates `func` once on the still-active brackets, which suits
    functions whose cost is dominated by a single vectorized solve. Every fourth step
    bisects to guarantee shrinking brackets.

    Args:
        func (VectorFunction): Vectorized real function.
        left (NDArray): Left bracket ends.
        right (NDArray): Right bracket ends, func changes sign on each bracket.
        rtol (float): Relative width at which a bracket is converged.
        xtol (float): Absolute width at which a bracket is converged.
        max_iter (int): Iteration cap.

    Returns:
        NDArray: The roots.
    """

    a: NDArray[np.float64] = np.array(left, dtype=np.float64)
    b: NDArray[np.float64] = np.array(right, dtype=np.float64)
    if a.size == 0:
        return a
    fa: NDArray[np.float64] = func(a)
    fb: NDArray[np.float64] = func(b)
    root: NDArray[np.float64] = np.where(np.abs(fa) <= np.abs(fb), a, b)
    done: NDArray[np.bool_] = (fa == 0) | (fb == 0)
    # -1: left end retained last time, +1: right end retained
    retained: NDArray[np.int8] = np.zeros(a.shape, dtype=np.int8)

    for iteration in range(max_iter):
        width: NDArray[np.float64] = np.abs(b - a)
        done |= width <= xtol + rtol * np.maximum(np.abs(a), np.abs(b))
        active: NDArray[np.intp] = np.nonzero(~done)[0]
        if active.size == 0:
            break
        aa, bb, ffa, ffb = a[active], b[active], fa[active], fb[active]
        with np.errstate(divide="ignore", invalid="ignore"):
            c: NDArray[np.float64] = (aa * ffb - bb * ffa) / (ffb - ffa)
        inside: NDArray[np.bool_] = (c > np.minimum(aa, bb)) & (c < np.maximum(aa, bb))
        bisect: NDArray[np.bool_] = ~inside
        if iteration % 4 == 3:  # noqa: PLR2004
            bisect[:] = True
        c = np.where(bisect, 0.5 * (aa + bb), c)
        fc: NDArray[np.float64] = func(c)
        root[active] = c

        same_as_a: NDArray[np.bool_] = np.sign(fc) == np.sign(ffa)
        hit: NDArray[np.bool_] = fc == 0
        # Replace the end that shares the sign of f(c); halve the retained end's value
        # when it was retained twice in a row.
        new_a = np.where(same_as_a, c, aa)
        new_fa = np.where(same_as_a, fc, ffa)
        new_b = np.where(same_as_a, bb, c)
        new_fb = np.where(same_as_a, ffb, fc)
        kept: NDArray[np.int8] = np.where(same_as_a, 1, -1).astype(np.int8)
        twice: NDArray[np.bool_] = (kept == retained[active]) & ~bisect
        new_fb = np.where(twice & (kept == 1), 0.5 * new_fb, new_fb)
        new_fa = np.where(twice & (kept == -1), 0.5 * new_fa, new_fa)
        a[active], fa[active], b[active], fb[active] = new_a, new_fa, new_b, new_fb
        retained[active] = kept
        done[active] |= hit
    else:
        logging.warning("Bracket refinement hit the iteration cap of %d", max_iter)

    converged: NDArray[np.bool_] = np.abs(b - a) <= xtol + rtol * np.maximum(
        np.abs(a), np.abs(b)
    )
    return np.where(converged & (fa != 0) & (fb != 0), 0.5 * (a + b), root)

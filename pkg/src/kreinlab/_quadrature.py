"""Adaptive composite Gauss-Legendre quadrature over many integrands at once."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, Final

import numpy as np
from numpy.polynomial import legendre

from ._errors import QuadratureError

if TYPE_CHECKING:
    from collections.abc import Sequence

    from numpy.typing import NDArray

ABS_TOL: Final[float] = 1e-10
ORDER: Final[int] = 20
MAX_PANELS: Final[int] = 1 << 13


@dataclass(frozen=True)
class QuadratureResult:
    """The outcome of an adaptive quadrature."""

    value: NDArray[np.complex128]
    """The integrals, one per integrand."""

    error: float
    """The largest error estimate over the integrands."""

    panels: int
    """The number of panels of the accepted rule."""


def gauss_nodes(
    a: float,
    b: float,
    panels: int,
    *,
    order: int = ORDER,
    breakpoints: Sequence[float] = (),
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """
    Return nodes and weights of the composite Gauss-Legendre rule on [a, b].

    Every segment between consecutive breakpoints is split into `panels` equal panels.

    Args:
        a (float): Left end.
        b (float): Right end.
        panels (int): Panels per segment.
        order (int): Gauss points per panel.
        breakpoints (Sequence[float]): Interior points where the integrand may kink.

    Returns:
        tuple[NDArray, NDArray]: The nodes and the weights.
    """

    x, w = legendre.leggauss(order)
    cuts: list[float] = [a, *sorted(p for p in breakpoints if a < p < b), b]
    edges: NDArray[np.float64] = np.concatenate(
        [np.linspace(lo, hi, panels + 1)[:-1] for lo, hi in zip(cuts[:-1], cuts[1:])]
        + [np.array([b])]
    )
    left: NDArray[np.float64] = edges[:-1]
    half: NDArray[np.float64] = 0.5 * np.diff(edges)
    nodes: NDArray[np.float64] = (left + half)[:, None] + half[:, None] * x[None, :]
    weights: NDArray[np.float64] = half[:, None] * w[None, :]
    return nodes.ravel(), weights.ravel()


def integrate(
    func: Callable[[NDArray[np.float64]], NDArray[np.complex128]],
    a: float,
    b: float,
    *,
    tol: float = ABS_TOL,
    order: int = ORDER,
    breakpoints: Sequence[float] = (),
    max_panels: int = MAX_PANELS,
) -> QuadratureResult:
    """
    Integrate `func` over [a, b], doubling the panel count until two rules agree.

    `func` receives the nodes, shape (n,), and returns values of shape (..., n), so
    that one call integrates a whole batch of integrands.

    Args:
        func: The vectorized integrand.
        a (float): Left end.
        b (float): Right end.
        tol (float): Absolute error target.
        order (int): Gauss points per panel.
        breakpoints (Sequence[float]): Interior points where the integrand may kink.
        max_panels (int): Panel cap per segment.

    Raises:
        QuadratureError: If the rules still disagree at the cap.

    Returns:
        QuadratureResult: The integrals and the achieved error estimate.
    """

    def rule(panels: int) -> NDArray[np.complex128]:
        nodes, weights = gauss_nodes(
            a, b, panels, order=order, breakpoints=breakpoints
        )
        return np.asarray(func(nodes) @ weights, dtype=np.complex128)

    panels: int = 1
    coarse: NDArray[np.complex128] = rule(panels)
    error: float = np.inf
    while panels < max_panels:
        panels *= 2
        fine: NDArray[np.complex128] = rule(panels)
        error = float(np.max(np.abs(fine - coarse), initial=0.0))
        if error <= tol:
            logging.debug(
                "Quadrature converged on %d panels, error %.2e", panels, error
            )
            return QuadratureResult(fine, error, panels)
        coarse = fine

    # Richardson step assuming the rule's asymptotic order
    fine = rule(2 * panels)
    factor: float = 2.0 ** (2 * order) - 1.0
    extrapolated: NDArray[np.complex128] = fine + (fine - coarse) / factor
    error = float(np.max(np.abs(extrapolated - fine), initial=0.0))
    if error <= tol:
        logging.debug("Quadrature accepted after Richardson step, error %.2e", error)
        return QuadratureResult(extrapolated, error, 2 * panels)
    raise QuadratureError(error, tol)

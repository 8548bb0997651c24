"""Discrete measures and the arithmetic performed on them."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Any, Callable, Final

import mpmath
import numpy as np

from ._errors import DomainError, PrecisionOverflowError
from ._precision import DEFAULT_PRECISION, workprec

if TYPE_CHECKING:
    from collections.abc import Iterable

    from numpy.typing import NDArray

MERGE_TOL: Final[float] = 1e-9
GAUGE_FLOOR: Final[float] = 1e-12


def _coincide(x: float, y: float, merge_tol: float) -> bool:
    return abs(x - y) < merge_tol * (1.0 + abs(x))


@dataclass(frozen=True)
class DiscreteMeasure:
    """A finite list of weighted support points, enumerated inside a window."""

    class InvalidMeasureError(DomainError):
        """The atoms or the window violate the measure invariants."""

        def __init__(self, reason: str) -> None:
            """
            Initialize the exception.

            Args:
                reason: The violated invariant.
            """

            super().__init__(f"invalid measure: {reason}")

    class PointInSupportError(DomainError):
        """A point mass was added on an existing support point."""

        def __init__(self, point: float) -> None:
            """
            Initialize the exception.

            Args:
                point: The offending point.
            """

            super().__init__(f"point already in support: {point!r}")
            self.point: float = point

    class PoleError(DomainError):
        """The Cauchy transform was evaluated on a support point."""

        def __init__(self, z: complex) -> None:
            """
            Initialize the exception.

            Args:
                z: The evaluation point.
            """

            super().__init__(f"pole: z = {z!r} is a support point")

    class GaugeViolationError(DomainError):
        """A gauge is too small at a support point."""

        def __init__(self, point: float, value: float, floor: float) -> None:
            """
            Initialize the exception.

            Args:
                point: The support point.
                value: |m(point)|.
                floor: The configured floor.
            """

            super().__init__(
                f"gauge violation at point {point!r}: |m| = {value:.3e} < {floor:.1e}"
            )
            self.point: float = point

    atoms: tuple[tuple[float, float], ...]
    """The (point, weight) pairs, points strictly increasing."""

    window: tuple[float, float]
    """The scanned spectral interval (lo, hi)."""

    tail_flag: bool = False
    """Whether atoms outside the window exist but are not enumerated."""

    tail_mass: float | None = field(default=None, compare=False)
    """An upper bound on the mass outside the window, when one is known."""

    def __post_init__(self) -> None:
        lo, hi = self.window
        if not lo <= hi:
            raise DiscreteMeasure.InvalidMeasureError(f"window [{lo}, {hi}] is empty")
        previous: float = -math.inf
        for point, weight in self.atoms:
            if not math.isfinite(point) or not math.isfinite(weight):
                raise DiscreteMeasure.InvalidMeasureError("non-finite atom")
            if weight <= 0:
                raise DiscreteMeasure.InvalidMeasureError(
                    f"weight {weight!r} at {point!r} is not positive"
                )
            if point <= previous:
                raise DiscreteMeasure.InvalidMeasureError(
                    "points are not strictly increasing"
                )
            if not lo <= point <= hi:
                raise DiscreteMeasure.InvalidMeasureError(
                    f"point {point!r} lies outside the window [{lo}, {hi}]"
                )
            previous = point

    @classmethod
    def from_atoms(
        cls,
        atoms: Iterable[tuple[float, float]],
        *,
        window: tuple[float, float] | None = None,
        tail_flag: bool = False,
        tail_mass: float | None = None,
    ) -> DiscreteMeasure:
        """
        Build a measure from unsorted atoms.

        Args:
            atoms: The (point, weight) pairs, in any order.
            window: The window; defaults to the hull of the points.
            tail_flag: Whether atoms outside the window exist.
            tail_mass: An upper bound on the mass outside the window.

        Returns:
            DiscreteMeasure: The measure.
        """

        ordered: tuple[tuple[float, float], ...] = tuple(
            sorted((float(p), float(w)) for p, w in atoms)
        )
        if window is None:
            window = (ordered[0][0], ordered[-1][0]) if ordered else (0.0, 0.0)
        return cls(ordered, window, tail_flag, tail_mass)

    @property
    def points(self) -> NDArray[np.float64]:
        """The support points."""

        return np.array([p for p, _ in self.atoms], dtype=np.float64)

    @property
    def weights(self) -> NDArray[np.float64]:
        """The weights, aligned with `points`."""

        return np.array([w for _, w in self.atoms], dtype=np.float64)

    def __len__(self) -> int:
        return len(self.atoms)

    def scaled(self, factor: float) -> DiscreteMeasure:
        """Return the measure with every weight multiplied by `factor`."""

        return replace(self, atoms=tuple((p, w * factor) for p, w in self.atoms))


@dataclass(frozen=True)
class MomentValue:
    """A moment together with its completeness flag."""

    value: float
    """Σ pointᵏ · weight over the enumerated atoms."""

    windowed: bool
    """Whether the measure has unenumerated atoms, making the value a partial sum."""


@dataclass(frozen=True)
class CauchyValue:
    """A Cauchy transform value together with its truncation bound."""

    value: complex
    """Σ weight / (point − z) over the enumerated atoms."""

    tail_bound: float
    """Bound on the contribution of unenumerated atoms; 0 for complete measures."""


def total_mass(mu: DiscreteMeasure) -> float:
    """Return the enumerated mass of `mu`."""

    return math.fsum(w for _, w in mu.atoms)


def add_point_mass(
    mu: DiscreteMeasure, lam: float, a: float, *, merge_tol: float = MERGE_TOL
) -> DiscreteMeasure:
    """
    Return μ + a·δ_λ.

    Args:
        mu (DiscreteMeasure): The measure.
        lam (float): The new support point, inside the window.
        a (float): The new weight, strictly positive.
        merge_tol (float): Relative tolerance for "already in support".

    Raises:
        DiscreteMeasure.PointInSupportError: If λ coincides with a support point.
        DiscreteMeasure.InvalidMeasureError: If a ≤ 0 or λ is outside the window.

    Returns:
        DiscreteMeasure: The augmented measure, same window and tail flag.
    """

    if not a > 0:
        raise DiscreteMeasure.InvalidMeasureError(f"added weight {a!r} is not positive")
    lo, hi = mu.window
    if not lo <= lam <= hi:
        raise DiscreteMeasure.InvalidMeasureError(
            f"point {lam!r} lies outside the window [{lo}, {hi}]"
        )
    for point, _ in mu.atoms:
        if _coincide(lam, point, merge_tol):
            raise DiscreteMeasure.PointInSupportError(lam)

    logging.debug("Adding point mass %g at %g", a, lam)
    atoms: list[tuple[float, float]] = [*mu.atoms, (float(lam), float(a))]
    atoms.sort()
    return replace(mu, atoms=tuple(atoms))


def remove_point(
    mu: DiscreteMeasure, lam: float, *, merge_tol: float = MERGE_TOL
) -> DiscreteMeasure:
    """
    Return μ with the atom at λ deleted.

    Raises:
        DiscreteMeasure.InvalidMeasureError: If λ is not a support point.
    """

    kept: tuple[tuple[float, float], ...] = tuple(
        (p, w) for p, w in mu.atoms if not _coincide(lam, p, merge_tol)
    )
    if len(kept) == len(mu.atoms):
        raise DiscreteMeasure.InvalidMeasureError(f"{lam!r} is not a support point")
    return replace(mu, atoms=kept)


def moment(
    mu: DiscreteMeasure, k: int, *, precision: int = DEFAULT_PRECISION
) -> MomentValue:
    """
    Return the k-th moment Σ pointᵏ · weight.

    Args:
        mu (DiscreteMeasure): The measure.
        k (int): The order, k ≥ 0.
        precision (int): Mantissa bits of the accumulation.

    Raises:
        DiscreteMeasure.InvalidMeasureError: If k is negative.
        PrecisionOverflowError: If the moment does not fit a binary64 result.

    Returns:
        MomentValue: The moment and whether it is a windowed partial sum.
    """

    if k < 0:
        raise DiscreteMeasure.InvalidMeasureError(f"moment order {k} is negative")
    if mu.tail_flag:
        logging.debug("Moment %d of a windowed measure is a partial sum", k)

    with workprec(precision):
        total: mpmath.mpf = mpmath.fsum(
            mpmath.mpf(w) * mpmath.mpf(p) ** k for p, w in mu.atoms
        )
        try:
            value: float = float(total)
        except OverflowError as e:
            raise PrecisionOverflowError(f"moment of order {k}") from e
    if not math.isfinite(value):
        raise PrecisionOverflowError(f"moment of order {k}")
    return MomentValue(value, mu.tail_flag)


def _tail_distance(window: tuple[float, float], z: complex) -> float:
    lo, hi = window
    if lo <= z.real <= hi:
        return math.hypot(min(z.real - lo, hi - z.real), z.imag)
    return abs(z.imag)


def cauchy_transform(
    mu: DiscreteMeasure, z: complex, *, merge_tol: float = MERGE_TOL
) -> CauchyValue:
    """
    Return ∫ dμ(t)/(t − z).

    Args:
        mu (DiscreteMeasure): The measure.
        z (complex): The evaluation point, non-real or off the support.
        merge_tol (float): Relative tolerance for "z is a support point".

    Raises:
        DiscreteMeasure.PoleError: If z is a support point.

    Returns:
        CauchyValue: The value and a bound on the unenumerated tail.
    """

    z = complex(z)
    if z.imag == 0:
        for point, _ in mu.atoms:
            if _coincide(z.real, point, merge_tol):
                raise DiscreteMeasure.PoleError(z)

    value: complex = complex(np.sum(mu.weights / (mu.points - z))) if mu.atoms else 0j

    tail_bound: float = 0.0
    if mu.tail_flag:
        distance: float = _tail_distance(mu.window, z)
        if mu.tail_mass is None or distance == 0:
            tail_bound = math.inf
        else:
            tail_bound = mu.tail_mass / distance
    return CauchyValue(value, tail_bound)


def _gauge_factors(
    rho: DiscreteMeasure, m: Callable[[float], complex], floor: float
) -> list[float]:
    factors: list[float] = []
    for point, _ in rho.atoms:
        size: float = abs(m(point))
        if not size >= floor:
            raise DiscreteMeasure.GaugeViolationError(point, size, floor)
        factors.append(size * size)
    return factors


def gauge_rescale(
    rho: DiscreteMeasure,
    m: Callable[[float], complex],
    *,
    floor: float = GAUGE_FLOOR,
) -> DiscreteMeasure:
    """
    Return σ with σ{x} = |m(x)|² ρ{x}.

    Raises:
        DiscreteMeasure.GaugeViolationError: If |m| < floor at a support point.
    """

    factors: list[float] = _gauge_factors(rho, m, floor)
    return replace(
        rho,
        atoms=tuple((p, w * f) for (p, w), f in zip(rho.atoms, factors)),
        tail_mass=None,
    )


def gauge_unscale(
    sigma: DiscreteMeasure,
    m: Callable[[float], complex],
    *,
    floor: float = GAUGE_FLOOR,
) -> DiscreteMeasure:
    """
    Return ρ with ρ{x} = σ{x} / |m(x)|², the inverse of `gauge_rescale`.

    Raises:
        DiscreteMeasure.GaugeViolationError: If |m| < floor at a support point.
    """

    factors: list[float] = _gauge_factors(sigma, m, floor)
    return replace(
        sigma,
        atoms=tuple((p, w / f) for (p, w), f in zip(sigma.atoms, factors)),
        tail_mass=None,
    )


##########
# Serialization
##########


def to_json(mu: DiscreteMeasure) -> dict[str, Any]:
    """Return the JSON form `{"atoms", "window", "tail"}` of a measure."""

    data: dict[str, Any] = {
        "atoms": [[p, w] for p, w in mu.atoms],
        "window": [mu.window[0], mu.window[1]],
        "tail": mu.tail_flag,
    }
    if mu.tail_mass is not None:
        data["tail_mass"] = mu.tail_mass
    return data


def from_json(data: dict[str, Any]) -> DiscreteMeasure:
    """
    Rebuild a measure from its JSON form.

    Raises:
        DiscreteMeasure.InvalidMeasureError: If a required key is missing.
    """

    try:
        atoms: list[tuple[float, float]] = [
            (float(p), float(w)) for p, w in data["atoms"]
        ]
        window: tuple[float, float] | None = (
            (float(data["window"][0]), float(data["window"][1]))
            if "window" in data
            else None
        )
    except (KeyError, TypeError, ValueError) as e:
        error_msg = f"malformed measure file ({e})"
        raise DiscreteMeasure.InvalidMeasureError(error_msg) from e
    tail_mass: Any = data.get("tail_mass")
    return DiscreteMeasure.from_atoms(
        atoms,
        window=window,
        tail_flag=bool(data.get("tail", False)),
        tail_mass=None if tail_mass is None else float(tail_mass),
    )


def to_csv(mu: DiscreteMeasure) -> str:
    """Return the two-column `point,weight` CSV form, 17 significant digits."""

    lines: list[str] = ["point,weight"]
    lines.extend(f"{p:.17g},{w:.17g}" for p, w in mu.atoms)
    return "\n".join(lines) + "\n"

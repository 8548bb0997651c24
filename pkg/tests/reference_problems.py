"""Reference operators shared by the tests, with their closed-form spectra."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import TYPE_CHECKING, Any

from kreinlab import BesselProblem, DiscreteMeasure, JacobiMatrix, SchrodingerProblem

if TYPE_CHECKING:
    from io import TextIOWrapper


def limit_circle_matrix() -> JacobiMatrix:
    """Return the indeterminate matrix q_k = 0, b_k = 2^k."""

    return JacobiMatrix.from_expressions("0", "2^k")


def free_matrix() -> JacobiMatrix:
    """Return the free matrix q_k = 0, b_k = 1 (limit point)."""

    return JacobiMatrix.from_expressions("0", "1")


def free_problem(gamma: float = 0.0) -> SchrodingerProblem:
    """Return −u'' = λu on [0, π] with u'(0) = 0."""

    return SchrodingerProblem(b=math.pi, gamma=gamma)


def free_eigenvalue(n: int, gamma: float) -> float:
    """
    Return the n-th eigenvalue (n ≥ 1) of `free_problem(gamma)` for γ ∈ {0, π/2}.

    Raises:
        ValueError: For any other γ.
    """

    if gamma == 0:
        return (n - 0.5) ** 2
    if gamma == math.pi / 2:
        return float((n - 1) ** 2)
    error_msg = f"no closed form for gamma = {gamma}"
    raise ValueError(error_msg)


def half_order_bessel(gamma: float = 0.0) -> BesselProblem:
    """Return the ν = ½ Bessel problem on (0, π], whose solutions are sin(kx)/k."""

    return BesselProblem(nu=0.5, b=math.pi, gamma=gamma)


def sample_measure() -> DiscreteMeasure:
    """Return a five-atom probability measure."""

    return DiscreteMeasure.from_atoms(
        [(-1.3, 0.1), (-0.2, 0.3), (0.4, 0.25), (1.1, 0.15), (2.5, 0.2)],
        window=(-2.0, 3.0),
    )


def write_json(path: Path, data: dict[str, Any]) -> str:
    """Write `data` to `path` and return the path as a string."""

    f: TextIOWrapper
    with path.open("w", encoding="utf-8") as f:
        json.dump(data, f)
    return str(path)

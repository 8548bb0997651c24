"""Validate sign-change scanning and bracket refinement."""

# pylint: disable=protected-access

# pyright: reportPrivateUsage=none

from __future__ import annotations

import math
from typing import TYPE_CHECKING

import numpy as np
import pytest

from kreinlab import BracketCountError
from kreinlab import _roots as rt

if TYPE_CHECKING:
    from numpy.typing import NDArray


def test_scan_and_refine_sine() -> None:
    """Verify the zeros of sin on [0.5, 10] are π, 2π and 3π."""

    left, right = rt.scan_brackets(np.sin, 0.5, 10.0)
    assert left.size == 3
    roots: NDArray[np.float64] = rt.refine_batch(np.sin, left, right)
    assert roots.tolist() == pytest.approx([math.pi, 2 * math.pi, 3 * math.pi])
    assert np.all(np.abs(roots - [math.pi, 2 * math.pi, 3 * math.pi]) < 1e-11)


def test_scan_with_grid_map() -> None:
    """Verify a quadratic grid finds the same brackets as the linear one."""

    def grid(s: NDArray[np.float64]) -> NDArray[np.float64]:
        return 0.5 + 9.5 * s * s

    left, right = rt.scan_brackets(np.sin, 0.5, 10.0, grid=grid)
    assert np.all((left < [math.pi, 2 * math.pi, 3 * math.pi]) & (right > left))
    assert right.size == 3


def test_scan_unstable_count() -> None:
    """Ensure a count that keeps growing under refinement raises BracketCountError."""

    def alternating(x: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.cos(np.pi * (x.size - 1) * x)

    with pytest.raises(BracketCountError, match="unstable bracket count") as info:
        rt.scan_brackets(alternating, 0.0, 1.0, initial=8, max_points=64)
    assert info.value.counts == [7, 15, 31, 63]


def test_refine_batch_empty() -> None:
    """Verify refining no brackets returns an empty array."""

    assert rt.refine_batch(np.sin, np.empty(0), np.empty(0)).size == 0


def test_refine_batch_exact_hit() -> None:
    """Verify a bracket end that is already a root is returned as is."""

    roots: NDArray[np.float64] = rt.refine_batch(
        lambda x: x - 1.0, np.array([1.0]), np.array([2.0])
    )
    assert roots[0] == 1.0


def test_refine_scalar() -> None:
    """Verify Brent's method finds π/2 as the zero of cos on [1, 2]."""

    assert rt.refine_scalar(math.cos, 1.0, 2.0) == pytest.approx(math.pi / 2, rel=1e-12)

"""Validate orthogonal polynomials, classification and the Nevanlinna machinery."""

# pylint: disable=protected-access

# pyright: reportPrivateUsage=none

from __future__ import annotations

import math
from typing import Callable

import mpmath
import pytest

from kreinlab import Classification, DiscreteMeasure, DomainError, JacobiMatrix
from kreinlab import jacobi as jc
from kreinlab import measures as ms
from kreinlab._precision import HIGH_PRECISION, workprec
from tests.reference_problems import free_matrix, limit_circle_matrix, sample_measure


@pytest.fixture(name="matrix")
def fixture_matrix() -> JacobiMatrix:
    """
    Provide the limit-circle matrix q_k = 0, b_k = 2^k.

    Returns:
        JacobiMatrix: A fresh matrix, so that its caches start empty.
    """

    return limit_circle_matrix()


##########
# Construction
##########


def test_from_expressions(matrix: JacobiMatrix) -> None:
    """Verify expression coefficients are generated on demand."""

    q, b = matrix.mp_coefficients(4, HIGH_PRECISION)
    assert [float(v) for v in q] == [0.0, 0.0, 0.0, 0.0]
    assert [float(v) for v in b] == [2.0, 4.0, 8.0, 16.0]
    assert matrix.size is None
    assert matrix.save_config() == {"diag": "0", "offdiag": "2^k"}


def test_from_lists() -> None:
    """Verify a finite matrix keeps its size and configuration."""

    matrix: JacobiMatrix = JacobiMatrix.from_lists([1.0, 2.0, 3.0], [0.5, 0.25])
    assert matrix.size == 3
    q, b = matrix.float_coefficients(3, truncation=True)
    assert q.tolist() == [1.0, 2.0, 3.0]
    assert b.tolist() == [0.5, 0.25]


@pytest.mark.parametrize(
    ("diag", "offdiag", "message"),
    [
        ([1.0, 2.0], [0.5, 0.5, 0.5], "2 diagonal and 3 off-diagonal"),
        ([], [], "0 diagonal"),
        ([1.0, 2.0], [0.0], "must be > 0"),
        ([1.0, 2.0], [-1.0], "must be > 0"),
        (["abc"], [], "could not convert"),
        ([1.0, None], [1.0], "invalid Jacobi coefficient"),
    ],
)
def test_from_lists_invalid(
    diag: list[float], offdiag: list[float], message: str
) -> None:
    """Ensure inconsistent lists and non-positive off-diagonals are rejected."""

    with pytest.raises(JacobiMatrix.CoefficientError, match=message):
        JacobiMatrix.from_lists(diag, offdiag)


def test_from_config_mixed_kinds() -> None:
    """Ensure mixing an expression with a list is rejected."""

    with pytest.raises(JacobiMatrix.CoefficientError, match="both expressions"):
        JacobiMatrix.from_config({"diag": "0", "offdiag": [1.0, 2.0]})


def test_from_config_missing_key() -> None:
    """Ensure a configuration without 'offdiag' is rejected."""

    with pytest.raises(JacobiMatrix.CoefficientError, match="'offdiag'"):
        JacobiMatrix.from_config({"diag": "0"})


def test_non_positive_generated_offdiag() -> None:
    """Ensure a generated b_k ≤ 0 is reported when it is first needed."""

    matrix: JacobiMatrix = JacobiMatrix.from_expressions("0", "1 - k")
    with pytest.raises(JacobiMatrix.CoefficientError, match="b_1"):
        matrix.mp_coefficients(2, HIGH_PRECISION)


def test_finite_matrix_index_exceeded() -> None:
    """Ensure asking a finite matrix for too many entries fails."""

    matrix: JacobiMatrix = JacobiMatrix.from_lists([0.0, 0.0], [1.0])
    with pytest.raises(JacobiMatrix.CoefficientError, match="exceeds"):
        matrix.mp_coefficients(3, HIGH_PRECISION)


##########
# Polynomials
##########


def test_free_polynomials_at_zero() -> None:
    """Verify P_k(0) of the free matrix follows the Chebyshev pattern 1, 0, −1, 0."""

    values: jc.PolynomialValues = jc.eval_polys(free_matrix(), 0.0, 8)
    assert [float(mpmath.re(v)) for v in values.p] == [
        1.0,
        0.0,
        -1.0,
        0.0,
        1.0,
        0.0,
        -1.0,
        0.0,
        1.0,
    ]


def test_free_polynomials_closed_form() -> None:
    """Verify P_k(2cos θ) = sin((k+1)θ)/sin θ for the free matrix."""

    theta: float = 0.7
    values: jc.PolynomialValues = jc.eval_polys(
        free_matrix(), 2 * math.cos(theta), 12
    )
    for k, value in enumerate(values.p):
        expected: float = math.sin((k + 1) * theta) / math.sin(theta)
        assert float(mpmath.re(value)) == pytest.approx(expected, abs=1e-12)


def test_poly_table_matches_eval_polys(matrix: JacobiMatrix) -> None:
    """Verify the binary64 table agrees with the multiprecision recurrence."""

    z: complex = 0.3 + 0.7j
    table = jc.poly_table(matrix, [z], 10)[:, 0]
    values: jc.PolynomialValues = jc.eval_polys(matrix, z, 10)
    for got, expected in zip(table, values.p):
        assert got == pytest.approx(complex(expected), rel=1e-12)


def test_wronskian(matrix: JacobiMatrix) -> None:
    """Verify b_k(P_{k+1}Q_k − P_kQ_{k+1}) = −1 for every k."""

    n: int = 30
    values: jc.PolynomialValues = jc.eval_polys(
        matrix, 0.3 + 0.7j, n, precision=HIGH_PRECISION
    )
    _, b = matrix.mp_coefficients(n, HIGH_PRECISION)
    p, q = values.p, values.q
    with workprec(HIGH_PRECISION):
        for k in range(n):
            assert abs(b[k] * (p[k + 1] * q[k] - p[k] * q[k + 1]) + 1) < 1e-30


def test_eval_polys_negative_degree(matrix: JacobiMatrix) -> None:
    """Ensure a negative degree is rejected."""

    with pytest.raises(JacobiMatrix.CoefficientError, match="negative"):
        jc.eval_polys(matrix, 0.0, -1)


##########
# Classification
##########


@pytest.mark.parametrize(
    ("build", "expected"),
    [
        (limit_circle_matrix, Classification.LIMIT_CIRCLE),
        (free_matrix, Classification.LIMIT_POINT),
    ],
)
def test_classify(
    build: Callable[[], JacobiMatrix], expected: Classification
) -> None:
    """Verify the limit point / limit circle verdicts of the reference matrices."""

    assert jc.classify(build()) is expected


def test_classify_real_point(matrix: JacobiMatrix) -> None:
    """Ensure classification at a real point is refused."""

    with pytest.raises(DomainError, match="non-real"):
        jc.classify(matrix, 0.5)


def test_classify_finite_matrix() -> None:
    """Ensure a finite matrix cannot be classified."""

    with pytest.raises(DomainError, match="finite"):
        jc.classify(JacobiMatrix.from_lists([0.0, 0.0], [1.0]))


def test_classification_cached(matrix: JacobiMatrix) -> None:
    """Verify the verdict is stored on the matrix."""

    assert matrix._verdict is None
    assert matrix.classification() is Classification.LIMIT_CIRCLE
    assert matrix._verdict is Classification.LIMIT_CIRCLE


##########
# Nevanlinna matrix
##########


def test_nevanlinna_at_zero(matrix: JacobiMatrix) -> None:
    """Verify A(0) = 0, B(0) = −1, C(0) = 1, D(0) = 0."""

    value: jc.NevanlinnaValue = jc.nevanlinna(matrix, 0.0)
    assert complex(value.a) == 0
    assert complex(value.b) == -1
    assert complex(value.c) == 1
    assert complex(value.d) == 0


@pytest.mark.parametrize("z", [0.5 + 0.5j, -1.7 + 0.2j, 3.0, 10j])
def test_nevanlinna_determinant(matrix: JacobiMatrix, z: complex) -> None:
    """Verify AD − BC = 1."""

    value: jc.NevanlinnaValue = jc.nevanlinna(matrix, z)
    with workprec(HIGH_PRECISION):
        assert abs(value.determinant - 1) < 1e-18
    assert value.precision == HIGH_PRECISION
    assert value.trunc > 1


def test_nevanlinna_fixed_truncation(matrix: JacobiMatrix) -> None:
    """Verify an explicit truncation is honoured."""

    value: jc.NevanlinnaValue = jc.nevanlinna(matrix, 1 + 1j, trunc=5)
    assert value.trunc == 5
    assert value.tail_estimate > 0


def test_nevanlinna_limit_point() -> None:
    """Ensure the Nevanlinna matrix of a limit-point matrix is refused."""

    with pytest.raises(JacobiMatrix.LimitPointError, match="LimitPoint"):
        jc.nevanlinna(free_matrix(), 1j)


def test_weyl_function_is_nevanlinna(matrix: JacobiMatrix) -> None:
    """Verify W maps the upper half plane into itself."""

    for t in (None, -1.0, 0.0, 2.5):
        assert jc.weyl_function(matrix, t, 1 + 1j).imag > 0


def test_weyl_function_normalization(matrix: JacobiMatrix) -> None:
    """Verify iy·W(iy) tends to −1."""

    y: float = 1e4
    assert abs(1j * y * jc.weyl_function(matrix, 0.0, 1j * y) + 1) < 1e-3


def test_weyl_function_near_pole(matrix: JacobiMatrix) -> None:
    """Ensure W_0 refuses to evaluate on its pole at 0."""

    with pytest.raises(jc.NearPoleError, match="near pole"):
        jc.weyl_function(matrix, 0.0, 0.0)


##########
# Extremal measures
##########


def test_christoffel_weight_at_zero(matrix: JacobiMatrix) -> None:
    """Verify 1/ΣP_k(0)² = 3/4, since P_{2m}(0) = (−½)^m and P_{2m+1}(0) = 0."""

    (weight,) = jc.christoffel_weights(matrix, [0.0])
    assert weight == pytest.approx(0.75, rel=1e-12)


def test_extension_parameter_at_zero(matrix: JacobiMatrix) -> None:
    """Verify the extension through 0 is t = D(0)/B(0) = 0."""

    t: jc.ExtensionParameter = jc.extension_parameter(matrix, 0.0)
    assert t is not None
    assert t == pytest.approx(0.0, abs=1e-12)


def test_residue_weight_at_zero(matrix: JacobiMatrix) -> None:
    """Verify the residue of W_0 at 0 equals the Christoffel weight."""

    assert jc.residue_weight(matrix, 0.0, 0.0) == pytest.approx(0.75, rel=1e-6)


@pytest.mark.timeout(120)
def test_extremal_measure(matrix: JacobiMatrix) -> None:
    """Verify μ_0 has the atom 0 with weight 3/4 and a consistent tail mass."""

    mu: DiscreteMeasure = jc.extremal_measure(matrix, 0.0, (-100.0, 100.0))
    assert mu.tail_flag
    nearest: int = min(range(len(mu)), key=lambda i: abs(mu.atoms[i][0]))
    point, weight = mu.atoms[nearest]
    assert point == pytest.approx(0.0, abs=1e-10)
    assert weight == pytest.approx(0.75, rel=1e-10)
    total: float = math.fsum(mu.weights.tolist())
    assert total <= 1.0 + 1e-12
    assert mu.tail_mass == pytest.approx(max(0.0, 1.0 - total))


@pytest.mark.timeout(120)
def test_residue_weight_off_zero(matrix: JacobiMatrix) -> None:
    """Verify the residue of W_0 matches the weight of an atom away from 0."""

    mu: DiscreteMeasure = jc.extremal_measure(matrix, 0.0, (-20.0, 20.0))
    point, weight = max(mu.atoms, key=lambda atom: abs(atom[0]))
    assert abs(point) > 1.0
    assert jc.residue_weight(matrix, 0.0, point) == pytest.approx(weight, rel=1e-6)


@pytest.mark.timeout(120)
@pytest.mark.parametrize("t", [-1.0, 0.0, 1.0])
def test_extremal_measure_moments(matrix: JacobiMatrix, t: float) -> None:
    """Verify the moments of μ_t up to order 6 are ⟨δ₁, Jᵏδ₁⟩."""

    exact: list[float] = jc.moments_from_matrix(matrix, 6)
    assert exact[:5] == [1.0, 0.0, 4.0, 0.0, 80.0]
    mu: DiscreteMeasure = jc.extremal_measure(matrix, t, (-100.0, 100.0))
    for k in range(7):
        # Odd orders are measured against the next even moment.
        scale: float = exact[k + k % 2]
        assert ms.moment(mu, k).value == pytest.approx(exact[k], abs=1e-3 * scale)


def test_extremal_measure_unbounded_window(matrix: JacobiMatrix) -> None:
    """Ensure an unbounded scan window is rejected."""

    with pytest.raises(DomainError, match="bounded"):
        jc.extremal_measure(matrix, 0.0, (-math.inf, 1.0))


def test_extremal_measure_limit_point() -> None:
    """Ensure extremal measures of a limit-point matrix are refused."""

    with pytest.raises(JacobiMatrix.LimitPointError):
        jc.extremal_measure(free_matrix(), 0.0, (-1.0, 1.0))


##########
# Finite matrices
##########


def test_truncation_spectrum_free() -> None:
    """Verify the n×n free truncation has eigenvalues 2cos(kπ/(n+1))."""

    n: int = 12
    expected: list[float] = sorted(
        2 * math.cos(k * math.pi / (n + 1)) for k in range(1, n + 1)
    )
    assert jc.truncation_spectrum(free_matrix(), n) == pytest.approx(
        expected, abs=1e-13
    )


def test_truncation_spectrum_invalid_size(matrix: JacobiMatrix) -> None:
    """Ensure an empty truncation is rejected."""

    with pytest.raises(DomainError, match="at least 1"):
        jc.truncation_spectrum(matrix, 0)


def test_moments_from_matrix_free() -> None:
    """Verify the free moments are the Catalan numbers at even orders."""

    catalan: list[float] = [1.0, 0.0, 1.0, 0.0, 2.0, 0.0, 5.0]
    assert jc.moments_from_matrix(free_matrix(), 6) == catalan


def test_stieltjes_round_trip() -> None:
    """Verify the reconstructed matrix reproduces the atoms and weights."""

    mu: DiscreteMeasure = sample_measure()
    n: int = len(mu)
    matrix: JacobiMatrix = jc.stieltjes_reconstruct(mu, n)
    assert matrix.size == n
    points: list[float] = jc.truncation_spectrum(matrix, n)
    weights: list[float] = jc.christoffel_weights(matrix, points, n)
    assert points == pytest.approx(mu.points.tolist(), abs=1e-10)
    assert weights == pytest.approx(mu.weights.tolist(), abs=1e-10)


def test_stieltjes_partial_reconstruction() -> None:
    """Verify fewer rows than atoms keep the trailing off-diagonal entry."""

    matrix: JacobiMatrix = jc.stieltjes_reconstruct(sample_measure(), 3)
    assert len(matrix.save_config()["offdiag"]) == 3
    assert jc.moments_from_matrix(matrix, 2)[2] == pytest.approx(
        jc.moments_from_matrix(jc.stieltjes_reconstruct(sample_measure(), 5), 2)[2]
    )


def test_stieltjes_rank_error() -> None:
    """Ensure a measure with too few atoms is rejected."""

    with pytest.raises(jc.RankError, match="rank error"):
        jc.stieltjes_reconstruct(sample_measure(), 6)

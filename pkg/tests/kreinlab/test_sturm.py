"""Validate the Schrödinger problems: shooting, spectra, transforms and K_v."""

# pylint: disable=protected-access

# pyright: reportPrivateUsage=none

from __future__ import annotations

import math
from typing import TYPE_CHECKING

import numpy as np
import pytest

from kreinlab import DiscreteMeasure, DomainError, Profile, SchrodingerProblem
from kreinlab import sturm as st
from tests.reference_problems import free_eigenvalue, free_problem

if TYPE_CHECKING:
    from numpy.typing import NDArray


##########
# Problems
##########


@pytest.mark.parametrize(
    ("kwargs", "message"),
    [
        ({"b": 0.0}, "b = 0.0 is not > 0"),
        ({"b": 1.0, "gamma": math.pi}, "outside"),
        ({"b": 1.0, "gamma": -0.1}, "outside"),
        ({"b": 1.0, "atoms": ((0.5, 1.0), (0.2, 1.0))}, "strictly increasing"),
        ({"b": 1.0, "atoms": ((2.0, 1.0),)}, "strictly increasing"),
    ],
)
def test_invalid_problem(kwargs: dict[str, object], message: str) -> None:
    """Ensure problems violating their invariants are rejected."""

    with pytest.raises(SchrodingerProblem.InvalidProblemError, match=message):
        SchrodingerProblem(**kwargs)  # pyright: ignore[reportArgumentType]


def test_config_round_trip() -> None:
    """Verify a problem survives its problem-file form."""

    problem: SchrodingerProblem = SchrodingerProblem.from_config(
        {"b": 2.0, "q": "sin(x)", "atoms": [[0.5, -1.0]], "gamma": 0.3}
    )
    again: SchrodingerProblem = SchrodingerProblem.from_config(problem.save_config())
    assert again.b == 2.0
    assert again.gamma == 0.3
    assert again.atoms == ((0.5, -1.0),)
    assert again.q.text == "sin(x)"


def test_config_missing_b() -> None:
    """Ensure a configuration without b is rejected."""

    with pytest.raises(SchrodingerProblem.InvalidProblemError, match="'b'"):
        SchrodingerProblem.from_config({"q": "0"})


def test_breakpoints() -> None:
    """Verify interior atoms and table nodes are breakpoints; end atoms are not."""

    problem: SchrodingerProblem = SchrodingerProblem(
        b=3.0,
        q=Profile.from_table([[0.0, 0.0], [1.5, 1.0], [3.0, 0.0]]),
        atoms=((0.0, 2.0), (1.0, 1.0)),
    )
    assert problem.breakpoints == (1.0, 1.5)


def test_initial_data() -> None:
    """Verify an atom at 0 enters the quasi-derivative at 0+."""

    assert SchrodingerProblem(b=1.0, atoms=((0.0, 2.5),)).initial_data() == (1.0, 2.5)
    assert SchrodingerProblem(b=1.0, dirichlet_at_zero=True).initial_data() == (
        0.0,
        1.0,
    )


##########
# Shooting
##########


def test_solve_xi_free() -> None:
    """Verify ξ = cos(kx) on the free problem, with its squared norm."""

    k: float = 1.3
    result: st.ShootResult = st.solve_xi(free_problem(), k * k)
    assert result.value_at_b == pytest.approx(math.cos(k * math.pi), abs=1e-10)
    assert result.deriv_at_b_minus == pytest.approx(
        -k * math.sin(k * math.pi), abs=1e-10
    )
    assert result.norm_sq is not None
    expected: float = math.pi / 2 + math.sin(2 * k * math.pi) / (4 * k)
    assert result.norm_sq == pytest.approx(expected, rel=1e-9)


def test_solve_xi_complex() -> None:
    """Verify no norm is reported at non-real points."""

    z: complex = 2.0 + 1.0j
    result: st.ShootResult = st.solve_xi(free_problem(), z)
    k: complex = np.sqrt(z)
    assert result.value_at_b == pytest.approx(np.cos(k * math.pi), abs=1e-10)
    assert result.norm_sq is None


def test_solve_xi_variable_potential() -> None:
    """Verify the stepper agrees with the closed form of a constant potential."""

    constant: SchrodingerProblem = SchrodingerProblem(
        b=math.pi, q=Profile.constant_profile(1.0)
    )
    stepped: SchrodingerProblem = SchrodingerProblem(
        b=math.pi, q=Profile(np.ones_like, text="1 (stepped)")
    )
    lam: float = 3.0
    exact: st.ShootResult = st.solve_xi(constant, lam)
    numeric: st.ShootResult = st.solve_xi(stepped, lam)
    assert numeric.value_at_b == pytest.approx(exact.value_at_b, abs=1e-8)
    assert numeric.deriv_at_b_minus == pytest.approx(exact.deriv_at_b_minus, abs=1e-8)
    assert exact.value_at_b == pytest.approx(math.cos(math.sqrt(2.0) * math.pi))


##########
# Eigenvalues
##########


@pytest.mark.parametrize("gamma", [0.0, math.pi / 2])
def test_free_eigenvalues(gamma: float) -> None:
    """Verify the free eigenvalues (n − ½)² at γ = 0 and (n − 1)² at γ = π/2."""

    eigs: list[float] = st.eigenvalues(free_problem(gamma), 12)
    expected: list[float] = [free_eigenvalue(n, gamma) for n in range(1, 13)]
    assert eigs == pytest.approx(expected, rel=1e-10, abs=1e-10)


def test_eigenvalues_window() -> None:
    """Verify a window search returns exactly the eigenvalues inside it."""

    assert st.eigenvalues(free_problem(), window=(0.5, 10.0)) == pytest.approx(
        [2.25, 6.25], rel=1e-10
    )


@pytest.mark.timeout(60)
@pytest.mark.parametrize("bound", [100.0, 2500.0, 1e4])
def test_eigenvalue_count(bound: float) -> None:
    """Verify the count in [0, Λ] is ⌊√Λ·b/π⌋ within 2 for the free problem."""

    found: list[float] = st.eigenvalues(free_problem(), window=(0.0, bound))
    assert abs(len(found) - math.floor(math.sqrt(bound))) <= 2


def test_eigenvalues_jobs() -> None:
    """Verify a concurrent scan finds the same eigenvalues."""

    assert st.eigenvalues(free_problem(), 20, jobs=4) == pytest.approx(
        st.eigenvalues(free_problem(), 20), rel=1e-11
    )


@pytest.mark.parametrize(
    ("count", "window"),
    [
        (None, None),
        (0, None),
        (None, (1.0, 1.0)),
        (None, (0.0, math.inf)),
    ],
)
def test_eigenvalues_invalid_request(
    count: int | None, window: tuple[float, float] | None
) -> None:
    """Ensure a search needs a positive count or a bounded window."""

    with pytest.raises(DomainError):
        st.eigenvalues(free_problem(), count, window=window)


def test_jump_fidelity() -> None:
    """Verify eigenvalues with an atom satisfy the closed-form transfer across it."""

    x0: float = math.pi / 2
    mass: float = 1.0
    problem: SchrodingerProblem = SchrodingerProblem(b=math.pi, atoms=((x0, mass),))
    k: NDArray[np.float64] = np.sqrt(np.asarray(st.eigenvalues(problem, 10)))
    u: NDArray[np.float64] = np.cos(k * x0)
    p: NDArray[np.float64] = -k * np.sin(k * x0) + mass * u
    tail: float = math.pi - x0
    at_b: NDArray[np.float64] = u * np.cos(k * tail) + p * np.sin(k * tail) / k
    assert float(np.max(np.abs(at_b))) < 1e-8


def test_interlacing_of_extensions() -> None:
    """Verify two extensions of the same operator interlace."""

    problem: SchrodingerProblem = SchrodingerProblem(
        b=math.pi, q=Profile.from_expr("sin(x)"), gamma=0.3
    )
    first: list[float] = st.eigenvalues(problem, 10)
    second: list[float] = st.eigenvalues(problem.with_gamma(1.2), 10)
    assert st.interlacing_check(first, second).interlaced


##########
# Spectral measures
##########


def test_free_spectral_measure() -> None:
    """Verify the free weights 2/π and the window ending midway to the next point."""

    mu: DiscreteMeasure = st.spectral_measure(free_problem(), 8)
    assert len(mu) == 8
    assert mu.weights.tolist() == pytest.approx([2 / math.pi] * 8, rel=1e-9)
    assert mu.window[1] == pytest.approx(0.5 * (7.5**2 + 8.5**2), rel=1e-10)
    assert mu.window[0] <= 0.25
    assert mu.tail_flag


def test_dirichlet_spectral_measure() -> None:
    """Verify ξ = sin(nx)/n gives eigenvalues n² and weights 2n²/π."""

    problem: SchrodingerProblem = SchrodingerProblem(b=math.pi, dirichlet_at_zero=True)
    mu: DiscreteMeasure = st.spectral_measure(problem, 6)
    assert mu.points.tolist() == pytest.approx(
        [n * n for n in range(1, 7)], rel=1e-10
    )
    assert mu.weights.tolist() == pytest.approx(
        [2 * n * n / math.pi for n in range(1, 7)], rel=1e-9
    )


def test_extension_parameter() -> None:
    """Verify λ = 1 belongs to the γ = π/2 extension of the free problem."""

    assert st.extension_parameter(free_problem(), 1.0) == pytest.approx(
        math.pi / 2, abs=1e-9
    )


##########
# Transform and Parseval
##########


def test_transform_free() -> None:
    """Verify f(λ) = sin(√λπ)/√λ for φ = 1."""

    values = st.transform(free_problem(), Profile.constant_profile(1.0), [2.25, 1.0])
    assert values[0] == pytest.approx(-2 / 3, abs=1e-9)
    assert values[1] == pytest.approx(0.0, abs=1e-9)


def test_norm_sq() -> None:
    """Verify ∫_0^π x² = π³/3."""

    assert st.norm_sq(Profile.from_expr("x"), math.pi) == pytest.approx(
        math.pi**3 / 3, rel=1e-12
    )


@pytest.mark.timeout(120)
def test_parseval() -> None:
    """Verify Σ|f(λ_n)|²w_n approaches ‖1‖² = π within the analytic tail bound."""

    count: int = 100
    total: float = st.parseval_sum(free_problem(), Profile.constant_profile(1.0), count)
    assert total <= math.pi + 1e-8
    assert math.pi - total <= 2 / (math.pi * (count - 0.5)) + 1e-8


##########
# K_v
##########


def test_kv_rank_one() -> None:
    """Verify K_v φ = s⟨c_λ, φ⟩c_λ."""

    s: float = 0.7
    lam: float = 2.0
    table: st.KvTable = st.kv_apply(s, lam, math.pi, Profile.from_expr("x"))
    assert st.kv_rank_one_residual(table, s, lam) < 1e-10


def test_kv_apply_invalid_mass() -> None:
    """Ensure a non-positive mass is rejected."""

    with pytest.raises(DomainError, match="must be > 0"):
        st.kv_apply(0.0, 2.0, math.pi, Profile.constant_profile(1.0))


def test_kv_nystrom_matrix() -> None:
    """Verify I + K_v is symmetric with exactly one eigenvalue above 1."""

    matrix: NDArray[np.float64] = st.kv_nystrom_matrix(0.7, 2.0, math.pi, 200)
    assert np.allclose(matrix, matrix.T)
    spectrum: NDArray[np.float64] = np.linalg.eigvalsh(matrix)
    assert int(np.sum(spectrum > 1 + 1e-8)) == 1
    assert float(np.min(spectrum)) == pytest.approx(1.0, abs=1e-8)


@pytest.mark.timeout(120)
def test_kv_form_check() -> None:
    """Verify ⟨φ, (I + K_v)φ⟩ matches the norm in L²(ρ + s·δ_λ)."""

    report: st.KvFormReport = st.kv_form_check(
        free_problem(), 0.7, 2.0, Profile.from_expr("pi - x"), 50
    )
    assert report.count == 50
    assert report.relative_error < 1e-5


def test_kv_form_check_on_eigenvalue() -> None:
    """Ensure a point mass on an eigenvalue of the reference extension is refused."""

    with pytest.raises(DomainError, match="is an eigenvalue"):
        st.kv_form_check(free_problem(), 0.7, 2.25, Profile.constant_profile(1.0), 10)


@pytest.mark.timeout(120)
def test_kv_form_check_converges() -> None:
    """Verify the relative gap shrinks each time the truncation doubles."""

    phi: Profile = Profile.from_expr("pi - x")
    errors: list[float] = [
        st.kv_form_check(free_problem(), 0.7, 2.0, phi, count).relative_error
        for count in (10, 20, 40)
    ]
    assert errors[0] > errors[1] > errors[2]
    assert errors[2] < errors[0] / 4


@pytest.mark.parametrize(
    "problem",
    [
        SchrodingerProblem(b=math.pi, q=Profile.constant_profile(1.0)),
        SchrodingerProblem(b=math.pi, atoms=((1.0, 0.5),)),
        SchrodingerProblem(b=math.pi, dirichlet_at_zero=True),
    ],
)
def test_kv_form_check_needs_free_problem(problem: SchrodingerProblem) -> None:
    """Ensure the K_v check refuses a reference problem that is not free."""

    with pytest.raises(DomainError, match="reference problem must have q = 0"):
        st.kv_form_check(problem, 0.7, 2.0, Profile.constant_profile(1.0), 10)


##########
# Asymptotics and interlacing
##########


def test_asymptotic_fit() -> None:
    """Verify the fit recovers c = 1 and κ = −½ from (n − ½)²."""

    fit: st.AsymptoticFit = st.asymptotic_fit([(n - 0.5) ** 2 for n in range(1, 41)])
    assert fit.c == pytest.approx(1.0, rel=1e-12)
    assert fit.kappa == pytest.approx(-0.5, abs=1e-10)
    assert fit.max_residual < 1e-8
    assert len(fit.residuals) == 20


def test_asymptotic_fit_too_short() -> None:
    """Ensure the fit needs at least 20 values."""

    with pytest.raises(DomainError, match="at least 20"):
        st.asymptotic_fit([1.0, 4.0, 9.0])


@pytest.mark.parametrize(
    ("e1", "e2", "interlaced", "violation"),
    [
        ([1.0, 3.0, 5.0], [2.0, 4.0, 6.0], True, None),
        ([1.0, 3.0, 5.0], [0.0, 2.0, 4.0], True, None),
        ([1.0, 3.0, 5.0], [2.0, 2.5, 6.0], False, 0),
        ([1.0, 3.0, 5.0], [2.0, 3.0, 4.0], False, 1),
    ],
)
def test_interlacing_check(
    e1: list[float],
    e2: list[float],
    interlaced: bool,  # noqa: FBT001
    violation: int | None,
) -> None:
    """Verify strict alternation on the common range."""

    report: st.InterlacingReport = st.interlacing_check(e1, e2)
    assert report.interlaced is interlaced
    assert report.first_violation == violation


@pytest.mark.parametrize(
    ("e1", "e2"),
    [
        ([], [1.0]),
        ([1.0, 2.0], [3.0, 4.0]),
    ],
)
def test_interlacing_check_invalid(e1: list[float], e2: list[float]) -> None:
    """Ensure empty or disjoint lists are rejected."""

    with pytest.raises(DomainError):
        st.interlacing_check(e1, e2)

"""
The invariant suites behind the verify verb.

Every check computes a measured error and the tolerance it must meet. A check that
raises a library error is reported as failed with an infinite error.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Callable, Final

import numpy as np

from kreinlab import (
    BesselProblem,
    DiscreteMeasure,
    JacobiMatrix,
    Kernel,
    KreinLabError,
    Profile,
    SchrodingerProblem,
)
from kreinlab import bessel, debranges, jacobi, measures, sturm
from kreinlab._precision import HIGH_PRECISION, workprec
from kreinlab.debranges import Verdict

from ._enums import Suite
from ._formatting import as_error, as_table

if TYPE_CHECKING:
    from numpy.typing import NDArray

Check = Callable[[], tuple[float, float]]

_SEED: Final[int] = 20240229
_CHECKS: dict[Suite, list[tuple[str, Check]]] = {suite: [] for suite in Suite}


@dataclass(frozen=True)
class CheckResult:
    """One row of a verification summary."""

    suite: Suite
    """The suite the check belongs to."""

    name: str
    """What is checked."""

    error: float
    """The measured error."""

    tolerance: float
    """The largest acceptable error."""

    @property
    def passed(self) -> bool:
        """Whether the error is finite and within the tolerance."""

        return math.isfinite(self.error) and self.error <= self.tolerance


def _check(suite: Suite, name: str) -> Callable[[Check], Check]:
    def register(func: Check) -> Check:
        _CHECKS[suite].append((name, func))
        return func

    return register


def _flag(ok: bool) -> tuple[float, float]:  # noqa: FBT001
    return (0.0 if ok else 1.0), 0.0


##########
# Reference problems
##########


def reference_matrix() -> JacobiMatrix:
    """Return the limit-circle matrix q_k = 0, b_k = 2^k."""

    return JacobiMatrix.from_expressions("0", "2^k")


def free_problem(gamma: float = 0.0) -> SchrodingerProblem:
    """Return the free problem on [0, π]."""

    return SchrodingerProblem(b=math.pi, gamma=gamma)


def _two_atoms() -> DiscreteMeasure:
    return DiscreteMeasure.from_atoms([(-0.5, 0.5), (0.5, 0.5)], window=(-1.0, 1.0))


##########
# measures
##########


@_check(Suite.MEASURES, "mass additivity")
def _mass_additivity() -> tuple[float, float]:
    mu: DiscreteMeasure = _two_atoms()
    grown: DiscreteMeasure = measures.add_point_mass(mu, 0.0, 0.25)
    return abs(measures.total_mass(grown) - measures.total_mass(mu) - 0.25), 1e-15


@_check(Suite.MEASURES, "remove inverts add")
def _remove_inverts_add() -> tuple[float, float]:
    mu: DiscreteMeasure = _two_atoms()
    back: DiscreteMeasure = measures.remove_point(
        measures.add_point_mass(mu, 0.1, 2.0), 0.1
    )
    return _flag(back == mu)


@_check(Suite.MEASURES, "zeroth moment")
def _zeroth_moment() -> tuple[float, float]:
    mu: DiscreteMeasure = _two_atoms()
    return abs(measures.moment(mu, 0).value - measures.total_mass(mu)), 1e-15


@_check(Suite.MEASURES, "Cauchy transform at 10i")
def _cauchy_expansion() -> tuple[float, float]:
    mu: DiscreteMeasure = _two_atoms()
    z: complex = 10j
    value: complex = measures.cauchy_transform(mu, z).value
    bound: float = measures.moment(mu, 2).value / abs(z) ** 2
    return abs(value - (-1 / z)), bound


@_check(Suite.MEASURES, "gauge round trip")
def _gauge_round_trip() -> tuple[float, float]:
    mu: DiscreteMeasure = _two_atoms()

    def gauge(x: float) -> complex:
        return 1.0 + 1j * x

    back: DiscreteMeasure = measures.gauge_unscale(
        measures.gauge_rescale(mu, gauge), gauge
    )
    return float(np.max(np.abs(back.weights / mu.weights - 1))), 1e-14


@_check(Suite.MEASURES, "JSON round trip")
def _json_round_trip() -> tuple[float, float]:
    mu: DiscreteMeasure = measures.add_point_mass(_two_atoms(), 1 / 3, math.pi)
    return _flag(measures.from_json(measures.to_json(mu)) == mu)


@_check(Suite.MEASURES, "Cauchy transform is Herglotz")
def _herglotz() -> tuple[float, float]:
    mu: DiscreteMeasure = measures.add_point_mass(_two_atoms(), 0.1, 2.0)
    rng: np.random.Generator = np.random.default_rng(_SEED)
    z: NDArray[np.complex128] = rng.uniform(-3, 3, 50) + 1j * rng.uniform(1e-3, 3, 50)
    worst: float = max(
        -measures.cauchy_transform(mu, complex(point)).value.imag for point in z
    )
    return max(0.0, worst), 0.0


##########
# jacobi
##########


@_check(Suite.JACOBI, "Wronskian")
def _wronskian() -> tuple[float, float]:
    matrix: JacobiMatrix = reference_matrix()
    n: int = 60
    values: jacobi.PolynomialValues = jacobi.eval_polys(
        matrix, 0.3 + 0.7j, n, precision=HIGH_PRECISION
    )
    _, b = matrix.mp_coefficients(n, HIGH_PRECISION)
    p, q = values.p, values.q
    with workprec(HIGH_PRECISION):
        worst: Any = max(
            abs(b[k] * (p[k + 1] * q[k] - p[k] * q[k + 1]) + 1) for k in range(n)
        )
    return float(worst), 1e-10


@_check(Suite.JACOBI, "classification")
def _classification() -> tuple[float, float]:
    return _flag(
        jacobi.classify(reference_matrix()) is jacobi.Classification.LIMIT_CIRCLE
    )


@_check(Suite.JACOBI, "AD−BC=1")
def _determinant() -> tuple[float, float]:
    matrix: JacobiMatrix = reference_matrix()
    rng: np.random.Generator = np.random.default_rng(_SEED)
    points: NDArray[np.float64] = rng.uniform(-2.0, 2.0, size=(20, 2))
    worst: float = 0.0
    for re, im in points:
        value: jacobi.NevanlinnaValue = jacobi.nevanlinna(matrix, complex(re, im))
        with workprec(HIGH_PRECISION):
            worst = max(worst, float(abs(value.determinant - 1)))
    return worst, 1e-18


@_check(Suite.JACOBI, "Weyl function vs extremal measure")
def _weyl_vs_measure() -> tuple[float, float]:
    matrix: JacobiMatrix = reference_matrix()
    z: complex = 1 + 1j
    mu: DiscreteMeasure = jacobi.extremal_measure(matrix, 0.0, (-1e4, 1e4))
    cauchy: measures.CauchyValue = measures.cauchy_transform(mu, z)
    weyl: complex = jacobi.weyl_function(matrix, 0.0, z)
    return abs(weyl - cauchy.value), cauchy.tail_bound + 1e-10


@_check(Suite.JACOBI, "iy·W(iy) → −1")
def _weyl_normalization() -> tuple[float, float]:
    y: float = 1e4
    return abs(1j * y * jacobi.weyl_function(reference_matrix(), 0.0, 1j * y) + 1), 1e-3


@_check(Suite.JACOBI, "extremal supports interlace")
def _extremal_interlacing() -> tuple[float, float]:
    matrix: JacobiMatrix = reference_matrix()
    window: tuple[float, float] = (-100.0, 100.0)
    first: list[float] = jacobi.extremal_measure(matrix, -1.0, window).points.tolist()
    second: list[float] = jacobi.extremal_measure(matrix, 1.0, window).points.tolist()
    return _flag(sturm.interlacing_check(first, second).interlaced)


@_check(Suite.JACOBI, "Stieltjes round trip")
def _stieltjes_round_trip() -> tuple[float, float]:
    atoms: list[tuple[float, float]] = [
        (-1.3, 0.1),
        (-0.2, 0.3),
        (0.4, 0.25),
        (1.1, 0.15),
        (2.5, 0.2),
    ]
    mu: DiscreteMeasure = DiscreteMeasure.from_atoms(atoms)
    matrix: JacobiMatrix = jacobi.stieltjes_reconstruct(mu, len(atoms))
    points: list[float] = jacobi.truncation_spectrum(matrix, len(atoms))
    weights: list[float] = jacobi.christoffel_weights(matrix, points, len(atoms))
    errors: list[float] = [
        max(abs(p - x), abs(v - w)) for (x, w), p, v in zip(atoms, points, weights)
    ]
    return max(errors), 1e-10


@_check(Suite.JACOBI, "truncations interlace")
def _truncation_interlacing() -> tuple[float, float]:
    matrix: JacobiMatrix = reference_matrix()
    return _flag(
        sturm.interlacing_check(
            jacobi.truncation_spectrum(matrix, 10),
            jacobi.truncation_spectrum(matrix, 11),
        ).interlaced
    )


@_check(Suite.JACOBI, "extremal moments vs ⟨δ₁, Jᵏδ₁⟩")
def _extremal_moments() -> tuple[float, float]:
    matrix: JacobiMatrix = reference_matrix()
    exact: list[float] = jacobi.moments_from_matrix(matrix, 6)
    worst: float = 0.0
    for t in (-1.0, 0.0, 1.0):
        mu: DiscreteMeasure = jacobi.extremal_measure(matrix, t, (-1e3, 1e3))
        for k in range(7):
            # odd moments vanish, so they are scaled by the next even one
            scale: float = exact[k + k % 2]
            worst = max(worst, abs(measures.moment(mu, k).value - exact[k]) / scale)
    return worst, 1e-6


##########
# debranges
##########


@_check(Suite.DEBRANGES, "Hermitian symmetry")
def _hermitian() -> tuple[float, float]:
    kernel: Kernel = Kernel.for_jacobi(reference_matrix())
    rng: np.random.Generator = np.random.default_rng(_SEED)
    z: NDArray[np.complex128] = rng.uniform(-3, 3, 12) + 1j * rng.uniform(-1, 1, 12)
    gram: NDArray[np.complex128] = kernel.matrix(z, z)
    return float(np.max(np.abs(gram - gram.conj().T)) / np.max(np.abs(gram))), 1e-12


@_check(Suite.DEBRANGES, "two-point update vs Gram oracle")
def _two_point_update() -> tuple[float, float]:
    kernel: Kernel = Kernel.for_jacobi(reference_matrix())
    lams: NDArray[np.float64] = np.array([0.3, -1.7])
    masses: NDArray[np.float64] = np.array([0.5, 2.0])
    z: NDArray[np.complex128] = np.array([0.1 + 0.2j, -0.8 + 0.0j, 2.0 - 1.0j])
    stacked: Kernel = kernel.perturbed(lams[0], masses[0]).perturbed(lams[1], masses[1])
    cross: NDArray[np.complex128] = kernel.matrix(z, lams)
    inner: NDArray[np.complex128] = np.diag(1 / masses) + kernel.matrix(lams, lams)
    oracle: NDArray[np.complex128] = kernel.matrix(z, z) - cross @ np.linalg.solve(
        inner, cross.conj().T
    )
    return float(np.max(np.abs(stacked.matrix(z, z) - oracle))), 1e-10


@_check(Suite.DEBRANGES, "density defect 1/(1+π)")
def _defect_value() -> tuple[float, float]:
    kernel: Kernel = Kernel.for_sturm(free_problem())
    return abs(debranges.density_defect(kernel, 0.0, 1.0) - 1 / (1 + math.pi)), 1e-10


@_check(Suite.DEBRANGES, "defect vs least squares")
def _defect_least_squares() -> tuple[float, float]:
    kernel: Kernel = Kernel.for_sturm(free_problem())
    sections: list[float] = [0.0, *np.linspace(-2.0, 60.0, 40).tolist()]
    worst: float = 0.0
    for lam, a in ((0.0, 1.0), (3.0, 0.5)):
        sections[0] = lam
        exact: float = debranges.density_defect(kernel, lam, a)
        brute: float = debranges.defect_least_squares(kernel, lam, a, sections)
        worst = max(worst, abs(exact - brute))
    return worst, 1e-6


@_check(Suite.DEBRANGES, "spectral measure is extremal")
def _rho_extremal() -> tuple[float, float]:
    problem: SchrodingerProblem = free_problem()
    report: debranges.ExtremalityReport = debranges.is_extremal(
        sturm.spectral_measure(problem, 20), Kernel.for_sturm(problem)
    )
    return _flag(report.verdict is Verdict.EXTREMAL)


@_check(Suite.DEBRANGES, "scaled measure is not extremal")
def _scaled_not_extremal() -> tuple[float, float]:
    problem: SchrodingerProblem = free_problem()
    report: debranges.ExtremalityReport = debranges.is_extremal(
        sturm.spectral_measure(problem, 20).scaled(2.0), Kernel.for_sturm(problem)
    )
    return _flag(report.verdict is Verdict.NON_EXTREMAL)


@_check(Suite.DEBRANGES, "point-mass gap 1/k(λ,λ)")
def _point_mass_gap() -> tuple[float, float]:
    problem: SchrodingerProblem = free_problem()
    kernel: Kernel = Kernel.for_sturm(problem)
    lam: float = 0.0
    a: float = 1.0
    mu: DiscreteMeasure = measures.add_point_mass(
        sturm.spectral_measure(problem, 20), lam, a
    )
    report: debranges.ExtremalityReport = debranges.is_extremal(
        mu, kernel.perturbed(lam, a)
    )
    gap: float = next(atom.gap for atom in report.atoms if atom.point == lam)
    expected: float = 1 / float(kernel.diagonal([lam])[0])
    if report.verdict is not Verdict.NON_EXTREMAL:
        return math.inf, 1e-8
    return abs(gap - expected) / expected, 1e-8


##########
# sturm
##########


@_check(Suite.STURM, "free eigenvalues")
def _free_eigenvalues() -> tuple[float, float]:
    eigs: list[float] = sturm.eigenvalues(free_problem(), 50)
    return max(abs(x / (n - 0.5) ** 2 - 1) for n, x in enumerate(eigs, 1)), 1e-10


@_check(Suite.STURM, "Parseval")
def _parseval() -> tuple[float, float]:
    count: int = 400
    total: float = sturm.parseval_sum(
        free_problem(), Profile.constant_profile(1.0), count
    )
    # Σ_{n>N} (2/π)/(n − ½)² < (2/π)/(N − ½)
    return abs(total - math.pi), 2 / (math.pi * (count - 0.5)) + 1e-8


@_check(Suite.STURM, "interlacing")
def _interlacing() -> tuple[float, float]:
    problem: SchrodingerProblem = SchrodingerProblem(
        b=math.pi, q=Profile.from_expr("sin(x)"), gamma=0.3
    )
    first: list[float] = sturm.eigenvalues(problem, 30)
    second: list[float] = sturm.eigenvalues(problem.with_gamma(1.2), 30)
    return _flag(sturm.interlacing_check(first, second).interlaced)


@_check(Suite.STURM, "jump fidelity")
def _jump_fidelity() -> tuple[float, float]:
    x0: float = math.pi / 2
    mass: float = 1.0
    problem: SchrodingerProblem = SchrodingerProblem(b=math.pi, atoms=((x0, mass),))
    k: NDArray[np.float64] = np.sqrt(np.asarray(sturm.eigenvalues(problem, 20)))
    u: NDArray[np.float64] = np.cos(k * x0)
    p: NDArray[np.float64] = -k * np.sin(k * x0) + mass * u
    tail: float = math.pi - x0
    at_b: NDArray[np.float64] = u * np.cos(k * tail) + p * np.sin(k * tail) / k
    return float(np.max(np.abs(at_b))), 1e-8


@_check(Suite.STURM, "K_v rank one")
def _kv_rank_one() -> tuple[float, float]:
    s: float = 0.7
    lam: float = 2.0
    table: sturm.KvTable = sturm.kv_apply(s, lam, math.pi, Profile.from_expr("x"))
    return sturm.kv_rank_one_residual(table, s, lam), 1e-10


@_check(Suite.STURM, "eigenvalue count in [0, Λ]")
def _eigenvalue_count() -> tuple[float, float]:
    problem: SchrodingerProblem = free_problem()
    bound: float = 1e4
    found: int = len(sturm.eigenvalues(problem, window=(0.0, bound)))
    return abs(found - math.floor(math.sqrt(bound) * problem.b / math.pi)), 2.0


@_check(Suite.STURM, "spectral measures extremal for three γ")
def _extremal_for_gammas() -> tuple[float, float]:
    failures: int = 0
    for gamma in (0.0, math.pi / 4, math.pi / 2):
        problem: SchrodingerProblem = free_problem(gamma)
        report: debranges.ExtremalityReport = debranges.is_extremal(
            sturm.spectral_measure(problem, 20), Kernel.for_sturm(problem)
        )
        failures += int(report.verdict is not Verdict.EXTREMAL)
    return float(failures), 0.0


##########
# bessel
##########


@_check(Suite.BESSEL, "ν=½ eigenvalues n²")
def _half_order() -> tuple[float, float]:
    eigs: list[float] = bessel.eigenvalues_bessel(BesselProblem(nu=0.5, b=math.pi), 30)
    return max(abs(x / n**2 - 1) for n, x in enumerate(eigs, 1)), 1e-10


@_check(Suite.BESSEL, "ν=½ matches sturm Dirichlet")
def _half_order_dirichlet() -> tuple[float, float]:
    count: int = 10
    first: DiscreteMeasure = bessel.spectral_measure_bessel(
        BesselProblem(nu=0.5, b=math.pi), count
    )
    second: DiscreteMeasure = sturm.spectral_measure(
        SchrodingerProblem(b=math.pi, dirichlet_at_zero=True), count
    )
    return float(np.max(np.abs(first.weights / second.weights - 1))), 1e-8


def _kappa_error(nu: float, gamma: float) -> tuple[float, float]:
    problem: BesselProblem = BesselProblem(nu=nu, b=math.pi, gamma=gamma)
    fit: bessel.KappaFit = bessel.kappa_fit(
        bessel.eigenvalues_bessel(problem, 100),
        problem.b,
        start=bessel.enumeration_start(gamma),
    )
    return abs(fit.kappa - bessel.kappa_nu(nu, gamma)), 1e-2


@_check(Suite.BESSEL, "κ at γ=0")
def _kappa_dirichlet() -> tuple[float, float]:
    return _kappa_error(1.0, 0.0)


@_check(Suite.BESSEL, "κ at γ=π/2")
def _kappa_neumann() -> tuple[float, float]:
    return _kappa_error(1.0, math.pi / 2)


@_check(Suite.BESSEL, "κ at γ=π/4, ν=½")
def _kappa_robin_half() -> tuple[float, float]:
    return _kappa_error(0.5, math.pi / 4)


@_check(Suite.BESSEL, "κ at γ=π/4, ν=1")
def _kappa_robin_one() -> tuple[float, float]:
    return _kappa_error(1.0, math.pi / 4)


@_check(Suite.BESSEL, "κ at γ=π/4, ν=2")
def _kappa_robin_two() -> tuple[float, float]:
    return _kappa_error(2.0, math.pi / 4)


@_check(Suite.BESSEL, "supports interlace")
def _bessel_interlacing() -> tuple[float, float]:
    problem: BesselProblem = BesselProblem(nu=1.0, b=math.pi)
    return _flag(
        sturm.interlacing_check(
            bessel.eigenvalues_bessel(problem, 30),
            bessel.eigenvalues_bessel(problem.with_gamma(math.pi / 4), 30),
        ).interlaced
    )


@_check(Suite.BESSEL, "removal shifts κ by +1")
def _nu_shift() -> tuple[float, float]:
    report: bessel.NuShiftReport = bessel.nu_shift_check(
        BesselProblem(nu=1.0, b=math.pi), 100, remove=True
    )
    return abs(report.shift - 1), report.tolerance


@_check(Suite.BESSEL, "relabeled prepend shifts κ by +1")
def _nu_shift_relabeled() -> tuple[float, float]:
    report: bessel.NuShiftReport = bessel.nu_shift_check(
        BesselProblem(nu=0.5, b=math.pi), 100, 0.5, relabel=True
    )
    return abs(report.shift - 1), report.tolerance


@_check(Suite.BESSEL, "residual growth exponent")
def _growth() -> tuple[float, float]:
    problem: BesselProblem = BesselProblem(nu=2.0, b=math.pi)
    fit: bessel.KappaFit = bessel.kappa_fit(
        bessel.eigenvalues_bessel(problem, 100), problem.b
    )
    return max(0.0, fit.growth_exponent), 0.6


##########
# Running
##########


def _expand(suite: Suite) -> list[Suite]:
    if suite is Suite.ALL:
        return [s for s in Suite if s is not Suite.ALL]
    return [suite]


def suite_names(suite: Suite) -> list[str]:
    """Return the names of the checks a suite runs."""

    return [name for s in _expand(suite) for name, _ in _CHECKS[s]]


def run_suite(suite: Suite) -> list[CheckResult]:
    """
    Run a suite, or every suite for `Suite.ALL`.

    Args:
        suite (Suite): The suite.

    Returns:
        list[CheckResult]: One row per check, in registration order.
    """

    results: list[CheckResult] = []
    for current in _expand(suite):
        for name, func in _CHECKS[current]:
            try:
                error, tolerance = func()
            except KreinLabError as e:
                logging.error(  # noqa: TRY400
                    "%s/%s raised %s: %s", current.value, name, type(e).__name__, e
                )
                error, tolerance = math.inf, 0.0
            result: CheckResult = CheckResult(current, name, float(error), tolerance)
            logging.info(
                "%s/%s: error %.3e, tolerance %.3e",
                current.value,
                name,
                result.error,
                result.tolerance,
            )
            results.append(result)
    return results


def summary_table(results: list[CheckResult]) -> str:
    """Return the plain text summary printed by the verify verb."""

    return as_table(
        ["suite", "check", "error", "tolerance", "result"],
        [
            [
                r.suite.value,
                r.name,
                as_error(r.error),
                as_error(r.tolerance),
                "pass" if r.passed else "FAIL",
            ]
            for r in results
        ],
    )


def summary_json(results: list[CheckResult]) -> dict[str, Any]:
    """Return the JSON form of a verification summary."""

    return {
        "passed": all(r.passed for r in results),
        "checks": [
            {
                "suite": r.suite.value,
                "check": r.name,
                "error": r.error if math.isfinite(r.error) else None,
                "tolerance": r.tolerance,
                "passed": r.passed,
            }
            for r in results
        ],
    }


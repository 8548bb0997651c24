"""
Bessel operators −d²/dx² + (ν² − ¼)/x² + q on (0, b], ν > 0.

When q = 0 the regular solution is normalized as

    ξ(z, x) = x^{ν+½}·₀F₁(; ν+1; −zx²/4),

which is proportional to z^{−ν/2}·√x·J_ν(√z·x). With a potential, ξ is shot from
x₀ = b·1e−6 with the q = 0 solution as Frobenius data.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Any, Final

import numpy as np
from scipy.special import hyp0f1, jv  # pyright: ignore[reportUnknownVariableType]

from ._errors import DomainError
from ._expressions import Profile
from ._quadrature import integrate
from .measures import DiscreteMeasure
from .sturm import (
    ODE_METHOD,
    ShootBatch,
    ShootingEngine,
    boundary_function,
    scan_eigenvalues,
)

if TYPE_CHECKING:
    from collections.abc import Sequence

    from numpy.typing import ArrayLike, NDArray

START_OFFSET: Final[float] = 1e-6
MIN_KAPPA_POINTS: Final[int] = 30
INTEGRABILITY_DEPTHS: Final[tuple[float, ...]] = (5.0, 10.0, 20.0, 40.0)
INTEGRABILITY_RTOL: Final[float] = 1e-6


def bessel_j(nu: float, x: ArrayLike) -> NDArray[np.float64]:
    """
    Return J_ν(x) for x ≥ 0.

    Raises:
        DomainError: If some x is negative.
    """

    xx: NDArray[np.float64] = np.asarray(x, dtype=np.float64)
    if np.any(xx < 0):
        error_msg = "bessel_j is defined here for x >= 0 only"
        raise DomainError(error_msg)
    return np.asarray(jv(nu, xx), dtype=np.float64)


def _regular(
    nu: float, z: NDArray[np.complex128], x: NDArray[np.float64]
) -> tuple[
    NDArray[np.complex128],
    NDArray[np.complex128],
    NDArray[np.complex128],
    NDArray[np.complex128],
]:
    """Return ξ, ξ', ∂_z ξ and ∂_z ξ' of the q = 0 solution, broadcast on (z, x)."""

    c: float = nu + 1.0
    w: NDArray[np.complex128] = -z * x * x / 4
    f0: NDArray[np.complex128] = hyp0f1(c, w)
    f1: NDArray[np.complex128] = hyp0f1(c + 1, w)
    f2: NDArray[np.complex128] = hyp0f1(c + 2, w)
    xp: NDArray[np.float64] = x ** (nu + 0.5)
    xm: NDArray[np.float64] = x ** (nu - 0.5)
    x2: NDArray[np.float64] = x * x
    u: NDArray[np.complex128] = xp * f0
    du: NDArray[np.complex128] = xm * ((nu + 0.5) * f0 - z * x2 * f1 / (2 * c))
    dz_u: NDArray[np.complex128] = -xp * x2 * f1 / (4 * c)
    dz_du: NDArray[np.complex128] = xm * (
        -(nu + 0.5) * x2 * f1 / (4 * c)
        - x2 * f1 / (2 * c)
        + z * x2 * x2 * f2 / (8 * c * (c + 1))
    )
    return u, du, dz_u, dz_du


@dataclass(frozen=True)
class IntegrabilityReport:
    """Numerical evidence for the integrability conditions on q."""

    weighted_integral: float
    """∫_0^b x·|q(x)| dx at the deepest cut-off."""

    weighted_finite: bool
    """Whether the weighted integral settled as the cut-off approached 0."""

    square_integral: float
    """∫_0^b |q(x)|² dx at the deepest cut-off, recorded for the r > 2 hypothesis."""

    square_finite: bool
    """Whether the square integral settled."""


def _settles(values: Sequence[float]) -> bool:
    last, previous = values[-1], values[-2]
    return math.isfinite(last) and abs(last - previous) <= INTEGRABILITY_RTOL * (
        1 + abs(last)
    )


def weighted_integrability(q: Profile, b: float) -> IntegrabilityReport:
    """
    Estimate ∫ x|q| and ∫ |q|² over (0, b] with cut-offs b·e^{−T} for growing T.

    The substitution x = b·e^{−t} turns the singular end into a long smooth tail. The
    two integrals are computed separately, so that a divergent one cannot hide the
    other.
    """

    def cut_integral(depth: float, *, square: bool) -> float:
        def integrand(t: NDArray[np.float64]) -> NDArray[np.complex128]:
            x: NDArray[np.float64] = b * np.exp(-t)
            values: NDArray[np.float64] = np.abs(q(x))
            weighted: NDArray[np.float64] = (
                x * values * values if square else x * x * values
            )
            return weighted[None, :].astype(np.complex128)

        try:
            return float(integrate(integrand, 0.0, depth, tol=1e-9).value[0].real)
        except ArithmeticError:
            return math.inf

    weighted: list[float] = [
        cut_integral(depth, square=False) for depth in INTEGRABILITY_DEPTHS
    ]
    square: list[float] = [
        cut_integral(depth, square=True) for depth in INTEGRABILITY_DEPTHS
    ]
    report = IntegrabilityReport(
        weighted[-1], _settles(weighted), square[-1], _settles(square)
    )
    logging.debug("Integrability of q on (0, %g]: %s", b, report)
    return report


@dataclass(frozen=True)
class BesselProblem:
    """A Bessel operator on (0, b] and its boundary parameter γ at b."""

    class InvalidProblemError(DomainError):
        """The problem data violate their invariants."""

        def __init__(self, reason: str) -> None:
            """
            Initialize the exception.

            Args:
                reason: The violated invariant.
            """

            super().__init__(f"invalid Bessel problem: {reason}")

    nu: float
    """The order ν > 0."""

    b: float
    """Right endpoint."""

    gamma: float = 0.0
    """The boundary parameter at b, in [0, π)."""

    q: Profile = field(default_factory=lambda: Profile.constant_profile(0.0))
    """The regular part of the potential."""

    shooting: bool = False
    """Shoot even when q = 0 (cross-validation of the closed form)."""

    method: str = ODE_METHOD
    """Stepper used by the shooting path."""

    def __post_init__(self) -> None:
        if not self.nu > 0:
            raise BesselProblem.InvalidProblemError(f"nu = {self.nu} is not > 0")
        if not self.b > 0:
            raise BesselProblem.InvalidProblemError(f"b = {self.b} is not > 0")
        if not 0 <= self.gamma < math.pi:
            raise BesselProblem.InvalidProblemError(
                f"gamma = {self.gamma} is outside [0, pi)"
            )
        if (
            self.q.constant is None
            and not weighted_integrability(self.q, self.b).weighted_finite
        ):
            raise BesselProblem.InvalidProblemError("x*q(x) is not integrable near 0")

    @classmethod
    def from_config(cls, config: dict[str, Any]) -> BesselProblem:
        """
        Build a problem from `{"nu", "b", "gamma", "q"}`.

        Raises:
            BesselProblem.InvalidProblemError: If a key is missing or malformed.
        """

        try:
            return cls(
                nu=float(config["nu"]),
                b=float(config["b"]),
                gamma=float(config.get("gamma", 0.0)),
                q=Profile.from_config(config.get("q")),
            )
        except DomainError:
            raise
        except (KeyError, TypeError, ValueError) as e:
            raise BesselProblem.InvalidProblemError(str(e)) from e

    def save_config(self) -> dict[str, Any]:
        """Return the problem-file form."""

        return {
            "nu": self.nu,
            "b": self.b,
            "gamma": self.gamma,
            "q": self.q.save_config(),
        }

    def with_gamma(self, gamma: float) -> BesselProblem:
        """Return the same operator with another boundary parameter."""

        return replace(self, gamma=gamma)

    @property
    def analytic(self) -> bool:
        """Whether the closed form applies."""

        return self.q.constant == 0 and not self.shooting

    @property
    def start(self) -> float:
        """The shooting start x₀."""

        return self.b * START_OFFSET

    @property
    def breakpoints(self) -> tuple[float, ...]:
        """Potential kinks inside (0, b)."""

        return tuple(x for x in self.q.breakpoints if 0 < x < self.b)

    def engine(self, start: float | None = None) -> ShootingEngine:
        """Return the shooting engine from `start` (default x₀) to b."""

        coefficient: float = self.nu * self.nu - 0.25
        profile: Profile = self.q

        def potential(x: float) -> float:
            return coefficient / (x * x) + float(profile(x))

        return ShootingEngine(
            start=self.start if start is None else start,
            end=self.b,
            constant=None,
            potential=potential,
            method=self.method,
            breakpoints=self.breakpoints,
        )

    def shoot(
        self,
        z: ArrayLike,
        *,
        norm: bool = False,
        nodes: NDArray[np.float64] | None = None,
        start: float | None = None,
    ) -> ShootBatch:
        """
        Return ξ(z, b), ξ'(z, b) and optionally the squared norm and a profile.

        Raises:
            StiffnessError: If the shooting path fails near x₀.
        """

        zz: NDArray[np.complex128] = np.atleast_1d(np.asarray(z, dtype=np.complex128))
        if self.analytic:
            return self._closed_form(zz, norm=norm, nodes=nodes)

        x0: float = self.start if start is None else start
        u0, p0, _, _ = _regular(self.nu, zz, np.array(x0))
        inner: NDArray[np.float64] | None = None
        if nodes is not None:
            inner = nodes[nodes >= x0]
        batch: ShootBatch = self.engine(x0).run(zz, u0, p0, norm=norm, nodes=inner)
        head: float = x0 ** (2 * self.nu + 2) / (2 * self.nu + 2)
        norm_sq: NDArray[np.complex128] | None = (
            batch.norm_sq + head if batch.norm_sq is not None else None
        )
        profile: NDArray[np.complex128] | None = None
        profile_deriv: NDArray[np.complex128] | None = None
        if nodes is not None and batch.profile is not None:
            near: NDArray[np.float64] = nodes[nodes < x0]
            u, du, _, _ = _regular(self.nu, zz[:, None], near[None, :])
            profile = np.concatenate([u, batch.profile], axis=1)
            profile_deriv = np.concatenate([du, batch.profile_deriv], axis=1)  # pyright: ignore[reportArgumentType]
        return ShootBatch(
            batch.value, batch.deriv, norm_sq, batch.steps, profile, profile_deriv
        )

    def _closed_form(
        self,
        z: NDArray[np.complex128],
        *,
        norm: bool,
        nodes: NDArray[np.float64] | None,
    ) -> ShootBatch:
        u, du, dz_u, dz_du = _regular(self.nu, z, np.array(self.b))
        profile: NDArray[np.complex128] | None = None
        profile_deriv: NDArray[np.complex128] | None = None
        if nodes is not None:
            profile, profile_deriv, _, _ = _regular(self.nu, z[:, None], nodes[None, :])
        # ∫_0^b ξ² = ∂_zξ·ξ' − ∂_zξ'·ξ at b; the term at 0 vanishes for ν > 0
        norm_sq: NDArray[np.complex128] | None = dz_u * du - dz_du * u if norm else None
        return ShootBatch(u, du, norm_sq, 0, profile, profile_deriv)

    def lower_bound(self) -> float:
        """Return a value below every eigenvalue of the γ-extension."""

        sample: NDArray[np.float64] = np.linspace(self.start, self.b, 1025)
        q_min: float = float(np.min(self.q(sample)))
        robin: float = 0.0
        if self.gamma not in (0.0, math.pi / 2):
            robin = abs(1.0 / math.tan(self.gamma))
        return min(0.0, q_min) - (robin + 1.0 / self.b) ** 2 - 1.0

    def upper_potential(self) -> float:
        """Return max(0, max q) on a sample grid."""

        sample: NDArray[np.float64] = np.linspace(self.start, self.b, 1025)
        return max(0.0, float(np.max(self.q(sample))))


def eigenvalues_bessel(
    problem: BesselProblem,
    count: int | None = None,
    *,
    window: tuple[float, float] | None = None,
    jobs: int = 1,
) -> list[float]:
    """
    Return the lowest `count` eigenvalues (or all in `window`) of the γ-extension.

    Raises:
        DomainError: If neither `count` nor `window` is valid.
        BracketCountError: If the grid scan does not stabilize.
        StiffnessError: If shooting from x₀ fails.
    """

    def shoot(lam: NDArray[np.float64]) -> ShootBatch:
        return problem.shoot(lam)

    roots: list[float] = scan_eigenvalues(
        boundary_function(shoot, problem.gamma),
        b=problem.b,
        lower=problem.lower_bound(),
        count=count,
        window=window,
        upper_shift=problem.upper_potential(),
        jobs=jobs,
    )
    logging.info(
        "Found %d Bessel eigenvalues (nu = %g, gamma = %g)",
        len(roots),
        problem.nu,
        problem.gamma,
    )
    return roots


def start_error(problem: BesselProblem, lam: float) -> float:
    """Return the relative change of ξ(λ, b) when x₀ is halved."""

    full: ShootBatch = problem.shoot([lam])
    half: ShootBatch = problem.shoot([lam], start=0.5 * problem.start)
    scale: float = max(abs(complex(full.value[0])), abs(complex(full.deriv[0])))
    return (
        max(
            abs(complex(full.value[0] - half.value[0])),
            abs(complex(full.deriv[0] - half.deriv[0])),
        )
        / scale
    )


def spectral_measure_bessel(
    problem: BesselProblem, count: int, *, jobs: int = 1
) -> DiscreteMeasure:
    """
    Return Σ δ_λ/‖ξ(·, λ)‖² over the lowest `count` eigenvalues.

    Raises:
        DomainError: If count < 1.
    """

    lams: list[float] = eigenvalues_bessel(problem, count + 1, jobs=jobs)
    if not problem.analytic:
        logging.debug(
            "Start offset error at the top eigenvalue: %.2e",
            start_error(problem, lams[count - 1]),
        )
    norms: NDArray[np.float64] = problem.shoot(lams[:count], norm=True).norm_sq.real  # pyright: ignore[reportOptionalMemberAccess]
    return DiscreteMeasure.from_atoms(
        zip(lams[:count], (1.0 / norms).tolist()),
        window=(min(problem.lower_bound(), lams[0]), 0.5 * (lams[-2] + lams[-1])),
        tail_flag=True,
    )


def extension_parameter(problem: BesselProblem, lam: float) -> float:
    """Return the γ ∈ [0, π) whose extension has λ as an eigenvalue."""

    batch: ShootBatch = problem.shoot([lam])
    return math.atan2(-batch.value[0].real, batch.deriv[0].real) % math.pi


def enumeration_start(gamma: float) -> int:
    """Return the index of the lowest eigenvalue in the κ_ν enumeration."""

    return 1 if gamma == 0 else 0


def kappa_nu(nu: float, gamma: float) -> float:
    """Return the asymptotic offset κ_ν of the γ-extension."""

    return (2 * nu - 1) / 4 if gamma == 0 else (2 * nu + 1) / 4


@dataclass(frozen=True)
class KappaFit:
    """κ̂ fitted from λ_n ≈ π²/b²·(n + κ)²."""

    kappa: float
    """Mean of (b/π)√λ_n − n over the tail half."""

    residuals: tuple[float, ...]
    """r_n = λ_n − π²/b²·(n + κ̂)², all n."""

    growth_exponent: float
    """Log-log slope of the running maximum of |r_n|."""


def kappa_fit(eigs: Sequence[float], b: float, *, start: int = 1) -> KappaFit:
    """
    Fit the offset κ of λ_n ≈ π²/b²·(n + κ)², n = start, start + 1, ...

    The growth exponent is fitted to the running maximum of |r_n| so that sign changes
    of the residual do not spoil the slope; residuals at rounding level are floored.

    Raises:
        DomainError: If fewer than 30 values are given or some value is negative.
    """

    if len(eigs) < MIN_KAPPA_POINTS:
        error_msg = f"kappa fit needs at least {MIN_KAPPA_POINTS} values"
        raise DomainError(error_msg)
    values: NDArray[np.float64] = np.asarray(eigs, dtype=np.float64)
    if np.any(values < 0):
        error_msg = "kappa fit needs non-negative eigenvalues"
        raise DomainError(error_msg)
    n: NDArray[np.float64] = np.arange(start, start + values.size, dtype=np.float64)
    tail: slice = slice(values.size // 2, None)
    kappa: float = float(np.mean(b / math.pi * np.sqrt(values[tail]) - n[tail]))
    residuals: NDArray[np.float64] = values - (math.pi / b) ** 2 * (n + kappa) ** 2

    floor: float = 1e-9 * float(values[-1])
    envelope: NDArray[np.float64] = np.maximum.accumulate(
        np.maximum(np.abs(residuals), floor)
    )
    usable: NDArray[np.bool_] = n > 0
    slope, _ = np.polyfit(np.log(n[usable]), np.log(envelope[usable]), 1)
    return KappaFit(kappa, tuple(residuals.tolist()), float(slope))


@dataclass(frozen=True)
class NuShiftReport:
    """κ̂ of a spectrum before and after adding (or removing) its lowest point."""

    kappa_before: float
    """κ̂ of the original spectrum."""

    kappa_after: float
    """κ̂ of the modified spectrum, enumerated from `start`."""

    shift: float
    """kappa_after − kappa_before."""

    implied_nu: float
    """The order whose κ matches kappa_after."""

    consistent: bool
    """Whether the shift is the expected ±1 within the tolerance."""

    tolerance: float
    """The tolerance used."""

    residual_exponent: float
    """Growth exponent of the modified fit."""

    start: int
    """Index of the first value of the modified spectrum."""


def nu_shift_check(
    problem: BesselProblem,
    count: int,
    lam0: float | None = None,
    *,
    remove: bool = False,
    relabel: bool = False,
    tol: float = 1e-2,
) -> NuShiftReport:
    """
    Refit κ after prepending λ₀ to, or removing λ_1 from, the spectrum.

    With the enumeration kept, prepending moves every eigenvalue one index up, so κ̂
    drops by one and the spectrum reads as order ν − 2; removing raises κ̂ by one
    (order ν + 2). With `relabel`, the modified spectrum is enumerated from two indices
    lower after prepending (two higher after removing): prepending then raises κ̂ by
    one, which is the order ν + 2 reading, and removing lowers it by one.

    Raises:
        DomainError: If λ₀ is missing or not below the spectrum when prepending.
    """

    eigs: list[float] = eigenvalues_bessel(problem, count)
    first: int = enumeration_start(problem.gamma)
    before: KappaFit = kappa_fit(eigs, problem.b, start=first)
    if remove:
        modified: list[float] = eigs[1:]
        expected: float = 1.0
        offset: int = 2
    else:
        if lam0 is None or not lam0 < eigs[0]:
            error_msg = f"lambda0 = {lam0} must lie below the spectrum ({eigs[0]})"
            raise DomainError(error_msg)
        modified = [lam0, *eigs]
        expected = -1.0
        offset = -2
    start: int = first + offset if relabel else first
    if relabel:
        expected = -expected
    after: KappaFit = kappa_fit(modified, problem.b, start=start)
    shift: float = after.kappa - before.kappa
    return NuShiftReport(
        kappa_before=before.kappa,
        kappa_after=after.kappa,
        shift=shift,
        implied_nu=problem.nu + 2 * shift,
        consistent=abs(shift - expected) <= tol,
        tolerance=tol,
        residual_exponent=after.growth_exponent,
        start=start,
    )

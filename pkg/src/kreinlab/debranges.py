"""
Reproducing kernels of the de Branges spaces attached to each backend.

Kernels are antilinear in the second argument: k(z, w) = Σ P_k(z)·conj(P_k(w)) for a
Jacobi matrix and k(z, w) = ∫ ξ(z, x)·conj(ξ(w, x)) dx for the differential backends.
A kernel carries a stack of rank-one perturbations ⟨g, f⟩ + a·conj(g(λ))·f(λ).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Any, Final, Protocol, Union

import numpy as np
from scipy import linalg  # pyright: ignore[reportUnknownVariableType]

from . import bessel, jacobi, sturm
from ._errors import DomainError, ResolutionError
from ._quadrature import ABS_TOL, integrate
from .measures import DiscreteMeasure

if TYPE_CHECKING:
    from collections.abc import Sequence

    from numpy.typing import ArrayLike, NDArray

    from .sturm import ShootBatch

NEAR_DIAGONAL: Final[float] = 1e-3

BESSEL_GRADING: Final[int] = 40
EXTREMAL_TOL: Final[float] = 1e-8
SUPPORT_MATCH: Final[float] = 1e-7
PARAMETER_MATCH: Final[float] = 1e-6

Parameter = Union[float, None]


class Verdict(Enum):
    """Outcomes of an extremality check."""

    EXTREMAL = "Extremal"
    NON_EXTREMAL = "NonExtremal"
    INCONCLUSIVE = "Inconclusive"


##########
# Backends
##########


class KernelBackend(Protocol):
    """What a kernel needs from an operator family."""

    @property
    def name(self) -> str:
        """Backend name: jacobi, sturm or bessel."""
        ...

    def base_matrix(
        self, zs: NDArray[np.complex128], ws: NDArray[np.complex128]
    ) -> NDArray[np.complex128]:
        """Return k(z_i, w_j)."""
        ...

    def base_diagonal(self, points: NDArray[np.complex128]) -> NDArray[np.float64]:
        """Return k(z, z)."""
        ...

    def extension_parameter(self, lam: float) -> Parameter:
        """Return the extension whose spectrum contains λ."""
        ...

    def spectrum(
        self, parameter: Parameter, window: tuple[float, float]
    ) -> list[float]:
        """Return the spectrum of an extension inside a window."""
        ...

    def same_parameter(self, first: Parameter, second: Parameter) -> bool:
        """Tell whether two extension parameters coincide."""
        ...


@dataclass(frozen=True)
class JacobiBackend:
    """Polynomial kernels of a Jacobi matrix."""

    matrix: jacobi.JacobiMatrix
    """The matrix."""

    trunc: int | None = None
    """Highest polynomial degree in the sums; chosen per call when None."""

    @property
    def name(self) -> str:
        """Backend name."""

        return "jacobi"

    def _degree(self, points: NDArray[np.complex128]) -> int:
        if self.matrix.size is not None:
            return self.matrix.size - 1
        if self.trunc is not None:
            return self.trunc
        if self.matrix.classification() is not jacobi.Classification.LIMIT_CIRCLE:
            error_msg = "an infinite matrix that is not limit circle needs a truncation"
            raise DomainError(error_msg)
        reach: float = float(np.max(np.abs(points), initial=1.0))
        value: jacobi.NevanlinnaValue = jacobi.nevanlinna(
            self.matrix, complex(reach), check=False
        )
        return value.trunc + 8

    def base_matrix(
        self, zs: NDArray[np.complex128], ws: NDArray[np.complex128]
    ) -> NDArray[np.complex128]:
        """Return Σ_k P_k(z_i)·conj(P_k(w_j))."""

        degree: int = self._degree(np.concatenate([zs, ws]))
        left: NDArray[np.complex128] = jacobi.poly_table(self.matrix, zs, degree)
        right: NDArray[np.complex128] = jacobi.poly_table(self.matrix, ws, degree)
        return left.T @ right.conj()

    def base_diagonal(self, points: NDArray[np.complex128]) -> NDArray[np.float64]:
        """Return Σ_k |P_k(z)|²."""

        degree: int = self._degree(points)
        table: NDArray[np.complex128] = jacobi.poly_table(self.matrix, points, degree)
        return np.sum(np.abs(table) ** 2, axis=0)

    def extension_parameter(self, lam: float) -> Parameter:
        """Return t = D(λ)/B(λ), None for ∞; 0 for a finite matrix."""

        if self.matrix.size is not None:
            return 0.0
        return jacobi.extension_parameter(self.matrix, lam)

    def spectrum(
        self, parameter: Parameter, window: tuple[float, float]
    ) -> list[float]:
        """Return the atoms of μ_t in the window (the matrix spectrum when finite)."""

        lo, hi = window
        if self.matrix.size is not None:
            eigs: list[float] = jacobi.truncation_spectrum(
                self.matrix, self.matrix.size
            )
            return [x for x in eigs if lo <= x <= hi]
        return jacobi.extremal_measure(self.matrix, parameter, window).points.tolist()

    def same_parameter(self, first: Parameter, second: Parameter) -> bool:
        """Compare two values of t ∈ ℝ ∪ {∞}."""

        if first is None or second is None:
            return first is second
        return abs(first - second) <= PARAMETER_MATCH * (1 + abs(first))


ShootingProblem = Union[sturm.SchrodingerProblem, bessel.BesselProblem]


@dataclass(frozen=True)
class ShootingBackend:
    """Kernels of the Schrödinger and Bessel families, through their solutions ξ."""

    problem: ShootingProblem
    """The operator; its γ is ignored by the kernel."""

    tol: float = ABS_TOL
    """Absolute target of near-diagonal quadratures."""

    breakpoints: tuple[float, ...] = field(init=False)
    """Quadrature breakpoints, graded towards 0 for Bessel problems."""

    def __post_init__(self) -> None:
        cuts: set[float] = set(self.problem.breakpoints)
        if isinstance(self.problem, bessel.BesselProblem):
            cuts.update(self.problem.b * 2.0**-j for j in range(1, BESSEL_GRADING))
        object.__setattr__(self, "breakpoints", tuple(sorted(cuts)))

    @property
    def name(self) -> str:
        """Backend name."""

        return "bessel" if isinstance(self.problem, bessel.BesselProblem) else "sturm"

    def _shoot(self, z: NDArray[np.complex128], **kwargs: Any) -> ShootBatch:
        return self.problem.shoot(z, **kwargs)

    def _quadrature(
        self,
        zs: NDArray[np.complex128],
        ws: NDArray[np.complex128],
        pairs: tuple[NDArray[np.intp], NDArray[np.intp]],
    ) -> NDArray[np.complex128]:
        """Return ∫ ξ(z_i, x)·conj(ξ(w_j, x)) dx for the listed (i, j) pairs only."""

        rows, row_index = np.unique(pairs[0], return_inverse=True)
        cols, col_index = np.unique(pairs[1], return_inverse=True)

        def integrand(x: NDArray[np.float64]) -> NDArray[np.complex128]:
            left: NDArray[np.complex128] = self._shoot(zs[rows], nodes=x).profile  # pyright: ignore[reportAssignmentType]
            right: NDArray[np.complex128] = self._shoot(ws[cols], nodes=x).profile  # pyright: ignore[reportAssignmentType]
            return left[row_index] * right[col_index].conj()

        result = integrate(
            integrand, 0.0, self.problem.b, tol=self.tol, breakpoints=self.breakpoints
        )
        logging.debug(
            "Kernel quadrature of %d pairs on %d panels, error %.2e",
            row_index.size,
            result.panels,
            result.error,
        )
        return result.value

    def base_matrix(
        self, zs: NDArray[np.complex128], ws: NDArray[np.complex128]
    ) -> NDArray[np.complex128]:
        """
        Return ∫ ξ(z_i, x)·conj(ξ(w_j, x)) dx.

        Off the anti-diagonal the Lagrange identity gives
        (ξ(z, b)ξ'(w̄, b) − ξ'(z, b)ξ(w̄, b))/(z − w̄). On it, real points use the
        shooting norm and the remaining near pairs are integrated.
        """

        at_z: ShootBatch = self._shoot(zs)
        at_w: ShootBatch = self._shoot(ws)
        # ξ(w̄, ·) = conj(ξ(w, ·)) for real potentials
        numerator: NDArray[np.complex128] = (
            at_z.value[:, None] * at_w.deriv.conj()[None, :]
            - at_z.deriv[:, None] * at_w.value.conj()[None, :]
        )
        gap: NDArray[np.complex128] = zs[:, None] - ws.conj()[None, :]
        scale: NDArray[np.float64] = 1 + np.abs(zs)[:, None] + np.abs(ws)[None, :]
        near: NDArray[np.bool_] = np.abs(gap) < NEAR_DIAGONAL * scale
        with np.errstate(divide="ignore", invalid="ignore"):
            out: NDArray[np.complex128] = numerator / gap

        diagonal: NDArray[np.bool_] = (
            near & (zs[:, None] == ws[None, :]) & (zs.imag == 0)[:, None]
        )
        if np.any(diagonal):
            rows, cols = np.nonzero(diagonal)
            out[rows, cols] = self.base_diagonal(zs[rows])
        rest: NDArray[np.bool_] = near & ~diagonal
        if np.any(rest):
            rows, cols = np.nonzero(rest)
            out[rows, cols] = self._quadrature(zs, ws, (rows, cols))
        return out

    def base_diagonal(self, points: NDArray[np.complex128]) -> NDArray[np.float64]:
        """Return ‖ξ(z, ·)‖², from the shooting norm for real z."""

        out: NDArray[np.float64] = np.empty(points.size)
        real: NDArray[np.bool_] = points.imag == 0
        if np.any(real):
            out[real] = self._shoot(points[real], norm=True).norm_sq.real  # pyright: ignore[reportOptionalMemberAccess]
        for index in np.nonzero(~real)[0]:
            z: NDArray[np.complex128] = points[index : index + 1]
            out[index] = float(self.base_matrix(z, z)[0, 0].real)
        return out

    def extension_parameter(self, lam: float) -> Parameter:
        """Return the γ ∈ [0, π) whose extension has λ as an eigenvalue."""

        if isinstance(self.problem, bessel.BesselProblem):
            return bessel.extension_parameter(self.problem, lam)
        return sturm.extension_parameter(self.problem, lam)

    def spectrum(
        self, parameter: Parameter, window: tuple[float, float]
    ) -> list[float]:
        """Return the eigenvalues of the γ-extension in the window."""

        gamma: float = 0.0 if parameter is None else parameter
        if min(gamma, math.pi - gamma) <= PARAMETER_MATCH:
            gamma = 0.0
        if isinstance(self.problem, bessel.BesselProblem):
            return bessel.eigenvalues_bessel(
                self.problem.with_gamma(gamma), window=window
            )
        return sturm.eigenvalues(self.problem.with_gamma(gamma), window=window)

    def same_parameter(self, first: Parameter, second: Parameter) -> bool:
        """Compare two angles modulo π."""

        if first is None or second is None:
            return first is second
        distance: float = abs(first - second) % math.pi
        return min(distance, math.pi - distance) <= PARAMETER_MATCH


##########
# Kernel
##########


class Kernel:
    """A reproducing kernel with an ordered stack of rank-one perturbations."""

    class PerturbationError(DomainError):
        """A perturbation mass is not positive."""

        def __init__(self, a: float) -> None:
            """
            Initialize the exception.

            Args:
                a: The offending mass.
            """

            super().__init__(f"perturbation mass a = {a} must be > 0")

    def __init__(
        self,
        backend: KernelBackend,
        perturbations: tuple[tuple[float, float], ...] = (),
    ) -> None:
        """
        Initialize the kernel. Use `for_jacobi`, `for_sturm` or `for_bessel`.

        Args:
            backend: The operator family.
            perturbations: (λ, a) pairs at distinct real points, in application order.
        """

        self._backend: KernelBackend = backend
        self._perturbations: tuple[tuple[float, float], ...] = perturbations

    @classmethod
    def for_jacobi(
        cls, matrix: jacobi.JacobiMatrix, trunc: int | None = None
    ) -> Kernel:
        """Build the polynomial kernel of a Jacobi matrix, summed to degree `trunc`."""

        return cls(JacobiBackend(matrix, trunc))

    @classmethod
    def for_sturm(
        cls, problem: sturm.SchrodingerProblem, tol: float = ABS_TOL
    ) -> Kernel:
        """Build the kernel of a Schrödinger operator, quadratures to `tol`."""

        return cls(ShootingBackend(problem, tol))

    @classmethod
    def for_bessel(cls, problem: bessel.BesselProblem, tol: float = ABS_TOL) -> Kernel:
        """Build the kernel of a Bessel operator, quadratures to `tol`."""

        return cls(ShootingBackend(problem, tol))

    @property
    def backend(self) -> KernelBackend:
        """The operator family."""

        return self._backend

    @property
    def perturbations(self) -> tuple[tuple[float, float], ...]:
        """The rank-one updates, in application order."""

        return self._perturbations

    def __call__(self, z: complex, w: complex) -> complex:
        return complex(self.matrix([z], [w])[0, 0])

    def perturbed(self, lam: float, a: float) -> Kernel:
        """
        Return the kernel of ⟨g, f⟩ + a·conj(g(λ))·f(λ).

        A second update at an existing point adds to its mass.

        Raises:
            Kernel.PerturbationError: If a ≤ 0.
        """

        if not a > 0:
            raise Kernel.PerturbationError(a)
        stack: list[tuple[float, float]] = list(self._perturbations)
        for index, (point, mass) in enumerate(stack):
            if point == lam:
                stack[index] = (point, mass + a)
                return Kernel(self._backend, tuple(stack))
        return Kernel(self._backend, (*stack, (lam, a)))

    def matrix(self, zs: ArrayLike, ws: ArrayLike) -> NDArray[np.complex128]:
        """
        Return k(z_i, w_j) with every perturbation applied in stack order.

        Raises:
            QuadratureError: If a near-diagonal quadrature does not converge.
        """

        z: NDArray[np.complex128] = np.atleast_1d(np.asarray(zs, dtype=np.complex128))
        w: NDArray[np.complex128] = np.atleast_1d(np.asarray(ws, dtype=np.complex128))
        if not self._perturbations:
            return self._backend.base_matrix(z, w)
        points: NDArray[np.complex128] = np.array(
            [p for p, _ in self._perturbations], dtype=np.complex128
        )
        # The extended matrix carries the rows and columns every update needs.
        full: NDArray[np.complex128] = self._backend.base_matrix(
            np.concatenate([z, points]), np.concatenate([w, points])
        )
        for index, (_, a) in enumerate(self._perturbations):
            row: int = z.size + index
            col: int = w.size + index
            full = full - a * np.outer(full[:, col], full[row, :]) / (
                1 + a * full[row, col]
            )
        return full[: z.size, : w.size]

    def diagonal(self, points: ArrayLike) -> NDArray[np.float64]:
        """Return k(z, z) for many z."""

        x: NDArray[np.complex128] = np.atleast_1d(
            np.asarray(points, dtype=np.complex128)
        )
        diag: NDArray[np.float64] = self._backend.base_diagonal(x)
        if not self._perturbations:
            return diag
        lams: NDArray[np.complex128] = np.array(
            [p for p, _ in self._perturbations], dtype=np.complex128
        )
        cross: NDArray[np.complex128] = self._backend.base_matrix(x, lams)
        gram: NDArray[np.complex128] = self._backend.base_matrix(lams, lams)
        for index, (_, a) in enumerate(self._perturbations):
            denominator: complex = 1 + a * gram[index, index]
            diag = diag - a * np.abs(cross[:, index]) ** 2 / denominator.real
            cross = cross - a * np.outer(cross[:, index], gram[index, :]) / denominator
            gram = gram - a * np.outer(gram[:, index], gram[index, :]) / denominator
        return diag


def kernel_eval(kernel: Kernel, z: complex, w: complex) -> complex:
    """Return k(z, w)."""

    return kernel(z, w)


def perturb_kernel(kernel: Kernel, lam: float, a: float) -> Kernel:
    """
    Return k̃(z, w) = k(z, w) − a·k(z, λ)·k(λ, w)/(1 + a·k(λ, λ)).

    Raises:
        Kernel.PerturbationError: If a ≤ 0.
    """

    return kernel.perturbed(lam, a)


##########
# Interpolation
##########


@dataclass(frozen=True)
class InterpolationResult:
    """The value of the interpolation series."""

    value: complex
    """Σ_n k(z, λ_n)/k(λ_n, λ_n)·f(λ_n)."""

    residual: float
    """|full sum − sum over the first half of the samples|."""

    terms: int
    """Number of samples."""


def interpolate(
    kernel: Kernel,
    samples: Sequence[tuple[float, complex]],
    z: complex,
    *,
    check: bool = True,
) -> InterpolationResult:
    """
    Reconstruct f(z) from samples on the spectrum of one canonical extension.

    Args:
        kernel (Kernel): The kernel of the space containing f.
        samples (Sequence[tuple[float, complex]]): (λ_n, f(λ_n)) pairs.
        z (complex): The evaluation point.
        check (bool): Verify that the sample points share one extension.

    Raises:
        DomainError: If the samples are empty or lie on different extensions.

    Returns:
        InterpolationResult: The value and a truncation residual.
    """

    if not samples:
        error_msg = "interpolation needs at least one sample"
        raise DomainError(error_msg)
    points: NDArray[np.float64] = np.array([s[0] for s in samples], dtype=np.float64)
    values: NDArray[np.complex128] = np.array(
        [s[1] for s in samples], dtype=np.complex128
    )
    if check and not kernel.perturbations:
        parameters: list[Parameter] = [
            kernel.backend.extension_parameter(float(p)) for p in points
        ]
        for point, parameter in zip(points, parameters):
            if not kernel.backend.same_parameter(parameter, parameters[0]):
                error_msg = (
                    f"sample {point} lies on extension {parameter}, "
                    f"not on {parameters[0]}"
                )
                raise DomainError(error_msg)

    terms: NDArray[np.complex128] = (
        kernel.matrix([z], points)[0] / kernel.diagonal(points) * values
    )
    total: complex = complex(np.sum(terms))
    half: complex = complex(np.sum(terms[: max(1, terms.size // 2)]))
    return InterpolationResult(total, abs(total - half), terms.size)


##########
# Extremality and defects
##########


@dataclass(frozen=True)
class AtomCheck:
    """One atom compared with the extremal weight 1/k(λ, λ)."""

    point: float
    """The atom."""

    weight: float
    """Its weight in the tested measure."""

    expected: float
    """1/k(λ, λ)."""

    gap: float
    """expected − weight."""


@dataclass(frozen=True)
class ExtremalityReport:
    """Itemized outcome of an extremality check."""

    verdict: Verdict
    """The outcome."""

    window: tuple[float, float] | None
    """The window within which the support was compared."""

    atoms: tuple[AtomCheck, ...]
    """Per-atom weight comparison."""

    missing: tuple[float, ...] = ()
    """Eigenvalues of the matching extension absent from the measure."""

    extra: tuple[float, ...] = ()
    """Atoms of the measure off the matching extension's spectrum."""

    note: str = ""
    """Why the verdict is inconclusive, when it is."""

    def to_json(self) -> dict[str, Any]:
        """Return the report in its JSON form."""

        data: dict[str, Any] = {
            "verdict": self.verdict.value,
            "window": list(self.window) if self.window is not None else None,
            "atoms": [
                {
                    "point": atom.point,
                    "weight": atom.weight,
                    "expected": atom.expected,
                    "gap": atom.gap,
                }
                for atom in self.atoms
            ],
            "missing": list(self.missing),
            "extra": list(self.extra),
        }
        if self.note:
            data["note"] = self.note
        return data


def _unmatched(points: Sequence[float], reference: Sequence[float]) -> list[float]:
    return [
        p
        for p in points
        if not any(abs(p - r) <= SUPPORT_MATCH * (1 + abs(p)) for r in reference)
    ]


def _majority(backend: KernelBackend, points: Sequence[float]) -> Parameter:
    parameters: list[Parameter] = [backend.extension_parameter(p) for p in points]
    best: Parameter = parameters[0]
    best_votes: int = 0
    for candidate in parameters:
        votes: int = sum(backend.same_parameter(candidate, p) for p in parameters)
        if votes > best_votes:
            best, best_votes = candidate, votes
    return best


def is_extremal(
    mu: DiscreteMeasure, kernel: Kernel, tol: float = EXTREMAL_TOL
) -> ExtremalityReport:
    """
    Check that μ is ρ = Σ δ_λ/k(λ, λ) over the spectrum of one canonical extension.

    Weights are compared with 1/k(λ, λ) to `tol` relative. The support is compared with
    the eigenvalue scan, in μ's window, of the extension through the majority of atoms.
    Perturbed kernels have no backend extension to scan, so there a weight failure is
    decisive and otherwise the verdict is Inconclusive.

    Args:
        mu (DiscreteMeasure): The tested measure.
        kernel (Kernel): The kernel of the space.
        tol (float): Relative weight tolerance.

    Returns:
        ExtremalityReport: The verdict and its itemized reasons.
    """

    if len(mu) == 0:
        return ExtremalityReport(
            Verdict.INCONCLUSIVE, mu.window, (), note="the measure has no atoms"
        )
    expected: NDArray[np.float64] = 1.0 / kernel.diagonal(mu.points)
    atoms: tuple[AtomCheck, ...] = tuple(
        AtomCheck(float(p), float(w), float(e), float(e - w))
        for p, w, e in zip(mu.points, mu.weights, expected)
    )
    weights_match: bool = all(abs(a.gap) <= tol * abs(a.expected) for a in atoms)

    if kernel.perturbations:
        verdict: Verdict = (
            Verdict.INCONCLUSIVE if weights_match else Verdict.NON_EXTREMAL
        )
        return ExtremalityReport(
            verdict,
            mu.window,
            atoms,
            note="support not compared for a perturbed kernel" if weights_match else "",
        )

    try:
        parameter: Parameter = _majority(kernel.backend, mu.points.tolist())
        scanned: list[float] = kernel.backend.spectrum(parameter, mu.window)
    except (ResolutionError, DomainError) as e:
        logging.warning("Support comparison failed: %s", e)
        return ExtremalityReport(
            Verdict.INCONCLUSIVE if weights_match else Verdict.NON_EXTREMAL,
            mu.window,
            atoms,
            note=f"support scan failed: {e}",
        )
    missing: list[float] = _unmatched(scanned, mu.points.tolist())
    extra: list[float] = _unmatched(mu.points.tolist(), scanned)
    extremal: bool = weights_match and not missing and not extra
    logging.info(
        "Extremality: %d atoms, %d missing, %d extra, weights %s",
        len(mu),
        len(missing),
        len(extra),
        "match" if weights_match else "differ",
    )
    return ExtremalityReport(
        Verdict.EXTREMAL if extremal else Verdict.NON_EXTREMAL,
        mu.window,
        atoms,
        tuple(missing),
        tuple(extra),
    )


def density_defect(kernel: Kernel, lam: float, a: float) -> float:
    """
    Return a/(1 + a·k(λ, λ)), the squared L²(ρ + aδ_λ) distance from 1_{λ} to 𝓑.

    Raises:
        Kernel.PerturbationError: If a ≤ 0.
    """

    if not a > 0:
        raise Kernel.PerturbationError(a)
    diag: float = float(kernel.diagonal([lam])[0])
    return a / (1 + a * diag)


def defect_least_squares(
    kernel: Kernel, lam: float, a: float, sections: Sequence[float]
) -> float:
    """
    Minimize ‖f‖² + a·|f(λ) − 1|² over the span of the sections k(·, s_j).

    Args:
        kernel (Kernel): The kernel of the space.
        lam (float): The point of the added mass.
        a (float): The mass.
        sections (Sequence[float]): Real centers s_j of the sections.

    Raises:
        Kernel.PerturbationError: If a ≤ 0.

    Returns:
        float: The minimal value, an upper bound for the density defect.
    """

    if not a > 0:
        raise Kernel.PerturbationError(a)
    centers: NDArray[np.float64] = np.asarray(sections, dtype=np.float64)
    gram: NDArray[np.complex128] = kernel.matrix(centers, centers)
    gram = 0.5 * (gram + gram.conj().T)
    eigvals, eigvecs = linalg.eigh(gram)
    root: NDArray[np.complex128] = (
        np.sqrt(np.clip(eigvals, 0.0, None))[:, None] * eigvecs.conj().T
    )
    # f(λ) = Σ_j c_j k(λ, s_j)
    at_lam: NDArray[np.complex128] = kernel.matrix([lam], centers)
    system: NDArray[np.complex128] = np.vstack([root, math.sqrt(a) * at_lam])
    rhs: NDArray[np.complex128] = np.zeros(centers.size + 1, dtype=np.complex128)
    rhs[-1] = math.sqrt(a)
    solution, _, _, _ = linalg.lstsq(system, rhs, cond=1e-14)
    residual: NDArray[np.complex128] = system @ solution - rhs
    return float(np.sum(np.abs(residual) ** 2))

"""
Schrödinger operators −d²/dx² + μ on [0, b] with measure potentials.

The potential μ is an integrable density q plus finitely many atoms (x_j, m_j). The
solution ξ(z, ·) starts from ξ(0) = 1, ξ'(0+) = m_0 (m_0 the atom at 0, if any), solves
−ξ'' + qξ = zξ between atoms and jumps ξ'(x_j+) = ξ'(x_j−) + m_j·ξ(x_j) across them.
The canonical extensions are labelled by γ ∈ [0, π) through the boundary condition
ξ(b)cos γ + ξ'(b−)sin γ = 0.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Any, Callable, Final

import numpy as np
from scipy.integrate import solve_ivp  # pyright: ignore[reportUnknownVariableType]

from ._errors import DomainError, StiffnessError
from ._expressions import Profile
from ._quadrature import ABS_TOL, QuadratureResult, gauss_nodes, integrate
from ._roots import refine_batch, scan_brackets
from .measures import MERGE_TOL, DiscreteMeasure

if TYPE_CHECKING:
    from collections.abc import Sequence

    from numpy.typing import ArrayLike, NDArray

ODE_METHOD: Final[str] = "DOP853"
ODE_RTOL: Final[float] = 1e-11
ODE_ATOL: Final[float] = 1e-14
SERIES_CUTOFF: Final[float] = 0.1
MIN_FIT_POINTS: Final[int] = 20


##########
# Shooting engine
##########


@dataclass(frozen=True)
class ShootBatch:
    """Solutions for many spectral parameters at once."""

    value: NDArray[np.complex128]
    """ξ(z, end) per z."""

    deriv: NDArray[np.complex128]
    """ξ'(z, end−) per z."""

    norm_sq: NDArray[np.complex128] | None
    """∫ ξ(z, x)² dx per z (the L² norm for real z), when requested."""

    steps: int
    """Right-hand-side evaluations spent; 0 for closed-form propagation."""

    profile: NDArray[np.complex128] | None = None
    """ξ(z, x) on the requested nodes, shape (len(z), len(nodes))."""

    profile_deriv: NDArray[np.complex128] | None = None
    """ξ'(z, x+) on the requested nodes."""


def _cos_sinc(
    k2: NDArray[np.complex128], length: NDArray[np.float64] | float
) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
    # cos(kL) and sin(kL)/k are entire in k² = z − q; any branch of k works.
    k: NDArray[np.complex128] = np.sqrt(k2)
    arg: NDArray[np.complex128] = k * length
    return np.cos(arg), length * np.sinc(arg / np.pi)


def _segment_norm(
    k2: NDArray[np.complex128],
    length: float,
    u0: NDArray[np.complex128],
    p0: NDArray[np.complex128],
) -> NDArray[np.complex128]:
    """∫_0^L (u0·cos(kx) + p0·sin(kx)/k)² dx for constant k² = z − q."""

    _, s = _cos_sinc(k2, length)
    _, s2 = _cos_sinc(k2, 2.0 * length)
    s2 = 0.5 * s2  # sin(2kL)/(2k)
    i_cc: NDArray[np.complex128] = 0.5 * length + 0.5 * s2
    i_cs: NDArray[np.complex128] = 0.5 * s * s
    small: NDArray[np.bool_] = np.abs(k2) * length * length < SERIES_CUTOFF**2
    safe: NDArray[np.complex128] = np.where(small, 1.0, k2)
    series: NDArray[np.complex128] = (
        length**3 / 3
        - k2 * length**5 / 15
        + 2 * k2**2 * length**7 / 315
        - k2**3 * length**9 / 2835
    )
    i_ss: NDArray[np.complex128] = np.where(small, series, (length - s2) / (2 * safe))
    return u0 * u0 * i_cc + 2 * u0 * p0 * i_cs + p0 * p0 * i_ss


@dataclass(frozen=True)
class ShootingEngine:
    """
    Integrates −u'' + V(x)u = zu from `start` to `end` with derivative jumps.

    V is a constant (closed-form propagation) or a callable (adaptive Runge-Kutta via
    scipy's solve_ivp, vectorized over z).
    """

    start: float
    """Left end of the integration."""

    end: float
    """Right end of the integration."""

    jumps: tuple[tuple[float, float], ...] = ()
    """Interior (x_j, m_j) with ξ'(x_j+) = ξ'(x_j−) + m_j·ξ(x_j)."""

    constant: float | None = 0.0
    """The constant value of V, or None when V varies."""

    potential: Callable[[float], float] | None = None
    """V(x) when it is not constant."""

    method: str = ODE_METHOD
    """The solve_ivp method."""

    rtol: float = ODE_RTOL
    """Relative tolerance of the stepper."""

    breakpoints: tuple[float, ...] = field(default=())
    """Points where V may fail to be smooth; the stepper restarts there."""

    def _cuts(self) -> list[float]:
        inner: set[float] = {x for x, _ in self.jumps}
        inner.update(x for x in self.breakpoints if self.start < x < self.end)
        return [self.start, *sorted(inner), self.end]

    def run(
        self,
        z: ArrayLike,
        u0: ArrayLike,
        p0: ArrayLike,
        *,
        norm: bool = False,
        nodes: NDArray[np.float64] | None = None,
    ) -> ShootBatch:
        """
        Shoot from `start` with data (u0, p0) for every z.

        Args:
            z (ArrayLike): Spectral parameters, shape (m,).
            u0 (ArrayLike): ξ(start) per z (or a scalar).
            p0 (ArrayLike): ξ'(start+) per z (or a scalar).
            norm (bool): Accumulate ∫ ξ² dx.
            nodes (NDArray | None): Increasing points in [start, end] where the profile
                is recorded.

        Raises:
            StiffnessError: If the stepper fails.

        Returns:
            ShootBatch: The solutions.
        """

        zz: NDArray[np.complex128] = np.atleast_1d(np.asarray(z, dtype=np.complex128))
        u: NDArray[np.complex128] = np.broadcast_to(
            np.asarray(u0, dtype=np.complex128), zz.shape
        ).copy()
        p: NDArray[np.complex128] = np.broadcast_to(
            np.asarray(p0, dtype=np.complex128), zz.shape
        ).copy()
        total: NDArray[np.complex128] = np.zeros(zz.shape, dtype=np.complex128)
        jump_at: dict[float, float] = dict(self.jumps)
        cuts: list[float] = self._cuts()
        table_u: NDArray[np.complex128] | None = None
        table_p: NDArray[np.complex128] | None = None
        if nodes is not None:
            table_u = np.zeros((zz.size, nodes.size), dtype=np.complex128)
            table_p = np.zeros((zz.size, nodes.size), dtype=np.complex128)
        steps: int = 0

        for index, (left, right) in enumerate(zip(cuts[:-1], cuts[1:])):
            p = p + jump_at.get(left, 0.0) * u
            last: bool = index == len(cuts) - 2
            chosen: NDArray[np.intp] = np.empty(0, dtype=np.intp)
            if nodes is not None:
                upper: NDArray[np.bool_] = nodes <= right if last else nodes < right
                chosen = np.nonzero((nodes >= left) & upper)[0]
            if right <= left:
                continue
            if self.constant is not None:
                k2: NDArray[np.complex128] = zz - self.constant
                if norm:
                    total += _segment_norm(k2, right - left, u, p)
                if table_u is not None and table_p is not None and chosen.size:
                    offsets: NDArray[np.float64] = nodes[chosen] - left  # pyright: ignore[reportOptionalSubscript]
                    c, s = _cos_sinc(k2[:, None], offsets[None, :])
                    table_u[:, chosen] = u[:, None] * c + p[:, None] * s
                    table_p[:, chosen] = -k2[:, None] * u[:, None] * s + p[:, None] * c
                c, s = _cos_sinc(k2, right - left)
                u, p = u * c + p * s, -k2 * u * s + p * c
            else:
                u, p, segment_total, used, rows = self._integrate(
                    zz,
                    (left, right),
                    (u, p),
                    norm=norm,
                    t_eval=nodes[chosen] if nodes is not None and chosen.size else None,
                )
                total += segment_total
                steps += used
                if table_u is not None and table_p is not None and rows is not None:
                    table_u[:, chosen], table_p[:, chosen] = rows
        return ShootBatch(
            u, p, total if norm else None, steps, table_u, table_p
        )

    def _integrate(
        self,
        z: NDArray[np.complex128],
        span: tuple[float, float],
        state: tuple[NDArray[np.complex128], NDArray[np.complex128]],
        *,
        norm: bool,
        t_eval: NDArray[np.float64] | None,
    ) -> tuple[
        NDArray[np.complex128],
        NDArray[np.complex128],
        NDArray[np.complex128],
        int,
        tuple[NDArray[np.complex128], NDArray[np.complex128]] | None,
    ]:
        potential: Callable[[float], float] | None = self.potential
        if potential is None:
            error_msg = "a varying potential needs a callable"
            raise DomainError(error_msg)
        m: int = z.size
        real: bool = bool(np.all(z.imag == 0)) and bool(
            np.all(state[0].imag == 0) and np.all(state[1].imag == 0)
        )
        zz: NDArray[Any] = z.real if real else z
        y0: NDArray[Any] = np.concatenate(
            [state[0], state[1], np.zeros(m if norm else 0, dtype=np.complex128)]
        )
        if real:
            y0 = y0.real.copy()

        def rhs(x: float, y: NDArray[Any]) -> NDArray[Any]:
            out: NDArray[Any] = np.empty_like(y)
            u: NDArray[Any] = y[:m]
            out[:m] = y[m : 2 * m]
            out[m : 2 * m] = (potential(x) - zz) * u
            if norm:
                out[2 * m :] = u * u
            return out

        result: Any = solve_ivp(
            rhs,
            span,
            y0,
            method=self.method,
            rtol=self.rtol,
            atol=ODE_ATOL,
            dense_output=t_eval is not None,
        )
        if result.status < 0:
            raise StiffnessError(str(result.message))
        y_end: NDArray[Any] = result.y[:, -1]
        rows: tuple[NDArray[np.complex128], NDArray[np.complex128]] | None = None
        if t_eval is not None:
            dense: NDArray[Any] = result.sol(t_eval)
            rows = (
                dense[:m].T.astype(np.complex128),
                dense[m : 2 * m].T.astype(np.complex128),
            )
        segment_total: NDArray[np.complex128] = (
            y_end[2 * m :].astype(np.complex128) if norm else np.zeros(m, np.complex128)
        )
        return (
            y_end[:m].astype(np.complex128),
            y_end[m : 2 * m].astype(np.complex128),
            segment_total,
            int(result.nfev),
            rows,
        )


##########
# Problems
##########


@dataclass(frozen=True)
class SchrodingerProblem:
    """A Schrödinger operator with a measure potential on [0, b] and its γ."""

    class InvalidProblemError(DomainError):
        """The problem data violate their invariants."""

        def __init__(self, reason: str) -> None:
            """
            Initialize the exception.

            Args:
                reason: The violated invariant.
            """

            super().__init__(f"invalid Schrödinger problem: {reason}")

    b: float
    """Right endpoint."""

    q: Profile = field(default_factory=lambda: Profile.constant_profile(0.0))
    """The density part of the potential."""

    atoms: tuple[tuple[float, float], ...] = ()
    """The atomic part (x_j, m_j), x_j strictly increasing in [0, b]."""

    gamma: float = 0.0
    """The boundary parameter at b, in [0, π)."""

    dirichlet_at_zero: bool = False
    """Use ξ(0) = 0, ξ'(0) = 1 instead of the quasi-derivative condition."""

    method: str = ODE_METHOD
    """Stepper used when q is not constant."""

    def __post_init__(self) -> None:
        if not self.b > 0:
            raise SchrodingerProblem.InvalidProblemError(f"b = {self.b} is not > 0")
        if not 0 <= self.gamma < math.pi:
            raise SchrodingerProblem.InvalidProblemError(
                f"gamma = {self.gamma} is outside [0, pi)"
            )
        previous: float = -math.inf
        for x, _ in self.atoms:
            if not previous < x or not 0 <= x <= self.b:
                raise SchrodingerProblem.InvalidProblemError(
                    "atom positions must be strictly increasing in [0, b]"
                )
            previous = x

    @classmethod
    def from_config(cls, config: dict[str, Any]) -> SchrodingerProblem:
        """
        Build a problem from `{"b", "q", "atoms", "gamma"}`.

        Raises:
            SchrodingerProblem.InvalidProblemError: If `b` is missing or malformed.
        """

        try:
            return cls(
                b=float(config["b"]),
                q=Profile.from_config(config.get("q")),
                atoms=tuple(
                    (float(x), float(m)) for x, m in config.get("atoms", [])
                ),
                gamma=float(config.get("gamma", 0.0)),
                dirichlet_at_zero=bool(config.get("dirichlet_at_zero", False)),
            )
        except DomainError:
            raise
        except (KeyError, TypeError, ValueError) as e:
            raise SchrodingerProblem.InvalidProblemError(str(e)) from e

    def save_config(self) -> dict[str, Any]:
        """Return the problem-file form."""

        config: dict[str, Any] = {
            "b": self.b,
            "q": self.q.save_config(),
            "atoms": [[x, m] for x, m in self.atoms],
            "gamma": self.gamma,
        }
        if self.dirichlet_at_zero:
            config["dirichlet_at_zero"] = True
        return config

    def with_gamma(self, gamma: float) -> SchrodingerProblem:
        """Return the same operator with another boundary parameter."""

        return replace(self, gamma=gamma)

    @property
    def breakpoints(self) -> tuple[float, ...]:
        """Atom positions and potential kinks inside (0, b)."""

        points: set[float] = {x for x, _ in self.atoms if 0 < x < self.b}
        points.update(x for x in self.q.breakpoints if 0 < x < self.b)
        return tuple(sorted(points))

    def engine(self) -> ShootingEngine:
        """Return the shooting engine of the problem."""

        constant: float | None = self.q.constant
        profile: Profile = self.q

        def potential(x: float) -> float:
            return float(profile(x))

        return ShootingEngine(
            start=0.0,
            end=self.b,
            jumps=tuple((x, m) for x, m in self.atoms if 0 < x < self.b),
            constant=constant,
            potential=None if constant is not None else potential,
            method=self.method,
            breakpoints=tuple(x for x in self.q.breakpoints if 0 < x < self.b),
        )

    def initial_data(self) -> tuple[float, float]:
        """Return (ξ(0), ξ'(0+))."""

        if self.dirichlet_at_zero:
            return 0.0, 1.0
        m0: float = sum(m for x, m in self.atoms if x == 0)
        return 1.0, m0

    def shoot(
        self,
        z: ArrayLike,
        *,
        norm: bool = False,
        nodes: NDArray[np.float64] | None = None,
    ) -> ShootBatch:
        """Shoot ξ(z, ·) across [0, b] for every z."""

        u0, p0 = self.initial_data()
        return self.engine().run(z, u0, p0, norm=norm, nodes=nodes)

    def lower_bound(self) -> float:
        """Return a value below every eigenvalue of every extension scanned."""

        sample: NDArray[np.float64] = np.linspace(0.0, self.b, 1025)
        q_min: float = float(np.min(self.q(sample)))
        mass: float = sum(abs(m) for _, m in self.atoms)
        if self.gamma not in {0.0, math.pi / 2}:
            mass += abs(1.0 / math.tan(self.gamma))
        return min(0.0, q_min) - (mass + 1.0 / self.b) ** 2 - 1.0

    def upper_potential(self) -> float:
        """Return max(0, max q) on a sample grid."""

        sample: NDArray[np.float64] = np.linspace(0.0, self.b, 1025)
        return max(0.0, float(np.max(self.q(sample))))


@dataclass(frozen=True)
class ShootResult:
    """The solution ξ(z, ·) at the right endpoint."""

    value_at_b: complex
    """ξ(z, b)."""

    deriv_at_b_minus: complex
    """ξ'(z, b−)."""

    norm_sq: float | None
    """∫_0^b |ξ(z, x)|² dx for real z, None otherwise."""

    steps: int
    """Right-hand-side evaluations spent; 0 for closed-form propagation."""


def solve_xi(problem: SchrodingerProblem, z: complex) -> ShootResult:
    """
    Shoot the solution ξ(z, ·) of the quasi-derivative initial value problem.

    Args:
        problem (SchrodingerProblem): The problem.
        z (complex): The spectral parameter.

    Raises:
        StiffnessError: If the stepper fails.

    Returns:
        ShootResult: ξ(z, b), ξ'(z, b−) and, for real z, the squared norm.
    """

    real: bool = complex(z).imag == 0
    batch: ShootBatch = problem.shoot([z], norm=real)
    norm: float | None = (
        float(batch.norm_sq[0].real) if real and batch.norm_sq is not None else None
    )
    return ShootResult(
        complex(batch.value[0]), complex(batch.deriv[0]), norm, batch.steps
    )


##########
# Eigenvalues
##########


def boundary_function(
    shoot: Callable[[NDArray[np.float64]], ShootBatch], gamma: float
) -> Callable[[NDArray[np.float64]], NDArray[np.float64]]:
    """Return λ ↦ ξ(λ, b)cos γ + ξ'(λ, b−)sin γ, vectorized."""

    cos_g: float = math.cos(gamma)
    sin_g: float = math.sin(gamma)

    def func(lam: NDArray[np.float64]) -> NDArray[np.float64]:
        batch: ShootBatch = shoot(lam)
        return (batch.value * cos_g + batch.deriv * sin_g).real

    return func


def scan_eigenvalues(
    boundary: Callable[[NDArray[np.float64]], NDArray[np.float64]],
    *,
    b: float,
    lower: float,
    count: int | None = None,
    window: tuple[float, float] | None = None,
    upper_shift: float = 0.0,
    jobs: int = 1,
) -> list[float]:
    """
    Find the zeros of a real boundary function of λ.

    The scan runs in κ = sign(λ)√|λ|, where the zeros are asymptotically equispaced
    by π/b, on a grid refined until the sign-change count stabilizes; brackets are then
    refined to 1e-12 relative.

    Args:
        boundary: The vectorized boundary function.
        b (float): Interval length, setting the asymptotic spacing.
        lower (float): A bound below every zero.
        count (int | None): Number of lowest zeros wanted.
        window (tuple[float, float] | None): Interval to scan instead of `count`.
        upper_shift (float): Added to the asymptotic estimate of the count-th zero.
        jobs (int): Number of concurrently scanned sub-intervals.

    Raises:
        DomainError: If neither `count` nor `window` is valid.
        BracketCountError: If the grid scan does not stabilize.

    Returns:
        list[float]: The zeros, increasing.
    """

    if window is None and (count is None or count < 1):
        error_msg = "eigenvalue search needs count >= 1 or a bounded window"
        raise DomainError(error_msg)

    def to_kappa(lam: float) -> float:
        return math.copysign(math.sqrt(abs(lam)), lam)

    if window is not None:
        lo, hi = window
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            error_msg = f"window [{lo}, {hi}] must be bounded and non-empty"
            raise DomainError(error_msg)
        return _scan_kappa(boundary, to_kappa(lo), to_kappa(hi), b, jobs)

    wanted: int = count if count is not None else 0
    kappa_hi: float = (
        (wanted + 3) * math.pi / b + math.sqrt(max(0.0, upper_shift)) + 1.0
    )
    while True:
        roots: list[float] = _scan_kappa(boundary, to_kappa(lower), kappa_hi, b, jobs)
        if len(roots) >= wanted:
            return roots[:wanted]
        logging.debug("Found %d of %d eigenvalues, widening scan", len(roots), wanted)
        kappa_hi *= 1.5


def _scan_kappa(
    boundary: Callable[[NDArray[np.float64]], NDArray[np.float64]],
    kappa_lo: float,
    kappa_hi: float,
    b: float,
    jobs: int,
) -> list[float]:
    def lam_of(kappa: NDArray[np.float64]) -> NDArray[np.float64]:
        return kappa * np.abs(kappa)

    def scan_part(bounds: tuple[float, float]) -> list[float]:
        lo, hi = bounds
        slots: int = int((hi - lo) * b / math.pi) + 1

        def grid(s: NDArray[np.float64]) -> NDArray[np.float64]:
            return lam_of(lo + (hi - lo) * s)

        left, right = scan_brackets(
            boundary,
            float(lam_of(np.array(lo))),
            float(lam_of(np.array(hi))),
            grid=grid,
            initial=max(512, 8 * slots),
        )
        return [float(r) for r in refine_batch(boundary, left, right)]

    edges: NDArray[np.float64] = np.linspace(kappa_lo, kappa_hi, max(1, jobs) + 1)
    parts: list[tuple[float, float]] = list(
        zip(edges[:-1].tolist(), edges[1:].tolist())
    )
    if len(parts) == 1:
        found: list[float] = scan_part(parts[0])
    else:
        with ThreadPoolExecutor(max_workers=len(parts)) as pool:
            found = [r for chunk in pool.map(scan_part, parts) for r in chunk]
    found.sort()
    merged: list[float] = []
    for root in found:
        if not merged or abs(root - merged[-1]) >= MERGE_TOL * (1 + abs(root)):
            merged.append(root)
    return merged


def eigenvalues(
    problem: SchrodingerProblem,
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
    logging.info("Found %d eigenvalues (gamma = %g)", len(roots), problem.gamma)
    return roots


def spectral_measure(
    problem: SchrodingerProblem, count: int, *, jobs: int = 1
) -> DiscreteMeasure:
    """
    Return Σ δ_λ/‖ξ(·, λ)‖² over the lowest `count` eigenvalues.

    The window runs from the scan's lower bound to midway between the count-th and the
    next eigenvalue, so that it holds exactly the returned atoms.

    Raises:
        DomainError: If count < 1.
    """

    lams: list[float] = eigenvalues(problem, count + 1, jobs=jobs)
    norms: NDArray[np.float64] = problem.shoot(lams[:count], norm=True).norm_sq.real  # pyright: ignore[reportOptionalMemberAccess]
    return DiscreteMeasure.from_atoms(
        zip(lams[:count], (1.0 / norms).tolist()),
        window=(min(problem.lower_bound(), lams[0]), 0.5 * (lams[-2] + lams[-1])),
        tail_flag=True,
    )


def extension_parameter(problem: SchrodingerProblem, lam: float) -> float:
    """Return the γ ∈ [0, π) whose extension has λ as an eigenvalue."""

    result: ShootResult = solve_xi(problem, lam)
    return math.atan2(-result.value_at_b.real, result.deriv_at_b_minus.real) % math.pi


##########
# Transform, Parseval and K_v
##########


def transform(
    problem: SchrodingerProblem,
    phi: Profile,
    z: ArrayLike,
    *,
    tol: float = ABS_TOL,
    batch: int = 128,
) -> NDArray[np.complex128]:
    """
    Return f(z) = ∫_0^b ξ(z, x)φ(x) dx for every z.

    Raises:
        QuadratureError: If the quadrature does not converge.
    """

    zz: NDArray[np.complex128] = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    out: NDArray[np.complex128] = np.empty(zz.shape, dtype=np.complex128)
    cuts: tuple[float, ...] = tuple(
        sorted(
            set(problem.breakpoints)
            | {x for x in phi.breakpoints if 0 < x < problem.b}
        )
    )
    for first in range(0, zz.size, batch):
        chunk: NDArray[np.complex128] = zz[first : first + batch]

        def integrand(
            x: NDArray[np.float64], chunk: NDArray[np.complex128] = chunk
        ) -> NDArray[np.complex128]:
            profile: NDArray[np.complex128] = problem.shoot(chunk, nodes=x).profile  # pyright: ignore[reportAssignmentType]
            return profile * phi(x)[None, :]

        result: QuadratureResult = integrate(
            integrand, 0.0, problem.b, tol=tol, breakpoints=cuts
        )
        out[first : first + batch] = result.value
    return out


def parseval_sum(problem: SchrodingerProblem, phi: Profile, count: int) -> float:
    """Return Σ_n |f(λ_n)|²·w_n over the lowest `count` spectral atoms."""

    measure: DiscreteMeasure = spectral_measure(problem, count)
    values: NDArray[np.complex128] = transform(problem, phi, measure.points)
    return float(np.sum(np.abs(values) ** 2 * measure.weights))


def norm_sq(phi: Profile, b: float, *, breakpoints: Sequence[float] = ()) -> float:
    """Return ∫_0^b |φ|²."""

    return float(
        integrate(
            lambda x: (phi(x) ** 2)[None, :].astype(np.complex128),
            0.0,
            b,
            breakpoints=breakpoints,
        ).value[0].real
    )


def _cos_lambda(lam: float, x: NDArray[np.float64]) -> NDArray[np.float64]:
    return np.cos(np.sqrt(complex(lam)) * x).real


@dataclass(frozen=True)
class KvTable:
    """(K_v φ)(x) tabulated on composite Gauss nodes of [0, b]."""

    nodes: NDArray[np.float64]
    """The nodes."""

    weights: NDArray[np.float64]
    """The quadrature weights of the nodes."""

    values: NDArray[np.float64]
    """(K_v φ) at the nodes."""

    phi: NDArray[np.float64]
    """φ at the nodes."""


def kv_apply(
    s: float, lam: float, b: float, phi: Profile, *, panels: int = 20
) -> KvTable:
    """
    Tabulate (K_v φ)(x) = ½∫_0^b (v(t − x) + v(t + x))φ(t) dt, v(y) = s·cos(√λ·y).

    Raises:
        DomainError: If s ≤ 0.
    """

    if not s > 0:
        error_msg = f"s = {s} must be > 0"
        raise DomainError(error_msg)
    x, w = gauss_nodes(0.0, b, panels)
    values_phi: NDArray[np.float64] = phi(x)
    root: complex = np.sqrt(complex(lam))

    def v(y: NDArray[np.float64]) -> NDArray[np.float64]:
        return s * np.cos(root * y).real

    kernel: NDArray[np.float64] = 0.5 * (
        v(x[None, :] - x[:, None]) + v(x[None, :] + x[:, None])
    )
    return KvTable(x, w, kernel @ (w * values_phi), values_phi)


def kv_rank_one_residual(table: KvTable, s: float, lam: float) -> float:
    """Return max |K_v φ − s⟨c_λ, φ⟩c_λ| on the nodes, c_λ(x) = cos(√λ x)."""

    c: NDArray[np.float64] = _cos_lambda(lam, table.nodes)
    rank_one: NDArray[np.float64] = s * float(c @ (table.weights * table.phi)) * c
    return float(np.max(np.abs(table.values - rank_one)))


def kv_nystrom_matrix(
    s: float, lam: float, b: float, n: int = 400
) -> NDArray[np.float64]:
    """Return the symmetric Nyström discretization of I + K_v on n Gauss nodes."""

    panels: int = max(1, n // 20)
    x, w = gauss_nodes(0.0, b, panels, order=n // panels)
    root: complex = np.sqrt(complex(lam))
    kernel: NDArray[np.float64] = (
        0.5
        * s
        * (
            np.cos(root * (x[None, :] - x[:, None])).real
            + np.cos(root * (x[None, :] + x[:, None])).real
        )
    )
    scale: NDArray[np.float64] = np.sqrt(w)
    return np.eye(x.size) + scale[:, None] * kernel * scale[None, :]


@dataclass(frozen=True)
class KvFormReport:
    """The two sides of ⟨φ, (I + K_v)φ⟩ = ∫ |f|² dρ̃."""

    form: float
    """⟨φ, (I + K_v)φ⟩."""

    measure_side: float
    """Σ |f(λ_n)|² w_n + s·|f(λ)|² over the truncated spectral measure."""

    relative_error: float
    """|form − measure_side| / measure_side."""

    count: int
    """Number of spectral atoms used."""


def kv_form_check(
    free: SchrodingerProblem,
    s: float,
    lam: float,
    phi: Profile,
    count: int,
) -> KvFormReport:
    """
    Compare the quadratic form of I + K_v with the norm in L²(ρ + s·δ_λ).

    Args:
        free (SchrodingerProblem): The free reference extension (q = 0, no atoms).
        s (float): The mass of the added point, s > 0.
        lam (float): Its location, not an eigenvalue of `free`.
        phi (Profile): The test function.
        count (int): Truncation of the spectral measure.

    Raises:
        DomainError: If `free` is not free or λ is an eigenvalue of the reference
            extension.

    Returns:
        KvFormReport: Both sides and their relative gap.
    """

    if free.q.constant != 0 or free.atoms or free.dirichlet_at_zero:
        error_msg = "the reference problem must have q = 0, no atoms and u'(0) = 0"
        raise DomainError(error_msg)
    boundary: float = float(
        boundary_function(lambda x: free.shoot(x), free.gamma)(np.array([lam]))[0]
    )
    if abs(boundary) < 1e-10:  # noqa: PLR2004
        error_msg = f"lambda = {lam} is an eigenvalue of the reference extension"
        raise DomainError(error_msg)

    table: KvTable = kv_apply(s, lam, free.b, phi)
    form: float = float(np.sum(table.weights * table.phi * (table.phi + table.values)))

    measure: DiscreteMeasure = spectral_measure(free, count)
    f_atoms: NDArray[np.complex128] = transform(free, phi, [*measure.points, lam])
    measure_side: float = float(
        np.sum(np.abs(f_atoms[:-1]) ** 2 * measure.weights)
        + s * abs(f_atoms[-1]) ** 2
    )
    return KvFormReport(
        form, measure_side, abs(form - measure_side) / measure_side, count
    )


##########
# Asymptotics and interlacing
##########


@dataclass(frozen=True)
class AsymptoticFit:
    """λ_n ≈ c·(n + κ)² fitted on the tail half of a spectrum."""

    c: float
    """The leading coefficient."""

    kappa: float
    """The enumeration offset."""

    max_residual: float
    """max |λ_n − c(n + κ)²| over the tail half."""

    residuals: tuple[float, ...]
    """λ_n − c(n + κ)² over the tail half."""


def asymptotic_fit(eigs: Sequence[float], *, start: int = 1) -> AsymptoticFit:
    """
    Fit √λ_n against n on the tail half of `eigs`, enumerated from `start`.

    Raises:
        DomainError: If fewer than 20 values are given.
    """

    if len(eigs) < MIN_FIT_POINTS:
        error_msg = f"asymptotic fit needs at least {MIN_FIT_POINTS} values"
        raise DomainError(error_msg)
    values: NDArray[np.float64] = np.asarray(eigs, dtype=np.float64)
    n: NDArray[np.float64] = np.arange(start, start + values.size, dtype=np.float64)
    tail: slice = slice(values.size // 2, None)
    slope, intercept = np.polyfit(n[tail], np.sqrt(values[tail]), 1)
    c: float = float(slope) ** 2
    kappa: float = float(intercept / slope)
    residuals: NDArray[np.float64] = values[tail] - c * (n[tail] + kappa) ** 2
    return AsymptoticFit(
        c, kappa, float(np.max(np.abs(residuals))), tuple(residuals.tolist())
    )


@dataclass(frozen=True)
class InterlacingReport:
    """Outcome of an interlacing check."""

    interlaced: bool
    """Whether the two lists strictly interlace on their common range."""

    first_violation: int | None
    """Index, in the merged common range, of the first violation."""


def interlacing_check(e1: Sequence[float], e2: Sequence[float]) -> InterlacingReport:
    """
    Check that the two spectra strictly alternate on their common range.

    Raises:
        DomainError: If the lists do not overlap.
    """

    if not e1 or not e2:
        error_msg = "interlacing needs two non-empty lists"
        raise DomainError(error_msg)
    lo: float = max(e1[0], e2[0])
    hi: float = min(e1[-1], e2[-1])
    if lo > hi:
        error_msg = (
            f"windows do not overlap ([{e1[0]}, {e1[-1]}] vs [{e2[0]}, {e2[-1]}])"
        )
        raise DomainError(error_msg)

    merged: list[tuple[float, int]] = sorted(
        [(x, 1) for x in e1 if lo <= x <= hi] + [(x, 2) for x in e2 if lo <= x <= hi]
    )
    for index in range(1, len(merged)):
        (x_prev, tag_prev), (x, tag) = merged[index - 1], merged[index]
        if tag == tag_prev or x == x_prev:
            return InterlacingReport(False, index - 1)  # noqa: FBT003
    return InterlacingReport(True, None)  # noqa: FBT003

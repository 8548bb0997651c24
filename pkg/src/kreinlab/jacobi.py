"""
The classical moment problem on Jacobi matrices.

Row k of the matrix holds (b_{k-1}, q_k, b_k), k ≥ 1. The orthonormal polynomials obey

    z·P_k = b_{k+1}·P_{k+1} + q_{k+1}·P_k + b_k·P_{k-1},   P_0 = 1, P_{-1} = 0,

and the polynomials of the second kind the same recurrence with Q_0 = 0, Q_1 = 1/b_1.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Any, Callable, Final, Union

import mpmath
import numpy as np

from ._errors import DomainError, PrecisionOverflowError, ResolutionError
from ._expressions import sequence
from ._precision import DEFAULT_PRECISION, HIGH_PRECISION, workprec
from ._roots import refine_scalar, scan_brackets
from .measures import DiscreteMeasure

if TYPE_CHECKING:
    from collections.abc import Sequence

    from numpy.typing import ArrayLike, NDArray

Coefficient = Callable[[int], Union[float, mpmath.mpf]]
ExtensionParameter = Union[float, None]
"""t ∈ ℝ, or None for t = ∞."""

SERIES_RTOL: Final[float] = 1e-30
SERIES_QUIET_TERMS: Final[int] = 3
MAX_SERIES_TERMS: Final[int] = 20000
NEAR_POLE: Final[float] = 1e-30
DIVERGENCE: Final[float] = 1e30


class Classification(Enum):
    """Outcome of the limit point / limit circle test."""

    LIMIT_POINT = "LimitPoint"
    LIMIT_CIRCLE = "LimitCircle"
    INCONCLUSIVE = "Inconclusive"


class JacobiMatrix:
    """A real symmetric tridiagonal matrix with positive off-diagonal."""

    class LimitPointError(DomainError):
        """Limit-circle machinery was called on a matrix that is not limit circle."""

        def __init__(self, description: str, verdict: Classification) -> None:
            """
            Initialize the exception.

            Args:
                description: The matrix description.
                verdict: The classification obtained.
            """

            super().__init__(
                f"matrix '{description}' is {verdict.value}, not LimitCircle"
            )

    class CoefficientError(DomainError):
        """A coefficient is invalid or out of range."""

        def __init__(self, reason: str) -> None:
            """
            Initialize the exception.

            Args:
                reason: What is wrong with the coefficient.
            """

            super().__init__(f"invalid Jacobi coefficient: {reason}")

    def __init__(
        self,
        diag: Coefficient,
        offdiag: Coefficient,
        *,
        description: str = "",
        size: int | None = None,
        config: dict[str, Any] | None = None,
    ) -> None:
        """
        Initialize the matrix from coefficient generators.

        Args:
            diag: k ↦ q_k for k ≥ 1.
            offdiag: k ↦ b_k > 0 for k ≥ 1.
            description: A human readable tag.
            size: The dimension of a finite matrix, None when infinite.
            config: The problem-file form of the matrix.
        """

        self._diag: Coefficient = diag
        self._offdiag: Coefficient = offdiag
        self._description: str = description
        self._size: int | None = size
        self._config: dict[str, Any] = config if config is not None else {}
        self._mp_cache: dict[int, tuple[list[mpmath.mpf], list[mpmath.mpf]]] = {}
        self._verdict: Classification | None = None

    @classmethod
    def from_expressions(cls, diag: str, offdiag: str) -> JacobiMatrix:
        """Build an infinite matrix from expressions in `k`."""

        return cls(
            sequence(diag),
            sequence(offdiag),
            description=f"q_k={diag}, b_k={offdiag}",
            config={"diag": diag, "offdiag": offdiag},
        )

    @classmethod
    def from_lists(
        cls, diag: Sequence[float], offdiag: Sequence[float]
    ) -> JacobiMatrix:
        """
        Build a finite matrix from explicit coefficients.

        `offdiag` holds b_1..b_{n-1}, optionally followed by b_n, which only enters the
        polynomial P_n.

        Raises:
            JacobiMatrix.CoefficientError: If an entry is not a number, the lengths
                disagree or some b_k ≤ 0.
        """

        try:
            q: list[float] = [float(v) for v in diag]
            b: list[float] = [float(v) for v in offdiag]
        except (TypeError, ValueError) as e:
            raise JacobiMatrix.CoefficientError(str(e)) from e
        if not q or len(b) not in {len(q) - 1, len(q)}:
            error_msg = f"{len(q)} diagonal and {len(b)} off-diagonal entries"
            raise JacobiMatrix.CoefficientError(error_msg)
        if any(not v > 0 for v in b):
            error_msg = "off-diagonal entries must be > 0"
            raise JacobiMatrix.CoefficientError(error_msg)

        def diag_at(k: int) -> float:
            return q[k - 1]

        def offdiag_at(k: int) -> float:
            return b[k - 1]

        return cls(
            diag_at,
            offdiag_at,
            description=f"finite[{len(q)}]",
            size=len(q),
            config={"diag": q, "offdiag": b},
        )

    @classmethod
    def from_config(cls, config: dict[str, Any]) -> JacobiMatrix:
        """
        Build a matrix from `{"diag": expr|list, "offdiag": expr|list}`.

        Raises:
            JacobiMatrix.CoefficientError: If a key is missing or the kinds are mixed.
        """

        if "diag" not in config or "offdiag" not in config:
            error_msg = "expected 'diag' and 'offdiag' keys"
            raise JacobiMatrix.CoefficientError(error_msg)
        diag: Any = config["diag"]
        offdiag: Any = config["offdiag"]
        if isinstance(diag, list) and isinstance(offdiag, list):
            return cls.from_lists(diag, offdiag)  # pyright: ignore[reportUnknownArgumentType]
        if isinstance(diag, (list, dict)) or isinstance(offdiag, (list, dict)):
            error_msg = "'diag' and 'offdiag' must both be expressions or both lists"
            raise JacobiMatrix.CoefficientError(error_msg)
        return cls.from_expressions(str(diag), str(offdiag))

    def save_config(self) -> dict[str, Any]:
        """Return the problem-file form of the matrix."""

        return dict(self._config)

    @property
    def description(self) -> str:
        """Human readable tag."""

        return self._description

    @property
    def size(self) -> int | None:
        """The dimension of a finite matrix, None for infinite matrices."""

        return self._size

    def _check_index(self, n: int, *, offdiag: bool) -> None:
        if self._size is None:
            return
        limit: int = self._size if not offdiag else len(self._config["offdiag"])
        if n > limit:
            error_msg = f"index {n} exceeds the finite matrix ({limit} entries)"
            raise JacobiMatrix.CoefficientError(error_msg)

    def mp_coefficients(
        self, n: int, precision: int, *, offdiag_count: int | None = None
    ) -> tuple[list[mpmath.mpf], list[mpmath.mpf]]:
        """
        Return q_1..q_n and b_1..b_m as mpmath numbers at `precision` bits.

        Args:
            n (int): Number of diagonal entries.
            precision (int): Mantissa bits.
            offdiag_count (int | None): Number m of off-diagonal entries, n if None.

        Raises:
            JacobiMatrix.CoefficientError: If some b_k ≤ 0 or a finite matrix is
                exceeded.

        Returns:
            tuple[list[mpf], list[mpf]]: The diagonal and off-diagonal entries.
        """

        m: int = n if offdiag_count is None else offdiag_count
        q, b = self._mp_cache.setdefault(precision, ([], []))
        with workprec(precision):
            if len(q) < n:
                self._check_index(n, offdiag=False)
                q.extend(mpmath.mpf(self._diag(k)) for k in range(len(q) + 1, n + 1))
            if len(b) < m:
                self._check_index(m, offdiag=True)
                for k in range(len(b) + 1, m + 1):
                    b_k: mpmath.mpf = mpmath.mpf(self._offdiag(k))
                    if not b_k > 0:
                        raise JacobiMatrix.CoefficientError(f"b_{k} = {b_k} is not > 0")
                    b.append(b_k)
        return q[:n], b[:m]

    def float_coefficients(
        self, n: int, *, truncation: bool = False
    ) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """
        Return q_1..q_n and b_1..b_n as binary64 arrays; b_1..b_{n-1} for a truncation.

        Entries beyond the binary64 range come back as inf.
        """

        q_mp, b_mp = self.mp_coefficients(
            n, DEFAULT_PRECISION, offdiag_count=n - 1 if truncation else n
        )
        return (
            np.array([float(v) for v in q_mp], dtype=np.float64),
            np.array([float(v) for v in b_mp], dtype=np.float64),
        )

    def classification(self) -> Classification:
        """Return `classify(self)` at z0 = i, computed once per matrix."""

        if self._verdict is None:
            self._verdict = classify(self)
        return self._verdict


@dataclass(frozen=True)
class PolynomialValues:
    """The polynomials of both kinds at one point."""

    p: list[mpmath.mpc]
    """P_0..P_n."""

    q: list[mpmath.mpc]
    """Q_0..Q_n."""

    precision: int
    """Mantissa bits used."""


@dataclass(frozen=True)
class NevanlinnaValue:
    """The Nevanlinna matrix entries A, B, C, D at one point."""

    a: mpmath.mpc
    """A(z)."""

    b: mpmath.mpc
    """B(z)."""

    c: mpmath.mpc
    """C(z)."""

    d: mpmath.mpc
    """D(z)."""

    z: complex
    """The evaluation point."""

    trunc: int
    """Number of series terms retained."""

    tail_estimate: float
    """Magnitude of the last retained term."""

    precision: int
    """Mantissa bits used."""

    @property
    def determinant(self) -> mpmath.mpc:
        """A·D − B·C, which equals 1."""

        with workprec(self.precision):
            return self.a * self.d - self.b * self.c


def _as_mp(z: complex | mpmath.mpc) -> mpmath.mpc:
    return mpmath.mpc(z)


def eval_polys(
    matrix: JacobiMatrix, z: complex, n: int, *, precision: int = DEFAULT_PRECISION
) -> PolynomialValues:
    """
    Evaluate P_0..P_n and Q_0..Q_n at z.

    Args:
        matrix (JacobiMatrix): The matrix.
        z (complex): The evaluation point.
        n (int): The highest degree, n ≥ 0.
        precision (int): Mantissa bits.

    Raises:
        JacobiMatrix.CoefficientError: If n < 0.
        PrecisionOverflowError: If a value is not finite.

    Returns:
        PolynomialValues: Both families.
    """

    if n < 0:
        raise JacobiMatrix.CoefficientError(f"degree {n} is negative")
    q_co, b_co = matrix.mp_coefficients(n, precision) if n else ([], [])
    with workprec(precision):
        zz: mpmath.mpc = _as_mp(z)
        p: list[mpmath.mpc] = [mpmath.mpc(1)]
        q: list[mpmath.mpc] = [mpmath.mpc(0)]
        if n >= 1:
            p.append((zz - q_co[0]) / b_co[0])
            q.append(mpmath.mpc(1) / b_co[0])
        for k in range(1, n):
            p.append(((zz - q_co[k]) * p[k] - b_co[k - 1] * p[k - 1]) / b_co[k])
            q.append(((zz - q_co[k]) * q[k] - b_co[k - 1] * q[k - 1]) / b_co[k])
        if not all(mpmath.isfinite(abs(v)) for v in (p[-1], q[-1])):
            raise PrecisionOverflowError(f"orthogonal polynomials of degree {n}")
    return PolynomialValues(p, q, precision)


def poly_table(
    matrix: JacobiMatrix, z: ArrayLike, n: int, *, second_kind: bool = False
) -> NDArray[np.complex128]:
    """
    Evaluate P_0..P_n (or Q_0..Q_n) at many points in binary64.

    Args:
        matrix (JacobiMatrix): The matrix.
        z (ArrayLike): The evaluation points, shape (m,).
        n (int): The highest degree.
        second_kind (bool): Return Q instead of P.

    Returns:
        NDArray: Values of shape (n + 1, m); overflowed entries are inf.
    """

    zz: NDArray[np.complex128] = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    q_co, b_co = matrix.float_coefficients(n) if n else (np.empty(0), np.empty(0))
    table: NDArray[np.complex128] = np.zeros((n + 1, zz.size), dtype=np.complex128)
    table[0] = 0.0 if second_kind else 1.0
    if n == 0:
        return table
    table[1] = 1.0 / b_co[0] if second_kind else (zz - q_co[0]) / b_co[0]
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, n):
            table[k + 1] = (
                (zz - q_co[k]) * table[k] - b_co[k - 1] * table[k - 1]
            ) / b_co[k]
    return table


def classify(
    matrix: JacobiMatrix,
    z0: complex = 1j,
    *,
    tol: float = 1e-12,
    max_n: int = 4096,
) -> Classification:
    """
    Decide between limit point and limit circle from Σ_{k≤N} |P_k(z0)|².

    The partial sums are inspected at N = 16, 32, 64, ... up to `max_n`. They are
    Cauchy (limit circle) once doubling N adds less than `tol` relatively; they diverge
    (limit point) once they exceed 1e30, or keep growing by at least half per doubling
    over the last three doublings past N = 512.

    Args:
        matrix (JacobiMatrix): An infinite matrix.
        z0 (complex): A non-real test point.
        tol (float): Relative Cauchy tolerance.
        max_n (int): The largest N inspected.

    Raises:
        DomainError: If z0 is real or the matrix is finite.

    Returns:
        Classification: The verdict, Inconclusive when neither test fires.
    """

    if complex(z0).imag == 0:
        error_msg = f"classification needs a non-real point, got {z0!r}"
        raise DomainError(error_msg)
    if matrix.size is not None:
        error_msg = "a finite matrix is neither limit point nor limit circle"
        raise DomainError(error_msg)

    table: NDArray[np.complex128] = poly_table(matrix, [z0], max_n)[:, 0]
    with np.errstate(over="ignore", invalid="ignore"):
        partial: NDArray[np.float64] = np.cumsum(np.abs(table) ** 2)
    ratios: list[float] = []
    n: int = 16
    while 2 * n <= max_n:
        s_n: float = float(partial[n])
        s_2n: float = float(partial[2 * n])
        logging.debug("classify %s: S_%d = %.6e", matrix.description, 2 * n, s_2n)
        if not math.isfinite(s_2n) or s_2n > DIVERGENCE:
            return Classification.LIMIT_POINT
        if s_2n - s_n < tol * s_2n:
            return Classification.LIMIT_CIRCLE
        ratios.append(s_2n / s_n)
        if 2 * n >= 512 and len(ratios) >= 3 and min(ratios[-3:]) >= 1.5:  # noqa: PLR2004
            return Classification.LIMIT_POINT
        n *= 2
    logging.warning("classify %s: inconclusive up to N = %d", matrix.description, max_n)
    return Classification.INCONCLUSIVE


def _require_limit_circle(matrix: JacobiMatrix) -> None:
    verdict: Classification = matrix.classification()
    if verdict is Classification.LIMIT_POINT:
        raise JacobiMatrix.LimitPointError(matrix.description, verdict)
    if verdict is Classification.INCONCLUSIVE:
        logging.warning("Treating %s as limit circle", matrix.description)


class SeriesConvergenceError(ResolutionError):
    """A limit-circle series did not settle."""

    def __init__(self, terms: int) -> None:
        """
        Initialize the exception.

        Args:
            terms: The number of terms summed.
        """

        super().__init__(f"series did not converge within {terms} terms")


def _nevanlinna_series(
    matrix: JacobiMatrix, z: complex, trunc: int | None, precision: int
) -> NevanlinnaValue:
    limit: int = trunc if trunc is not None else MAX_SERIES_TERMS
    with workprec(precision):
        zz: mpmath.mpc = _as_mp(z)
        sums: list[mpmath.mpc] = [mpmath.mpc(0)] * 4
        # (P_k(0), Q_k(0), P_k(z), Q_k(z)) and their predecessors
        prev: list[mpmath.mpc] = [mpmath.mpc(0)] * 4
        one: mpmath.mpc = mpmath.mpc(1)
        cur: list[mpmath.mpc] = [one, mpmath.mpc(0), one, mpmath.mpc(0)]
        quiet: int = 0
        last: mpmath.mpf = mpmath.mpf(0)
        k: int = 0
        while True:
            p0, q0, pz, qz = cur
            terms: list[mpmath.mpc] = [
                zz * q0 * qz,
                zz * q0 * pz,
                zz * p0 * qz,
                zz * p0 * pz,
            ]
            sums = [s + t for s, t in zip(sums, terms)]
            last = max(abs(t) for t in terms)
            scale: mpmath.mpf = max([mpmath.mpf(1)] + [abs(s) for s in sums])
            quiet = quiet + 1 if last < SERIES_RTOL * scale else 0
            if trunc is None and quiet >= SERIES_QUIET_TERMS:
                break
            if k + 1 >= limit:
                if trunc is None:
                    raise SeriesConvergenceError(limit)
                break
            q_co, b_co = matrix.mp_coefficients(k + 1, precision)
            b_prev: mpmath.mpf = b_co[k - 1] if k else mpmath.mpf(0)
            points: list[mpmath.mpc] = [mpmath.mpc(0), mpmath.mpc(0), zz, zz]
            nxt: list[mpmath.mpc] = [
                ((x - q_co[k]) * c - b_prev * p) / b_co[k]
                for x, c, p in zip(points, cur, prev)
            ]
            if k == 0:
                nxt[1] = nxt[3] = mpmath.mpc(1) / b_co[0]
            prev, cur = cur, nxt
            k += 1
        a, b, c, d = sums
        b -= 1
        c += 1
    logging.debug("Nevanlinna series at %s: %d terms, tail %s", z, k + 1, last)
    return NevanlinnaValue(a, b, c, d, complex(z), k + 1, float(last), precision)


def nevanlinna(
    matrix: JacobiMatrix,
    z: complex,
    trunc: int | None = None,
    *,
    precision: int = HIGH_PRECISION,
    check: bool = True,
) -> NevanlinnaValue:
    """
    Evaluate the Nevanlinna matrix A, B, C, D at z.

    A = zΣQ_k(0)Q_k(z), B = −1 + zΣQ_k(0)P_k(z), C = 1 + zΣP_k(0)Q_k(z),
    D = zΣP_k(0)P_k(z).

    Args:
        matrix (JacobiMatrix): A limit-circle matrix.
        z (complex): The evaluation point.
        trunc (int | None): Number of terms; automatic when None (stop once the last
            term is below 1e-30 relative for three consecutive k).
        precision (int): Mantissa bits.
        check (bool): Classify the matrix first.

    Raises:
        JacobiMatrix.LimitPointError: If the matrix is limit point.
        SeriesConvergenceError: If the automatic truncation does not settle.

    Returns:
        NevanlinnaValue: The four entries.
    """

    if check:
        _require_limit_circle(matrix)
    return _nevanlinna_series(matrix, z, trunc, precision)


class NearPoleError(DomainError):
    """The Weyl function was evaluated next to one of its poles."""

    def __init__(self, z: complex, hint: float | None) -> None:
        """
        Initialize the exception.

        Args:
            z: The evaluation point.
            hint: The nearest eigenvalue of the extension, when found.
        """

        where: str = f"; nearest eigenvalue ≈ {hint:.12g}" if hint is not None else ""
        super().__init__(f"near pole at z = {z!r}{where}")


def _mobius(value: NevanlinnaValue, t: ExtensionParameter) -> tuple[Any, Any]:
    if t is None or math.isinf(t):
        return value.a, value.b
    return t * value.a - value.c, t * value.b - value.d


def weyl_function(
    matrix: JacobiMatrix,
    t: ExtensionParameter,
    z: complex,
    *,
    precision: int = HIGH_PRECISION,
) -> complex:
    """
    Return −(tA − C)/(tB − D), or −A/B for t = ∞.

    The value is ∫ dμ_t(x)/(x − z) for the extremal measure μ_t, so that iy·W(iy)
    tends to −1.

    Raises:
        NearPoleError: If |tB − D| < 1e-30.
    """

    value: NevanlinnaValue = nevanlinna(matrix, z, precision=precision)
    with workprec(precision):
        numerator, denominator = _mobius(value, t)
        if abs(denominator) < NEAR_POLE:
            raise NearPoleError(complex(z), _nearest_root(matrix, t, complex(z).real))
        return complex(-numerator / denominator)


def _nearest_root(
    matrix: JacobiMatrix, t: ExtensionParameter, x: float
) -> float | None:
    radius: float = max(1.0, 0.1 * abs(x))
    try:
        roots: list[float] = _support(
            matrix, t, (x - radius, x + radius), HIGH_PRECISION
        )
    except ResolutionError:
        return None
    return min(roots, key=lambda r: abs(r - x)) if roots else None


def _denominator(
    matrix: JacobiMatrix, t: ExtensionParameter, trunc: int
) -> Callable[[NDArray[np.float64]], NDArray[np.float64]]:
    def func(x: NDArray[np.float64]) -> NDArray[np.float64]:
        zero_p: NDArray[np.float64] = poly_table(matrix, [0.0], trunc)[:, 0].real
        zero_q: NDArray[np.float64] = poly_table(
            matrix, [0.0], trunc, second_kind=True
        )[:, 0].real
        p: NDArray[np.float64] = poly_table(matrix, x, trunc).real
        d: NDArray[np.float64] = x * (zero_p @ p)
        b: NDArray[np.float64] = -1.0 + x * (zero_q @ p)
        if t is None or math.isinf(t):
            return b
        return t * b - d

    return func


def _support(
    matrix: JacobiMatrix,
    t: ExtensionParameter,
    window: tuple[float, float],
    precision: int,
) -> list[float]:
    lo, hi = window
    reach: float = max(abs(lo), abs(hi), 1.0)
    trunc: int = _nevanlinna_series(matrix, reach, None, precision).trunc

    def asinh_grid(s: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.sinh(np.arcsinh(lo) + (np.arcsinh(hi) - np.arcsinh(lo)) * s)

    left, right = scan_brackets(_denominator(matrix, t, trunc), lo, hi, grid=asinh_grid)

    def exact(x: float) -> float:
        value: NevanlinnaValue = _nevanlinna_series(matrix, x, trunc, precision)
        with workprec(precision):
            _, denominator = _mobius(value, t)
            return float(mpmath.re(denominator))

    return [refine_scalar(exact, float(a), float(b)) for a, b in zip(left, right)]


def christoffel_weights(
    matrix: JacobiMatrix,
    points: Sequence[float],
    n: int | None = None,
    *,
    precision: int = HIGH_PRECISION,
) -> list[float]:
    """
    Return 1/Σ_k P_k(λ)² at each point.

    Args:
        matrix (JacobiMatrix): The matrix.
        points (Sequence[float]): Real points.
        n (int | None): Sum over k < n; the whole limit-circle series when None.
        precision (int): Mantissa bits.

    Raises:
        SeriesConvergenceError: If the infinite sum does not settle.

    Returns:
        list[float]: The weights.
    """

    weights: list[float] = []
    for x in points:
        if n is not None:
            values: PolynomialValues = eval_polys(
                matrix, x, n - 1, precision=precision
            )
            with workprec(precision):
                weights.append(float(1 / mpmath.fsum(abs(v) ** 2 for v in values.p)))
            continue
        weights.append(_infinite_christoffel(matrix, x, precision))
    return weights


def _infinite_christoffel(matrix: JacobiMatrix, x: float, precision: int) -> float:
    chunk: int = 64
    while chunk <= MAX_SERIES_TERMS:
        values: PolynomialValues = eval_polys(matrix, x, chunk, precision=precision)
        with workprec(precision):
            squares: list[mpmath.mpf] = [abs(v) ** 2 for v in values.p]
            total: mpmath.mpf = mpmath.fsum(squares)
            if all(s < SERIES_RTOL * total for s in squares[-SERIES_QUIET_TERMS:]):
                return float(1 / total)
        chunk *= 2
    raise SeriesConvergenceError(MAX_SERIES_TERMS)


def extremal_measure(
    matrix: JacobiMatrix,
    t: ExtensionParameter,
    window: tuple[float, float],
    *,
    precision: int = HIGH_PRECISION,
) -> DiscreteMeasure:
    """
    Return the N-extremal measure μ_t restricted to a window.

    The atoms are the zeros of tB − D (of B for t = ∞), bracketed on an adaptive grid
    and refined to 1e-12 relative, with weights 1/Σ_k P_k(λ)².

    Args:
        matrix (JacobiMatrix): A limit-circle matrix.
        t (ExtensionParameter): The extension parameter, None for ∞.
        window (tuple[float, float]): The bounded scan window.
        precision (int): Mantissa bits of the series.

    Raises:
        JacobiMatrix.LimitPointError: If the matrix is limit point.
        BracketCountError: If the grid scan does not stabilize.

    Returns:
        DiscreteMeasure: The windowed measure; its tail mass is 1 − Σ weights.
    """

    _require_limit_circle(matrix)
    lo, hi = window
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        error_msg = f"window [{lo}, {hi}] must be bounded and non-empty"
        raise DomainError(error_msg)

    roots: list[float] = _support(matrix, t, window, precision)
    weights: list[float] = christoffel_weights(matrix, roots, precision=precision)
    logging.info(
        "Extremal measure t=%s on [%g, %g]: %d atoms", t, lo, hi, len(roots)
    )
    return DiscreteMeasure.from_atoms(
        zip(roots, weights),
        window=window,
        tail_flag=True,
        tail_mass=max(0.0, 1.0 - math.fsum(weights)),
    )


def extension_parameter(
    matrix: JacobiMatrix, lam: float, *, precision: int = HIGH_PRECISION
) -> ExtensionParameter:
    """Return the t whose extremal measure has an atom at λ: D(λ)/B(λ), None for ∞."""

    value: NevanlinnaValue = nevanlinna(matrix, lam, precision=precision, check=False)
    with workprec(precision):
        if abs(value.b) < NEAR_POLE:
            return None
        return float(mpmath.re(value.d / value.b))


def residue_weight(
    matrix: JacobiMatrix,
    t: ExtensionParameter,
    lam: float,
    *,
    precision: int = HIGH_PRECISION,
) -> float:
    """Return −Res_{z=λ} W(z) = (tA − C)/(tB − D)' at λ, differentiating numerically."""

    reach: float = max(1.0, abs(lam))
    trunc: int = _nevanlinna_series(matrix, reach, None, precision).trunc + 8
    with workprec(precision):

        def denominator(x: mpmath.mpf) -> mpmath.mpc:
            return _mobius(_nevanlinna_series(matrix, x, trunc, precision), t)[1]

        slope: mpmath.mpc = mpmath.diff(denominator, mpmath.mpf(lam))
        numerator, _ = _mobius(_nevanlinna_series(matrix, lam, trunc, precision), t)
        return float(mpmath.re(numerator / slope))


def moments_from_matrix(matrix: JacobiMatrix, kmax: int) -> list[float]:
    """Return s_k = ⟨δ_1, J^k δ_1⟩ for k = 0..kmax by truncated matrix powers."""

    n: int = kmax // 2 + 2
    if matrix.size is not None:
        n = min(n, matrix.size)
    q, b = matrix.float_coefficients(n, truncation=True)
    dense: NDArray[np.float64] = np.diag(q) + np.diag(b, 1) + np.diag(b, -1)
    vector: NDArray[np.float64] = np.zeros(n)
    vector[0] = 1.0
    moments: list[float] = []
    for _ in range(kmax + 1):
        moments.append(float(vector[0]))
        vector = dense @ vector
    return moments


class RankError(DomainError):
    """A measure has too few atoms for the requested reconstruction."""

    def __init__(self, atoms: int, n: int) -> None:
        """
        Initialize the exception.

        Args:
            atoms: Number of atoms available.
            n: Requested matrix size.
        """

        super().__init__(f"rank error: {atoms} atoms cannot support a {n}x{n} matrix")


def stieltjes_reconstruct(mu: DiscreteMeasure, n: int) -> JacobiMatrix:
    """
    Recover the n×n Jacobi matrix of a finite measure by the Stieltjes procedure.

    The procedure runs the Lanczos recurrence on diag(points) from the vector of square
    root weights, with full reorthogonalization; raw moments are never formed.

    Args:
        mu (DiscreteMeasure): A measure with at least n atoms.
        n (int): The matrix size.

    Raises:
        RankError: If the measure has fewer than n atoms.

    Returns:
        JacobiMatrix: The finite matrix; b_n is included when the measure supports it.
    """

    if n < 1 or len(mu) < n:
        raise RankError(len(mu), n)
    mass: float = math.fsum(w for _, w in mu.atoms)
    if abs(mass - 1.0) > 1e-12:  # noqa: PLR2004
        logging.warning("Normalizing measure of mass %.17g to s_0 = 1", mass)

    x: NDArray[np.float64] = mu.points
    basis: NDArray[np.float64] = np.zeros((n + 1, x.size))
    basis[0] = np.sqrt(mu.weights / mass)
    alphas: list[float] = []
    betas: list[float] = []
    for k in range(n):
        product: NDArray[np.float64] = x * basis[k]
        alphas.append(float(basis[k] @ product))
        residual: NDArray[np.float64] = product - alphas[k] * basis[k]
        if k:
            residual -= betas[k - 1] * basis[k - 1]
        for _ in range(2):
            residual -= basis[: k + 1].T @ (basis[: k + 1] @ residual)
        if k == n - 1 and len(mu) == n:
            # The Krylov space is exhausted: there is no b_n.
            break
        betas.append(float(np.linalg.norm(residual)))
        basis[k + 1] = residual / betas[k]
    logging.debug("Stieltjes procedure: b = %s", betas)
    return JacobiMatrix.from_lists(alphas, betas)


def truncation_spectrum(matrix: JacobiMatrix, n: int) -> list[float]:
    """
    Return the eigenvalues of the top-left n×n block, by Sturm-sequence bisection.

    Raises:
        DomainError: If n < 1.
    """

    if n < 1:
        error_msg = f"truncation size {n} must be at least 1"
        raise DomainError(error_msg)
    q, b = matrix.float_coefficients(n, truncation=True)
    radius: NDArray[np.float64] = np.zeros(n)
    radius[:-1] += np.abs(b)
    radius[1:] += np.abs(b)
    lo: NDArray[np.float64] = np.full(n, float(np.min(q - radius)))
    hi: NDArray[np.float64] = np.full(n, float(np.max(q + radius)))
    index: NDArray[np.intp] = np.arange(n)
    squares: NDArray[np.float64] = b**2
    scale: float = max(float(np.max(np.abs(hi))), float(np.max(np.abs(lo))), 1e-300)

    def count_below(x: NDArray[np.float64]) -> NDArray[np.intp]:
        pivot: NDArray[np.float64] = q[0] - x
        negatives: NDArray[np.intp] = (pivot < 0).astype(np.intp)
        for k in range(1, n):
            pivot = np.where(pivot == 0, np.finfo(float).tiny, pivot)
            pivot = q[k] - x - squares[k - 1] / pivot
            negatives += pivot < 0
        return negatives

    for _ in range(200):
        if np.all(hi - lo <= 4 * np.finfo(float).eps * scale):
            break
        mid: NDArray[np.float64] = 0.5 * (lo + hi)
        below: NDArray[np.bool_] = count_below(mid) > index
        hi = np.where(below, mid, hi)
        lo = np.where(below, lo, mid)
    return [float(v) for v in 0.5 * (lo + hi)]

"""Read problem, measure and kernel files; write result artifacts atomically."""

from __future__ import annotations

import json
import logging
import tempfile
from pathlib import Path
from typing import Any, Union

from kreinlab import (
    BesselProblem,
    DiscreteMeasure,
    DomainError,
    JacobiMatrix,
    Kernel,
    SchrodingerProblem,
)
from kreinlab._quadrature import ABS_TOL
from kreinlab.measures import from_json

from ._enums import ProblemKind, get_enum_member

Problem = Union[JacobiMatrix, SchrodingerProblem, BesselProblem]


class ProblemFileError(DomainError):
    """A file could not be read or does not describe what was expected."""

    def __init__(self, path: str, reason: str) -> None:
        """
        Initialize the exception.

        Args:
            path: The offending file.
            reason: What is wrong with it.
        """

        super().__init__(f"{path}: {reason}")


def read_json(path: str) -> dict[str, Any]:
    """
    Read a JSON object from a file.

    Raises:
        ProblemFileError: If the file is missing, unreadable or not a JSON object.
    """

    try:
        with Path(path).open(encoding="utf-8") as f:
            data: Any = json.load(f)
    except OSError as e:
        raise ProblemFileError(path, e.strerror or str(e)) from e
    except json.JSONDecodeError as e:
        error_msg = f"invalid JSON at [{e.lineno}, {e.colno}]: {e.msg}"
        raise ProblemFileError(path, error_msg) from e
    if not isinstance(data, dict):
        raise ProblemFileError(path, "expected a JSON object")
    return data  # pyright: ignore[reportUnknownVariableType]


def problem_kind(config: dict[str, Any]) -> ProblemKind:
    """
    Tell which family a problem configuration describes.

    An explicit "kind" key wins; otherwise "diag" means Jacobi, "nu" Bessel and "b"
    Schrödinger.

    Raises:
        DomainError: If the kind cannot be determined.
    """

    if "kind" in config:
        try:
            return get_enum_member(ProblemKind, config["kind"])
        except ValueError as e:
            raise DomainError(str(e)) from e
    if "diag" in config:
        return ProblemKind.JACOBI
    if "nu" in config:
        return ProblemKind.BESSEL
    if "b" in config:
        return ProblemKind.STURM
    error_msg = "cannot tell the problem kind (expected 'kind', 'diag', 'nu' or 'b')"
    raise DomainError(error_msg)


def build_problem(config: dict[str, Any]) -> Problem:
    """Build the operator a problem configuration describes."""

    kind: ProblemKind = problem_kind(config)
    if kind is ProblemKind.JACOBI:
        return JacobiMatrix.from_config(config)
    if kind is ProblemKind.BESSEL:
        return BesselProblem.from_config(config)
    return SchrodingerProblem.from_config(config)


def load_problem(path: str) -> Problem:
    """Read and build a problem file."""

    problem: Problem = build_problem(read_json(path))
    logging.info("Loaded %s from %s", type(problem).__name__, path)
    return problem


def load_measure(path: str) -> DiscreteMeasure:
    """Read a measure file."""

    return from_json(read_json(path))


def build_kernel(config: dict[str, Any], *, tol: float = ABS_TOL) -> Kernel:
    """
    Build a kernel from a problem configuration.

    Optional keys: "trunc" (Jacobi polynomial degree) and "perturbations", a list of
    [λ, a] pairs applied in order. `tol` is the quadrature target of the Schrödinger
    and Bessel kernels.
    """

    problem: Problem = build_problem(config)
    kernel: Kernel
    if isinstance(problem, JacobiMatrix):
        trunc: Any = config.get("trunc")
        try:
            degree: int | None = None if trunc is None else int(trunc)
        except (TypeError, ValueError) as e:
            error_msg = f"malformed trunc ({e})"
            raise DomainError(error_msg) from e
        kernel = Kernel.for_jacobi(problem, degree)
    elif isinstance(problem, BesselProblem):
        kernel = Kernel.for_bessel(problem, tol)
    else:
        kernel = Kernel.for_sturm(problem, tol)
    try:
        updates: list[tuple[float, float]] = [
            (float(lam), float(a)) for lam, a in config.get("perturbations", [])
        ]
    except (TypeError, ValueError) as e:
        error_msg = f"malformed perturbations ({e})"
        raise DomainError(error_msg) from e
    for lam, a in updates:
        kernel = kernel.perturbed(lam, a)
    return kernel


def load_kernel(path: str, *, tol: float = ABS_TOL) -> Kernel:
    """Read a kernel file."""

    return build_kernel(read_json(path), tol=tol)


def write_atomically(path: str, text: str) -> None:
    """
    Write `text` to `path` through a temporary file in the same directory.

    Raises:
        ProblemFileError: If the file cannot be written.
    """

    target: Path = Path(path)
    temporary: Path | None = None
    try:
        with tempfile.NamedTemporaryFile(
            "w",
            encoding="utf-8",
            dir=target.parent if str(target.parent) else Path(),
            prefix=f".{target.name}.",
            delete=False,
        ) as f:
            temporary = Path(f.name)
            f.write(text)
        temporary.replace(target)
    except OSError as e:
        if temporary is not None:
            temporary.unlink(missing_ok=True)
        raise ProblemFileError(path, e.strerror or str(e)) from e
    logging.debug("Wrote %d characters to %s", len(text), path)

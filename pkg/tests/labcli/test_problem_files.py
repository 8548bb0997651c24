"""Validate reading problem, measure and kernel files and writing artifacts."""

# pylint: disable=protected-access

# pyright: reportPrivateUsage=none

from __future__ import annotations

from typing import TYPE_CHECKING, Any

import pytest

from kreinlab import (
    BesselProblem,
    DiscreteMeasure,
    DomainError,
    JacobiMatrix,
    Kernel,
    SchrodingerProblem,
)
from kreinlab import measures as ms
from labcli import _problem_files as pf
from labcli._enums import ProblemKind
from tests.reference_problems import sample_measure, write_json

if TYPE_CHECKING:
    from pathlib import Path


@pytest.mark.parametrize(
    ("config", "kind"),
    [
        ({"diag": "0", "offdiag": "2^k"}, ProblemKind.JACOBI),
        ({"nu": 1.0, "b": 1.0}, ProblemKind.BESSEL),
        ({"b": 3.0}, ProblemKind.STURM),
        ({"kind": "sturm", "b": 3.0, "nu": 2.0}, ProblemKind.STURM),
    ],
)
def test_problem_kind(config: dict[str, Any], kind: ProblemKind) -> None:
    """Verify the family is read from the explicit kind or the telltale keys."""

    assert pf.problem_kind(config) is kind


@pytest.mark.parametrize(
    ("config", "message"),
    [
        ({"kind": "hermite"}, "not a valid member"),
        ({"q": "x"}, "cannot tell the problem kind"),
    ],
)
def test_problem_kind_invalid(config: dict[str, Any], message: str) -> None:
    """Ensure unknown kinds and key sets are rejected."""

    with pytest.raises(DomainError, match=message):
        pf.problem_kind(config)


def test_load_problem(tmp_path: Path) -> None:
    """Verify each family loads from its problem file."""

    jacobi: str = write_json(tmp_path / "j.json", {"diag": "0", "offdiag": "2^k"})
    sturm: str = write_json(tmp_path / "s.json", {"b": 3.0, "q": "sin(x)"})
    bessel: str = write_json(tmp_path / "b.json", {"nu": 1.5, "b": 2.0})
    assert isinstance(pf.load_problem(jacobi), JacobiMatrix)
    assert isinstance(pf.load_problem(sturm), SchrodingerProblem)
    assert isinstance(pf.load_problem(bessel), BesselProblem)


def test_read_json_errors(tmp_path: Path) -> None:
    """Ensure missing files, invalid JSON and non-objects are reported with the path."""

    with pytest.raises(pf.ProblemFileError, match="missing.json"):
        pf.read_json(str(tmp_path / "missing.json"))
    broken: Path = tmp_path / "broken.json"
    broken.write_text("{", encoding="utf-8")
    with pytest.raises(pf.ProblemFileError, match="invalid JSON"):
        pf.read_json(str(broken))
    listed: Path = tmp_path / "list.json"
    listed.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(pf.ProblemFileError, match="expected a JSON object"):
        pf.read_json(str(listed))


def test_load_measure(tmp_path: Path) -> None:
    """Verify a measure file loads to an equal measure."""

    mu: DiscreteMeasure = sample_measure()
    path: str = write_json(tmp_path / "mu.json", ms.to_json(mu))
    assert pf.load_measure(path) == mu


def test_build_kernel_with_perturbations() -> None:
    """Verify truncation and perturbations are read from the kernel file."""

    config: dict[str, Any] = {
        "diag": [0.0, 0.0, 0.0],
        "offdiag": [1.0, 1.0],
        "perturbations": [[0.5, 1.0], [-0.5, 2]],
    }
    kernel: Kernel = pf.build_kernel(config)
    assert kernel.backend.name == "jacobi"
    assert kernel.perturbations == ((0.5, 1.0), (-0.5, 2.0))


@pytest.mark.parametrize(
    ("perturbations", "message"),
    [
        ([[0.5]], "malformed perturbations"),
        ([["left", 1.0]], "malformed perturbations"),
        ([[0.5, -1.0]], "must be > 0"),
    ],
)
def test_build_kernel_invalid_perturbations(
    perturbations: list[list[Any]], message: str
) -> None:
    """Ensure malformed perturbation lists and negative masses are rejected."""

    config: dict[str, Any] = {"b": 3.0, "perturbations": perturbations}
    with pytest.raises(DomainError, match=message):
        pf.build_kernel(config)


def test_write_atomically(tmp_path: Path) -> None:
    """Verify artifacts are written whole and temporary files are cleaned up."""

    target: Path = tmp_path / "out.csv"
    pf.write_atomically(str(target), "point,weight\n")
    pf.write_atomically(str(target), "point,weight\n1,2\n")
    assert target.read_text(encoding="utf-8") == "point,weight\n1,2\n"
    assert [p.name for p in tmp_path.iterdir()] == ["out.csv"]


def test_write_atomically_missing_directory(tmp_path: Path) -> None:
    """Ensure writing into a missing directory raises ProblemFileError."""

    with pytest.raises(pf.ProblemFileError, match="out.json"):
        pf.write_atomically(str(tmp_path / "nowhere" / "out.json"), "{}")


def test_write_atomically_failed_replace(tmp_path: Path) -> None:
    """Ensure a failed replace leaves no temporary file behind."""

    (tmp_path / "out").mkdir()
    with pytest.raises(pf.ProblemFileError, match="out"):
        pf.write_atomically(str(tmp_path / "out"), "{}")
    assert [p.name for p in tmp_path.iterdir()] == ["out"]


@pytest.mark.parametrize(
    ("config", "message"),
    [
        ({"diag": [0.0, 0.0], "offdiag": [1.0], "trunc": "abc"}, "malformed trunc"),
        ({"diag": [0.0, 0.0], "offdiag": [1.0], "trunc": [2]}, "malformed trunc"),
        ({"diag": ["abc"], "offdiag": []}, "invalid Jacobi coefficient"),
        ({"diag": [0.0, None], "offdiag": [1.0]}, "invalid Jacobi coefficient"),
    ],
)
def test_build_kernel_malformed_entries(config: dict[str, Any], message: str) -> None:
    """Ensure non-numeric coefficients and truncations raise DomainError."""

    with pytest.raises(DomainError, match=message):
        pf.build_kernel(config)

"""Validate the invariant suites and their summaries."""

# pylint: disable=protected-access

# pyright: reportPrivateUsage=none

from __future__ import annotations

import math
from typing import TYPE_CHECKING, Any

import pytest

from kreinlab import DomainError
from labcli import CheckResult, KreinLab
from labcli import cli as lc
from labcli import verify as vf
from labcli._enums import Suite

if TYPE_CHECKING:
    from pathlib import Path


@pytest.fixture(name="results")
def fixture_results() -> list[CheckResult]:
    """
    Provide a passing, a failing and a crashed check.

    Returns:
        list[CheckResult]: Three summary rows.
    """

    return [
        CheckResult(Suite.MEASURES, "zeroth moment", 1e-16, 1e-14),
        CheckResult(Suite.JACOBI, "AD−BC=1", 1e-3, 1e-18),
        CheckResult(Suite.STURM, "Parseval", math.inf, 0.0),
    ]


def test_check_result_passed(results: list[CheckResult]) -> None:
    """Verify only finite errors within the tolerance pass."""

    assert [r.passed for r in results] == [True, False, False]


def test_summary_table(results: list[CheckResult]) -> None:
    """Verify the summary table lists every check with its outcome."""

    lines: list[str] = vf.summary_table(results).splitlines()
    assert lines[0].split() == ["suite", "check", "error", "tolerance", "result"]
    assert lines[1].endswith("pass")
    assert "AD−BC=1" in lines[2]
    assert lines[2].endswith("FAIL")
    assert "inf" in lines[3]


def test_summary_json(results: list[CheckResult]) -> None:
    """Verify the JSON summary maps infinite errors to null."""

    data: dict[str, Any] = vf.summary_json(results)
    assert data["passed"] is False
    assert data["checks"][0] == {
        "suite": "measures",
        "check": "zeroth moment",
        "error": 1e-16,
        "tolerance": 1e-14,
        "passed": True,
    }
    assert data["checks"][2]["error"] is None


def test_suite_names() -> None:
    """Verify each suite registers its checks and `all` runs every one of them."""

    assert "AD−BC=1" in vf.suite_names(Suite.JACOBI)
    assert "density defect 1/(1+π)" in vf.suite_names(Suite.DEBRANGES)
    every: list[str] = vf.suite_names(Suite.ALL)
    assert len(every) == sum(
        len(vf.suite_names(s)) for s in Suite if s is not Suite.ALL
    )


@pytest.mark.parametrize(
    ("suite", "name"),
    [
        (Suite.MEASURES, "Cauchy transform is Herglotz"),
        (Suite.JACOBI, "extremal moments vs ⟨δ₁, Jᵏδ₁⟩"),
        (Suite.STURM, "eigenvalue count in [0, Λ]"),
        (Suite.STURM, "spectral measures extremal for three γ"),
        (Suite.BESSEL, "supports interlace"),
        (Suite.BESSEL, "κ at γ=π/4, ν=2"),
        (Suite.BESSEL, "relabeled prepend shifts κ by +1"),
    ],
)
def test_registered_checks(suite: Suite, name: str) -> None:
    """Verify each suite registers its structural checks."""

    assert name in vf.suite_names(suite)


@pytest.mark.timeout(120)
@pytest.mark.parametrize(
    "check",
    [vf._eigenvalue_count, vf._kappa_robin_half, vf._bessel_interlacing],
)
def test_single_checks_pass(check: vf.Check) -> None:
    """Verify the spectrum count, Robin κ and Bessel interlacing checks pass."""

    error, tolerance = check()
    assert error <= tolerance


def test_measures_suite_passes() -> None:
    """Verify every measure check passes."""

    results: list[CheckResult] = vf.run_suite(Suite.MEASURES)
    assert results
    assert all(r.passed for r in results), vf.summary_table(results)


@pytest.mark.timeout(600)
def test_jacobi_suite_passes() -> None:
    """Verify every Jacobi check passes, the determinant identity included."""

    results: list[CheckResult] = vf.run_suite(Suite.JACOBI)
    names: list[str] = [r.name for r in results]
    assert "AD−BC=1" in names
    assert all(r.passed for r in results), vf.summary_table(results)


def test_crashing_check_fails(monkeypatch: pytest.MonkeyPatch) -> None:
    """Ensure a check raising a library error is reported as failed."""

    def crash() -> tuple[float, float]:
        error_msg = "no reference"
        raise DomainError(error_msg)

    monkeypatch.setitem(vf._CHECKS, Suite.MEASURES, [("crash", crash)])
    (result,) = vf.run_suite(Suite.MEASURES)
    assert not result.passed
    assert math.isinf(result.error)


def test_verify_verb_exit_codes(
    monkeypatch: pytest.MonkeyPatch,
    tmp_path: Path,
    capsys: pytest.CaptureFixture[str],
) -> None:
    """Verify the verify verb prints the table, writes JSON and exits 1 on failure."""

    monkeypatch.setitem(vf._CHECKS, Suite.MEASURES, [("fine", lambda: (0.0, 1.0))])
    output: Path = tmp_path / "summary.json"
    app: KreinLab = KreinLab()
    assert app.run(["verify", "measures", "--output", str(output)]) == lc.EXIT_OK
    assert "fine" in capsys.readouterr().out
    assert '"passed": true' in output.read_text(encoding="utf-8")

    monkeypatch.setitem(vf._CHECKS, Suite.MEASURES, [("off", lambda: (2.0, 1.0))])
    assert app.run(["verify", "measures"]) == lc.EXIT_CHECKS_FAILED

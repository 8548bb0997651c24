"""The krein-lab batch front end."""

from __future__ import annotations

import argparse
import copy
import json
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Any, Final, NoReturn

from kreinlab import (
    BesselProblem,
    DiscreteMeasure,
    DomainError,
    JacobiMatrix,
    Kernel,
    Profile,
    ResolutionError,
    SchrodingerProblem,
    bessel,
    debranges,
    jacobi,
    measures,
    sturm,
)

from . import verify
from ._enums import OutputFormat, Suite, Verb, get_enum_member
from ._formatting import as_complex, as_csv
from ._problem_files import (
    Problem,
    load_kernel,
    load_measure,
    load_problem,
    write_atomically,
)
from .lab_settings import LabSettings

if TYPE_CHECKING:
    from collections.abc import Sequence
    from io import TextIOWrapper

if sys.version_info >= (3, 12):
    from typing import override
else:
    from typing_extensions import override

EXIT_OK: Final[int] = 0
EXIT_CHECKS_FAILED: Final[int] = 1
EXIT_DOMAIN: Final[int] = 2
EXIT_RESOLUTION: Final[int] = 3

_DEFAULT_KV_COUNT: Final[int] = 2000


class UsageError(DomainError):
    """The command line could not be understood."""

    def __init__(self, message: str) -> None:
        """
        Initialize the exception.

        Args:
            message: What argparse or the verb dispatcher complained about.
        """

        super().__init__(f"usage: {message}")


class _Parser(argparse.ArgumentParser):
    """An argument parser that raises instead of exiting."""

    @override
    def error(self, message: str) -> NoReturn:
        raise UsageError(message)


@dataclass(frozen=True)
class Artifact:
    """The result of one verb, in both output forms."""

    data: dict[str, Any]
    """The JSON form."""

    csv: str | None = None
    """The CSV form, when the verb has one."""


##########
# Argument parsing
##########


def _window(text: str) -> tuple[float, float]:
    lo, sep, hi = text.partition(":")
    try:
        if not sep:
            raise ValueError(text)  # noqa: TRY301
        return float(lo), float(hi)
    except ValueError as e:
        error_msg = f"window must read LO:HI, got {text!r}"
        raise argparse.ArgumentTypeError(error_msg) from e


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as e:
        error_msg = f"not a complex number: {text!r}"
        raise argparse.ArgumentTypeError(error_msg) from e


def build_parser() -> argparse.ArgumentParser:
    """Return the parser of the krein-lab command line."""

    parser: argparse.ArgumentParser = _Parser(
        prog="krein-lab",
        description="Spectral measures, de Branges kernels and extremality checks.",
    )
    parser.add_argument("verb", help=", ".join(v.value for v in Verb))
    parser.add_argument("suite", nargs="?", help="suite for the verify verb")
    parser.add_argument("--input", help="problem file (JSON)")
    parser.add_argument("--output", help="result file; standard output when omitted")
    parser.add_argument("--measure", help="measure file (JSON)")
    parser.add_argument("--kernel", help="kernel file (JSON)")
    parser.add_argument("--count", type=int, help="number of eigenvalues or atoms")
    parser.add_argument("--window", type=_window, help="spectral window LO:HI")
    parser.add_argument("--lambda", dest="lam", type=float, help="a real point")
    parser.add_argument("--a", type=float, help="a point mass")
    parser.add_argument(
        "--t", type=float, help="extension parameter t (inf if omitted) or gamma"
    )
    parser.add_argument("--z", type=_complex, help="complex evaluation point")
    parser.add_argument("--phi", default="1", help="test function, expression in x")
    parser.add_argument("--tol", type=float, help="relative weight tolerance")
    parser.add_argument("--precision", type=int, help="mantissa bits (>= 53)")
    parser.add_argument(
        "--format", default=OutputFormat.JSON.value, help="json or csv"
    )
    parser.add_argument("--jobs", type=int, help="concurrent scan windows")
    parser.add_argument(
        "--relabel",
        action="store_true",
        help="enumerate a Bessel spectrum with a prepended point from two lower",
    )
    return parser


##########
# Verbs
##########


def _require(value: Any, flag: str, verb: Verb) -> Any:  # noqa: ANN401
    if value is None:
        error_msg = f"{verb.value} needs {flag}"
        raise UsageError(error_msg)
    return value


def _jacobi_parameter(t: float | None) -> float | None:
    if t is None:
        logging.warning("No --t given: using the extension t = inf")
    return t


def _with_gamma(problem: Problem, gamma: float | None) -> Problem:
    if gamma is None or isinstance(problem, JacobiMatrix):
        return problem
    return problem.with_gamma(gamma)


def _eigenvalues(
    problem: Problem, args: argparse.Namespace, settings: LabSettings
) -> list[float]:
    if isinstance(problem, JacobiMatrix):
        if problem.size is not None:
            eigs: list[float] = jacobi.truncation_spectrum(
                problem, args.count or problem.size
            )
        else:
            eigs = jacobi.extremal_measure(
                problem,
                _jacobi_parameter(args.t),
                _require(args.window, "--window", Verb.SPECTRUM),
                precision=settings.precision,
            ).points.tolist()
        return eigs[: args.count] if args.count else eigs
    if isinstance(problem, BesselProblem):
        return bessel.eigenvalues_bessel(
            problem, args.count, window=args.window, jobs=settings.jobs
        )
    return sturm.eigenvalues(
        problem, args.count, window=args.window, jobs=settings.jobs
    )


def _spectrum(args: argparse.Namespace, settings: LabSettings) -> Artifact:
    problem: Problem = _with_gamma(
        load_problem(_require(args.input, "--input", Verb.SPECTRUM)), args.t
    )
    eigs: list[float] = _eigenvalues(problem, args, settings)
    return Artifact(
        {"eigenvalues": eigs, "count": len(eigs)},
        as_csv(["n", "lambda"], [(n, x) for n, x in enumerate(eigs, 1)]),
    )


def _measure(args: argparse.Namespace, settings: LabSettings) -> Artifact:
    problem: Problem = _with_gamma(
        load_problem(_require(args.input, "--input", Verb.MEASURE)), args.t
    )
    mu: DiscreteMeasure
    if isinstance(problem, JacobiMatrix):
        if problem.size is not None:
            points: list[float] = jacobi.truncation_spectrum(problem, problem.size)
            weights: list[float] = jacobi.christoffel_weights(
                problem, points, problem.size, precision=settings.precision
            )
            mu = DiscreteMeasure.from_atoms(zip(points, weights))
        else:
            mu = jacobi.extremal_measure(
                problem,
                _jacobi_parameter(args.t),
                _require(args.window, "--window", Verb.MEASURE),
                precision=settings.precision,
            )
    else:
        count: int = _require(args.count, "--count", Verb.MEASURE)
        if isinstance(problem, BesselProblem):
            mu = bessel.spectral_measure_bessel(problem, count, jobs=settings.jobs)
        else:
            mu = sturm.spectral_measure(problem, count, jobs=settings.jobs)
    return Artifact(measures.to_json(mu), measures.to_csv(mu))


def _perturb(args: argparse.Namespace, settings: LabSettings) -> Artifact:
    mu: DiscreteMeasure = load_measure(
        _require(args.measure, "--measure", Verb.PERTURB)
    )
    grown: DiscreteMeasure = measures.add_point_mass(
        mu,
        _require(args.lam, "--lambda", Verb.PERTURB),
        _require(args.a, "--a", Verb.PERTURB),
        merge_tol=settings.merge_tol,
    )
    return Artifact(measures.to_json(grown), measures.to_csv(grown))


def _extremality(args: argparse.Namespace, settings: LabSettings) -> Artifact:
    mu: DiscreteMeasure = load_measure(
        _require(args.measure, "--measure", Verb.EXTREMALITY)
    )
    kernel: Kernel = load_kernel(
        _require(args.kernel, "--kernel", Verb.EXTREMALITY), tol=settings.quadrature_tol
    )
    report: debranges.ExtremalityReport = debranges.is_extremal(
        mu, kernel, args.tol if args.tol is not None else debranges.EXTREMAL_TOL
    )
    return Artifact(
        report.to_json(),
        as_csv(
            ["point", "weight", "expected", "gap"],
            [(a.point, a.weight, a.expected, a.gap) for a in report.atoms],
        ),
    )


def _defect(args: argparse.Namespace, settings: LabSettings) -> Artifact:
    kernel: Kernel = load_kernel(
        _require(args.kernel, "--kernel", Verb.DEFECT), tol=settings.quadrature_tol
    )
    lam: float = _require(args.lam, "--lambda", Verb.DEFECT)
    a: float = _require(args.a, "--a", Verb.DEFECT)
    return Artifact(
        {
            "lambda": lam,
            "a": a,
            "defect": debranges.density_defect(kernel, lam, a),
            "kernel_diagonal": float(kernel.diagonal([lam])[0]),
        }
    )


def _jacobi_input(args: argparse.Namespace, verb: Verb) -> JacobiMatrix:
    problem: Problem = load_problem(_require(args.input, "--input", verb))
    if not isinstance(problem, JacobiMatrix):
        error_msg = f"{verb.value} needs a Jacobi matrix, got {type(problem).__name__}"
        raise UsageError(error_msg)
    return problem


def _nevanlinna(args: argparse.Namespace, settings: LabSettings) -> Artifact:
    matrix: JacobiMatrix = _jacobi_input(args, Verb.NEVANLINNA)
    z: complex = _require(args.z, "--z", Verb.NEVANLINNA)
    value: jacobi.NevanlinnaValue = jacobi.nevanlinna(
        matrix, z, precision=settings.precision
    )
    return Artifact(
        {
            "z": as_complex(z),
            "A": as_complex(complex(value.a)),
            "B": as_complex(complex(value.b)),
            "C": as_complex(complex(value.c)),
            "D": as_complex(complex(value.d)),
            "determinant_error": float(abs(complex(value.determinant) - 1)),
            "trunc": value.trunc,
            "tail_estimate": value.tail_estimate,
            "precision": value.precision,
        }
    )


def _weyl(args: argparse.Namespace, settings: LabSettings) -> Artifact:
    matrix: JacobiMatrix = _jacobi_input(args, Verb.WEYL)
    t: float = _require(args.t, "--t", Verb.WEYL)
    z: complex = _require(args.z, "--z", Verb.WEYL)
    parameter: float | None = None if math.isinf(t) else t
    value: complex = jacobi.weyl_function(
        matrix, parameter, z, precision=settings.precision
    )
    return Artifact({"t": parameter, "z": as_complex(z), "value": as_complex(value)})


def _asymptotics(args: argparse.Namespace, settings: LabSettings) -> Artifact:
    problem: Problem = _with_gamma(
        load_problem(_require(args.input, "--input", Verb.ASYMPTOTICS)), args.t
    )
    count: int = _require(args.count, "--count", Verb.ASYMPTOTICS)
    if isinstance(problem, BesselProblem):
        eigs: list[float] = bessel.eigenvalues_bessel(
            problem, count, jobs=settings.jobs
        )
        start: int = bessel.enumeration_start(problem.gamma)
        fit: bessel.KappaFit = bessel.kappa_fit(eigs, problem.b, start=start)
        data: dict[str, Any] = {
            "nu": problem.nu,
            "gamma": problem.gamma,
            "kappa": fit.kappa,
            "expected_kappa": bessel.kappa_nu(problem.nu, problem.gamma),
            "growth_exponent": fit.growth_exponent,
        }
        if args.lam is not None:
            shift: bessel.NuShiftReport = bessel.nu_shift_check(
                problem, count, args.lam, relabel=args.relabel
            )
            data["nu_shift"] = {
                "kappa_after": shift.kappa_after,
                "shift": shift.shift,
                "implied_nu": shift.implied_nu,
                "consistent": shift.consistent,
                "start": shift.start,
            }
        residuals: tuple[float, ...] = fit.residuals
    elif isinstance(problem, SchrodingerProblem):
        sturm_fit: sturm.AsymptoticFit = sturm.asymptotic_fit(
            sturm.eigenvalues(problem, count, jobs=settings.jobs)
        )
        data = {
            "c": sturm_fit.c,
            "kappa": sturm_fit.kappa,
            "max_residual": sturm_fit.max_residual,
        }
        # The residuals of a Schrödinger fit cover the tail half only.
        start = count - len(sturm_fit.residuals) + 1
        residuals = sturm_fit.residuals
    else:
        error_msg = "asymptotics needs a Schrödinger or Bessel problem"
        raise UsageError(error_msg)
    return Artifact(
        data,
        as_csv(["n", "residual"], [(start + i, r) for i, r in enumerate(residuals)]),
    )


def _kv_check(args: argparse.Namespace, _settings: LabSettings) -> Artifact:
    problem: Problem = load_problem(_require(args.input, "--input", Verb.KV_CHECK))
    if not isinstance(problem, SchrodingerProblem):
        error_msg = "kv-check needs a Schrödinger problem"
        raise UsageError(error_msg)
    s: float = _require(args.a, "--a", Verb.KV_CHECK)
    lam: float = _require(args.lam, "--lambda", Verb.KV_CHECK)
    phi: Profile = Profile.from_expr(args.phi)
    report: sturm.KvFormReport = sturm.kv_form_check(
        problem, s, lam, phi, args.count or _DEFAULT_KV_COUNT
    )
    table: sturm.KvTable = sturm.kv_apply(s, lam, problem.b, phi)
    return Artifact(
        {
            "s": s,
            "lambda": lam,
            "phi": phi.text,
            "form": report.form,
            "measure_side": report.measure_side,
            "relative_error": report.relative_error,
            "count": report.count,
            "rank_one_residual": sturm.kv_rank_one_residual(table, s, lam),
        }
    )


_HANDLERS: Final = {
    Verb.SPECTRUM: _spectrum,
    Verb.MEASURE: _measure,
    Verb.PERTURB: _perturb,
    Verb.EXTREMALITY: _extremality,
    Verb.DEFECT: _defect,
    Verb.NEVANLINNA: _nevanlinna,
    Verb.WEYL: _weyl,
    Verb.ASYMPTOTICS: _asymptotics,
    Verb.KV_CHECK: _kv_check,
}


##########
# Application
##########


def configure_logging() -> None:
    """Send log records to standard error, once per process."""

    logging.basicConfig(stream=sys.stderr, format="%(levelname)s %(message)s")


class KreinLab:
    """The command line application: settings plus one verb per run."""

    def __init__(self) -> None:
        """Initialize the application with default settings."""

        self._settings: LabSettings = LabSettings()

    @property
    def settings(self) -> LabSettings:
        """The persistent settings."""

        return self._settings

    def load_config(self, path: str) -> None:
        """Load the configuration for the app."""

        try:
            f: TextIOWrapper
            with Path(path).open(encoding="utf-8") as f:
                config: dict[str, Any] = json.load(f)
                self._settings.load_config(config)
        except FileNotFoundError:
            logging.warning("load_config: Config file not found: %s", path)
        except json.JSONDecodeError as e:
            logging.exception(
                "load_config: error decoding JSON file: %s [%d, %d]: %s",
                path,
                e.lineno,
                e.colno,
                e.msg,
            )

    def save_config(self, path: str) -> None:
        """Save the configuration for the app."""

        try:
            f: TextIOWrapper
            with Path(path).open("w", encoding="utf-8") as f:
                json.dump(self._settings.save_config(), f, indent=4)
        except FileNotFoundError:
            logging.exception("save_config: Config file not found: %s", path)
        except PermissionError:
            logging.exception("save_config: Permission denied: %s", path)

    def run(self, argv: Sequence[str]) -> int:
        """
        Run one command.

        Args:
            argv (Sequence[str]): The arguments, without the program name.

        Returns:
            int: 0 on success, 1 when verification checks fail, 2 on domain errors and
                3 on resolution errors.
        """

        configure_logging()
        logging.getLogger().setLevel(self._settings.log_level)
        try:
            return self._run(argv)
        except DomainError as e:
            logging.error("%s: %s", type(e).__name__, e)  # noqa: TRY400
            return EXIT_DOMAIN
        except ResolutionError as e:
            logging.error("%s: %s", type(e).__name__, e)  # noqa: TRY400
            return EXIT_RESOLUTION

    def _run(self, argv: Sequence[str]) -> int:
        args: argparse.Namespace = build_parser().parse_args(list(argv))
        try:
            verb: Verb = get_enum_member(Verb, args.verb)
            output_format: OutputFormat = get_enum_member(OutputFormat, args.format)
        except ValueError as e:
            raise UsageError(str(e)) from e

        # Flags and the environment apply to this run only, never to the saved file.
        settings: LabSettings = copy.copy(self._settings)
        settings.apply_environment()
        if args.precision is not None:
            settings.precision = args.precision
        if args.jobs is not None:
            settings.jobs = args.jobs

        if verb is Verb.VERIFY:
            return self._verify(args)
        if args.suite is not None:
            error_msg = f"unexpected argument {args.suite!r}"
            raise UsageError(error_msg)

        artifact: Artifact = _HANDLERS[verb](args, settings)
        if output_format is OutputFormat.CSV:
            if artifact.csv is None:
                error_msg = f"{verb.value} has no CSV form"
                raise UsageError(error_msg)
            text: str = artifact.csv
        else:
            text = json.dumps(artifact.data, indent=2) + "\n"
        self._emit(args.output, text)
        logging.info("%s done", verb.value)
        return EXIT_OK

    def _verify(self, args: argparse.Namespace) -> int:
        try:
            suite: Suite = get_enum_member(Suite, args.suite or Suite.ALL.value)
        except ValueError as e:
            raise UsageError(str(e)) from e
        results: list[verify.CheckResult] = verify.run_suite(suite)
        sys.stdout.write(verify.summary_table(results))
        if args.output is not None:
            write_atomically(
                args.output, json.dumps(verify.summary_json(results), indent=2) + "\n"
            )
        return EXIT_OK if all(r.passed for r in results) else EXIT_CHECKS_FAILED

    @staticmethod
    def _emit(output: str | None, text: str) -> None:
        if output is None:
            sys.stdout.write(text)
        else:
            write_atomically(output, text)


"""The persistent settings of the krein-lab front end."""

from __future__ import annotations

import logging
import os
from typing import Any, Final

from kreinlab import DomainError
from kreinlab._precision import DEFAULT_PRECISION, HIGH_PRECISION, check_precision
from kreinlab._quadrature import ABS_TOL
from kreinlab.measures import MERGE_TOL


class LabSettings:
    """Settings shared by every verb: logging, precision, parallelism, tolerances."""

    # Human readable logging levels
    _LOGGING_LEVELS: Final[dict[int, str]] = {
        logging.NOTSET: "NOTSET",
        logging.DEBUG: "DEBUG",
        logging.INFO: "INFO",
        logging.WARNING: "WARNING",
        logging.ERROR: "ERROR",
        logging.CRITICAL: "CRITICAL",
    }

    # Default values
    _DEFAULT_LOG_LEVEL: Final[int] = logging.WARNING
    _DEFAULT_PRECISION: Final[int] = HIGH_PRECISION
    _DEFAULT_JOBS: Final[int] = 1
    _DEFAULT_QUADRATURE_TOL: Final[float] = ABS_TOL
    _DEFAULT_MERGE_TOL: Final[float] = MERGE_TOL

    # Config file keys
    _LOG_LEVEL: Final[str] = "log_level"
    _PRECISION: Final[str] = "precision"
    _JOBS: Final[str] = "jobs"
    _QUADRATURE_TOL: Final[str] = "quadrature_tol"
    _MERGE_TOL: Final[str] = "merge_tol"

    # Environment
    PRECISION_ENV: Final[str] = "KREIN_LAB_PRECISION"

    def __init__(self) -> None:
        """Initialize the settings with their defaults."""

        self._log_level: int = LabSettings._DEFAULT_LOG_LEVEL
        self._precision: int = LabSettings._DEFAULT_PRECISION
        self._jobs: int = LabSettings._DEFAULT_JOBS
        self._quadrature_tol: float = LabSettings._DEFAULT_QUADRATURE_TOL
        self._merge_tol: float = LabSettings._DEFAULT_MERGE_TOL

    @property
    def log_level(self) -> int:
        """The logging level."""

        return self._log_level

    @log_level.setter
    def log_level(self, value: int) -> None:
        self._log_level = value

    @property
    def precision(self) -> int:
        """Mantissa bits of the arbitrary-precision computations."""

        return self._precision

    @precision.setter
    def precision(self, value: int) -> None:
        self._precision = check_precision(value)

    @property
    def jobs(self) -> int:
        """Number of concurrently scanned eigenvalue sub-windows."""

        return self._jobs

    @jobs.setter
    def jobs(self, value: int) -> None:
        if value < 1:
            error_msg = f"jobs = {value} must be >= 1"
            raise DomainError(error_msg)
        self._jobs = value

    @property
    def quadrature_tol(self) -> float:
        """Absolute target of the kernel quadratures."""

        return self._quadrature_tol

    @property
    def merge_tol(self) -> float:
        """Relative distance under which two atoms coincide."""

        return self._merge_tol

    def load_config(self, config: dict[str, Any]) -> None:
        """
        Load the settings, falling back to the default of every invalid key.

        Args:
            config (dict[str, Any]): A dictionary to load the settings from.
        """

        log_level: str | None = (
            str(config[LabSettings._LOG_LEVEL]).upper()
            if LabSettings._LOG_LEVEL in config
            else None
        )
        if log_level is None or not isinstance(logging.__dict__.get(log_level), int):
            self._log_level = LabSettings._DEFAULT_LOG_LEVEL
        else:
            self._log_level = logging.__dict__[log_level]

        self._precision = LabSettings._read(
            config,
            LabSettings._PRECISION,
            LabSettings._DEFAULT_PRECISION,
            int,
            minimum=DEFAULT_PRECISION,
        )
        self._jobs = LabSettings._read(
            config, LabSettings._JOBS, LabSettings._DEFAULT_JOBS, int, minimum=1
        )
        self._quadrature_tol = LabSettings._read(
            config,
            LabSettings._QUADRATURE_TOL,
            LabSettings._DEFAULT_QUADRATURE_TOL,
            float,
            minimum=0.0,
            strict=True,
        )
        self._merge_tol = LabSettings._read(
            config,
            LabSettings._MERGE_TOL,
            LabSettings._DEFAULT_MERGE_TOL,
            float,
            minimum=0.0,
            strict=True,
        )

    @staticmethod
    def _read(
        config: dict[str, Any],
        key: str,
        default: Any,  # noqa: ANN401
        kind: type,
        *,
        minimum: float,
        strict: bool = False,
    ) -> Any:  # noqa: ANN401
        if key not in config:
            return default
        try:
            value: Any = kind(config[key])
        except (TypeError, ValueError):
            logging.warning("Invalid %s in config: %r", key, config[key])
            return default
        if value < minimum or (strict and value == minimum):
            logging.warning("Out of range %s in config: %r", key, config[key])
            return default
        return value

    def apply_environment(self, environ: dict[str, str] | None = None) -> None:
        """
        Let KREIN_LAB_PRECISION override the configured precision.

        Raises:
            DomainError: If the variable is set but is not an integer >= 53.
        """

        source: dict[str, str] = dict(os.environ) if environ is None else environ
        raw: str | None = source.get(LabSettings.PRECISION_ENV)
        if raw is None:
            return
        try:
            bits: int = int(raw)
        except ValueError as e:
            error_msg = f"{LabSettings.PRECISION_ENV}={raw!r} is not an integer"
            raise DomainError(error_msg) from e
        self.precision = bits

    def save_config(self) -> dict[str, Any]:
        """
        Save the settings.

        Returns:
            (dict[str, Any]): A dictionary containing the settings.
        """

        return {
            LabSettings._LOG_LEVEL: LabSettings._LOGGING_LEVELS[self._log_level],
            LabSettings._PRECISION: self._precision,
            LabSettings._JOBS: self._jobs,
            LabSettings._QUADRATURE_TOL: self._quadrature_tol,
            LabSettings._MERGE_TOL: self._merge_tol,
        }

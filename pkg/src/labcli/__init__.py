"""Labcli provides the batch command line of the krein-lab toolkit."""

from .cli import KreinLab
from .lab_settings import LabSettings
from .verify import CheckResult

__all__ = [
    "CheckResult",
    "KreinLab",
    "LabSettings",
]
__version__ = "0.1.0"

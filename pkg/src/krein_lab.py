"""Main entry point for the application."""

import sys
from pathlib import Path

from labcli import KreinLab
from labcli.cli import configure_logging

home_dir: Path = Path("~").expanduser()
config_file_name: str = (home_dir / ".krein_lab").as_posix()

configure_logging()
app: KreinLab = KreinLab()
app.load_config(config_file_name)
exit_code: int = app.run(sys.argv[1:])
app.save_config(config_file_name)
sys.exit(exit_code)

#!/usr/bin/env python
import logging
import sys
import warnings

from dotenv import load_dotenv

from .cli import run as run_cli
from .errors import ConfigError
from .settings import load_settings

# Load environment variables
load_dotenv()
warnings.filterwarnings("ignore", category=SyntaxWarning, module="sympy")

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: str | None = None) -> None:
    """Send log records to stderr; stdout carries only command output."""
    if level is None:
        try:
            level = load_settings().log_level
        except ConfigError:
            level = "WARNING"
    logging.basicConfig(level=level.upper(), format=LOG_FORMAT, stream=sys.stderr)


def run(argv: list[str] | None = None) -> int:
    """Entry point of ``cartier-lab``."""
    configure_logging()
    return run_cli(sys.argv[1:] if argv is None else argv)


def verify(argv: list[str] | None = None) -> int:
    """Entry point of ``cartier-verify``: ``cartier-lab verify`` with the same flags."""
    configure_logging()
    return run_cli(["verify", *(sys.argv[1:] if argv is None else argv)])


if __name__ == "__main__":
    sys.exit(run())

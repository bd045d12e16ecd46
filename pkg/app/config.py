"""Process-level settings and logging setup."""

import logging
import os

# Archive database (only touched when a command is given --db or uses the default)
DATABASE_URL = os.getenv("AUV_DATABASE_URL", "sqlite+aiosqlite:///./data/runs.db")
SQL_ECHO = os.getenv("AUV_SQL_ECHO", "0") == "1"

LOG_LEVEL = os.getenv("AUV_LOG_LEVEL", "INFO")
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

# Pitch margin (rad) kept away from +-pi/2 before the Euler rate map blows up
PITCH_MARGIN = 0.05


def configure_logging(level: str | int = LOG_LEVEL) -> None:
    """Install a single stream handler on the root logger."""
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(handler)
    root.setLevel(level if isinstance(level, int) else level.upper())

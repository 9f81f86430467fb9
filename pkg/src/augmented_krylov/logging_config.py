"""File logging for the augmented-krylov harness.

Solver kernels and the harness get separate levels: the kernels listed in
``SOLVER_LOGGERS`` emit one DEBUG line per Arnoldi step, while the
harness (services, storage, CLI) logs run summaries. ``-vv`` opens the
per-iteration stream without flooding the file with harness chatter;
``-vvv`` opens everything. Numerical warnings raised through ``warnings``
by numpy/scipy (e.g. ``LinAlgWarning``) are routed into the same file.
"""

import logging
import logging.handlers
import sys
from pathlib import Path
from typing import NamedTuple

from augmented_krylov.config import DEFAULT_LOG_FILENAME, get_log_dir

SOLVER_MODULES = ("arnoldi", "augmentation", "flexible", "gmres", "linalg", "projected", "r3gmres")
SOLVER_LOGGERS = tuple(f"augmented_krylov.core.{module}" for module in SOLVER_MODULES)

MAX_LOG_SIZE_BYTES = 10 * 1024 * 1024
BACKUP_FILE_COUNT = 5

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
LOG_DATE_FORMAT = "%Y-%m-%dT%H:%M:%S%z"


class LogLevels(NamedTuple):
    harness: int
    solver: int

    @property
    def lowest(self) -> int:
        return min(self.harness, self.solver)


VERBOSITY_LEVELS = {
    0: LogLevels(harness=logging.WARNING, solver=logging.WARNING),
    1: LogLevels(harness=logging.INFO, solver=logging.INFO),
    2: LogLevels(harness=logging.INFO, solver=logging.DEBUG),
    3: LogLevels(harness=logging.DEBUG, solver=logging.DEBUG),
}


def levels_for(verbosity: int) -> LogLevels:
    """Levels for a ``-v`` count; anything past the table logs everything."""
    if verbosity < 0:
        return VERBOSITY_LEVELS[0]
    return VERBOSITY_LEVELS.get(verbosity, VERBOSITY_LEVELS[max(VERBOSITY_LEVELS)])


def setup_logging(verbosity: int = 0, log_dir: Path | None = None) -> bool:
    """
    Configure the rotating log file and the per-tree levels.

    Args:
        verbosity: Number of ``-v`` flags given on the command line
        log_dir: Custom log directory (uses the per-user default if None)

    Returns:
        bool: True if logging configured successfully, False otherwise
    """
    levels = levels_for(verbosity)
    try:
        log_dir = get_log_dir() if log_dir is None else log_dir
        log_dir.mkdir(parents=True, exist_ok=True)

        file_handler = logging.handlers.RotatingFileHandler(
            log_dir / DEFAULT_LOG_FILENAME,
            maxBytes=MAX_LOG_SIZE_BYTES,
            backupCount=BACKUP_FILE_COUNT,
        )
        file_handler.setLevel(levels.lowest)
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT, LOG_DATE_FORMAT))
    except OSError as e:
        print(f"Warning: solver log disabled ({e})", file=sys.stderr)
        return False

    root_logger = logging.getLogger()
    root_logger.setLevel(levels.harness)
    root_logger.handlers.clear()
    root_logger.addHandler(file_handler)
    for name in SOLVER_LOGGERS:
        logging.getLogger(name).setLevel(levels.solver)
    logging.captureWarnings(True)

    logging.info(
        "Logging started - harness %s, solver %s",
        logging.getLevelName(levels.harness),
        logging.getLevelName(levels.solver),
    )
    return True

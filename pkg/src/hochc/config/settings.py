"""
Settings for hochc.

Every value can be overridden through an environment variable; command-line
flags in turn override the environment.
"""

import logging.config
import os
from pathlib import Path
from typing import Any


def _env_int(name: str, default: int) -> int:
    value = os.environ.get(name)
    if value is None or not value.strip():
        return default
    try:
        return int(value)
    except ValueError as e:
        raise ValueError(f"{name} must be an integer, got {value!r}") from e


def _env_bool(name: str, default: bool) -> bool:
    return os.environ.get(name, str(default)).lower() in ("true", "1", "yes")


DEBUG = _env_bool("HOCHC_DEBUG", False)

# Saturation budgets
MAX_STEPS = _env_int("HOCHC_MAX_STEPS", 10000)
MAX_CLAUSES = _env_int("HOCHC_MAX_CLAUSES", 5000)
MAX_TERM_SIZE = _env_int("HOCHC_MAX_TERM_SIZE", 400)

# Largest function space a finite frame may enumerate
FRAME_CELL_BUDGET = _env_int("HOCHC_FRAME_CELL_BUDGET", 1_000_000)

# Logging configuration
# Use XDG_DATA_HOME for logs, defaulting to ~/.local/share if not set
XDG_DATA_HOME = Path(os.environ.get("XDG_DATA_HOME", Path.home() / ".local" / "share"))
LOG_DIR = Path(os.environ.get("HOCHC_LOG_DIR", XDG_DATA_HOME / "hochc" / "logs"))
LOG_FILE = _env_bool("HOCHC_LOG_FILE", True)

LOG_COLORS = {
    "DEBUG": "blue",
    "INFO": "green",
    "WARNING": "yellow",
    "ERROR": "red",
    "CRITICAL": "bold_red",
}

LOGGING: dict[str, Any] = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "{levelname} {asctime} {name} {module} {funcName} {message}",
            "style": "{",
        },
        "verbose_debug": {
            "format": "{levelname} {asctime} {name} {pathname}:{lineno} {funcName} {message}",
            "style": "{",
        },
        "colored": {
            "()": "colorlog.ColoredFormatter",
            "format": "%(log_color)s%(levelname)-8s%(reset)s %(cyan)s%(name)s%(reset)s %(message)s",
            "log_colors": LOG_COLORS,
        },
        "colored_debug": {
            "()": "colorlog.ColoredFormatter",
            "format": "%(log_color)s%(levelname)-8s%(reset)s %(cyan)s%(name)s%(reset)s "
            "%(white)s%(pathname)s:%(lineno)d%(reset)s %(funcName)s %(message)s",
            "log_colors": LOG_COLORS,
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "stream": "ext://sys.stderr",
            "formatter": "colored_debug" if DEBUG else "colored",
        },
        "file": {
            "class": "logging.handlers.RotatingFileHandler",
            "filename": LOG_DIR / "hochc.log",
            "maxBytes": 1024 * 1024 * 10,  # 10 MB
            "backupCount": 5,
            "formatter": "verbose_debug" if DEBUG else "verbose",
        },
    },
    "loggers": {
        "hochc": {
            "handlers": ["console", "file"],
            "level": "DEBUG" if DEBUG else "INFO",
            "propagate": False,
        },
    },
    "root": {
        "handlers": ["console"],
        "level": "WARNING",
    },
}


def configure_logging(verbosity: int = 0) -> None:
    """
    Apply ``LOGGING``.

    Args:
        verbosity: Number of ``-v`` flags; the console shows warnings by
            default, info with one and debug with two
    """
    config: dict[str, Any] = {**LOGGING, "handlers": {k: dict(v) for k, v in LOGGING["handlers"].items()}}
    config["loggers"] = {k: dict(v) for k, v in LOGGING["loggers"].items()}
    console_level = "DEBUG" if DEBUG or verbosity >= 2 else "INFO" if verbosity == 1 else "WARNING"
    config["handlers"]["console"]["level"] = console_level
    handlers = ["console"]
    unavailable: OSError | None = None
    if LOG_FILE:
        try:
            LOG_DIR.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            unavailable = e
        else:
            handlers.append("file")
    if "file" not in handlers:
        del config["handlers"]["file"]
    config["loggers"]["hochc"]["handlers"] = handlers
    if verbosity >= 2:
        config["loggers"]["hochc"]["level"] = "DEBUG"
    logging.config.dictConfig(config)
    if unavailable is not None:
        logging.getLogger(__name__).warning(f"File logging disabled: {unavailable}")

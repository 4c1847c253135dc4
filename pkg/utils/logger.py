import logging
import os
import sys
from datetime import datetime
from typing import Optional

from colorama import Fore, Style


class ColoredFormatter(logging.Formatter):
    """Colored log formatter"""

    COLORS = {
        "DEBUG": Fore.CYAN,
        "INFO": Fore.GREEN,
        "WARNING": Fore.YELLOW,
        "ERROR": Fore.RED,
        "CRITICAL": Fore.MAGENTA,
    }

    def format(self, record):
        # copy so the file handler still sees the plain level name
        record = logging.makeLogRecord(record.__dict__)
        if record.levelname in self.COLORS:
            record.levelname = (
                f"{self.COLORS[record.levelname]}{record.levelname}{Style.RESET_ALL}"
            )

        record.asctime = datetime.fromtimestamp(record.created).strftime(
            "%Y-%m-%d %H:%M:%S"
        )

        return super().format(record)


LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def setup_logger(
    name: str = "packlab", level: int = logging.WARNING
) -> logging.Logger:
    """Setup global logger. Output goes to stderr; stdout carries results only."""
    logger = logging.getLogger(name)
    logger.setLevel(level)
    logger.propagate = False

    # Avoid adding duplicate handlers
    if not logger.handlers:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(logging.DEBUG)
        if sys.stderr.isatty():
            console_handler.setFormatter(ColoredFormatter(LOG_FORMAT))
        else:
            console_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(console_handler)

    return logger


def configure_logger(level: str, log_file: Optional[str] = None) -> logging.Logger:
    """Apply level and optional file handler from configuration"""
    logger.setLevel(getattr(logging, level.upper(), logging.WARNING))

    if log_file:
        target = os.path.abspath(log_file)
        already = any(
            isinstance(h, logging.FileHandler) and h.baseFilename == target
            for h in logger.handlers
        )
        if not already:
            directory = os.path.dirname(target)
            if directory:
                os.makedirs(directory, exist_ok=True)
            file_handler = logging.FileHandler(target, encoding="utf-8")
            file_handler.setLevel(logging.DEBUG)
            file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
            logger.addHandler(file_handler)

    return logger


# Global logger
logger = setup_logger()

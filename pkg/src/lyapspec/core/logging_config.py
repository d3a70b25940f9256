import logging
import logging.handlers
import os
import sys
from typing import Optional

LOG_DIR = os.path.join(os.path.expanduser("~"), ".lyapspec", "logs")
LOG_FILE = os.path.join(LOG_DIR, "lyapspec.log")
LOG_LEVEL = logging.INFO # Default level
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def setup_logging(level=LOG_LEVEL, log_file: Optional[str] = LOG_FILE):
    """Configures the "lyapspec" logger; pass log_file=None for console only."""

    logger = logging.getLogger("lyapspec")
    logger.setLevel(level)

    # Prevent adding multiple handlers if called again
    if logger.hasHandlers():
        logger.handlers.clear()

    formatter = logging.Formatter(LOG_FORMAT)

    # --- Console Handler ---
    # stderr keeps stdout free for --json summaries
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(level)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    # --- Rotating File Handler ---
    # Rotate logs, keeping 5 backups, max 5MB each
    if log_file:
        try:
            os.makedirs(os.path.dirname(os.path.abspath(log_file)), exist_ok=True)
            file_handler = logging.handlers.RotatingFileHandler(
                log_file, maxBytes=5*1024*1024, backupCount=5, encoding="utf-8"
            )
            file_handler.setLevel(level)
            file_handler.setFormatter(formatter)
            logger.addHandler(file_handler)
        except OSError as e:
            # Fallback to console if file logging fails
            logger.error(f"Failed to set up file logging: {e}", exc_info=True)

    logger.debug("Logging configured.")
    return logger

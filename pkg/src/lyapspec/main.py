import logging
import sys
from typing import Optional, Sequence

from .core.config import load_config, settings_from_config
from .core.logging_config import LOG_FILE, setup_logging
from .ui.cli import build_parser, execute


def run_app(argv: Optional[Sequence[str]] = None):
    args = build_parser().parse_args(argv)

    # 1. Load Configuration
    config = load_config(args.config)
    settings = settings_from_config(config)
    log_level_str = (args.log_level or settings.log_level).upper()
    log_level = getattr(logging, log_level_str, logging.INFO)

    # 2. Setup Logging
    setup_logging(level=log_level, log_file=None if args.no_log_file else LOG_FILE)
    logger = logging.getLogger("lyapspec.main")
    logger.info(f"Starting lyapspec {args.command}")
    logger.info(f"Log level set to: {log_level_str}")

    # 3. Run the command
    sys.exit(execute(args, settings))


if __name__ == "__main__":
    # python -m lyapspec.main
    run_app()

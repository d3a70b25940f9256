import configparser
import logging
import os
from dataclasses import dataclass
from typing import Optional

CONFIG_DIR = os.path.join(os.path.expanduser("~"), ".lyapspec")
CONFIG_FILE = os.path.join(CONFIG_DIR, "config.ini")

# Default configuration values
DEFAULT_CONFIG = {
    "General": {
        "log_level": "INFO",
    },
    "Numerics": {
        "t_tol": "1e-12",
        "value_tol": "1e-9",
        "zero_band": "1e-9",
        "coincide_tol": "1e-6",
        "max_bisect_iter": "200",
    },
    "Surgery": {
        "growth": "2.0",
        "lambda_cap": "1e4",
    },
    "Output": {
        "out_dir": "lyapspec_out",
        "grid_points": "2001",
        "emit_svg": "false",
    },
}

logger = logging.getLogger("lyapspec.core.config")


@dataclass(frozen=True)
class Settings:
    """Typed view of the configuration handed to the numerical layers."""

    log_level: str = "INFO"
    t_tol: float = 1e-12
    value_tol: float = 1e-9
    zero_band: float = 1e-9
    coincide_tol: float = 1e-6
    max_bisect_iter: int = 200
    growth: float = 2.0
    lambda_cap: float = 1e4
    out_dir: str = "lyapspec_out"
    grid_points: int = 2001
    emit_svg: bool = False


def load_config(path: Optional[str] = None) -> configparser.ConfigParser:
    """Loads the configuration from the INI file, layered over the defaults."""
    config_path = path or CONFIG_FILE
    config = configparser.ConfigParser()

    # Set default values first
    for section, options in DEFAULT_CONFIG.items():
        if not config.has_section(section):
            config.add_section(section)
        for key, value in options.items():
            config.set(section, key, value)

    # Read the actual config file, overriding defaults if present
    if os.path.exists(config_path):
        try:
            config.read(config_path, encoding="utf-8")
            logger.info(f"Configuration loaded from {config_path}")
        except configparser.Error as e:
            logger.error(f"Failed to read configuration file {config_path}: {e}", exc_info=True)
            # Continue with defaults if reading fails
    elif path is None:
        logger.info("Configuration file not found, using defaults.")
        # Save defaults on first run
        save_config(config, config_path)

    return config


def save_config(config: configparser.ConfigParser, path: Optional[str] = None):
    """Saves the configuration to the INI file."""
    config_path = path or CONFIG_FILE
    try:
        os.makedirs(os.path.dirname(os.path.abspath(config_path)), exist_ok=True)
        with open(config_path, "w", encoding="utf-8") as configfile:
            config.write(configfile)
        logger.info(f"Configuration saved to {config_path}")
    except OSError as e:
        logger.error(f"Failed to save configuration file {config_path}: {e}", exc_info=True)


def settings_from_config(config: configparser.ConfigParser) -> Settings:
    return Settings(
        log_level=config.get("General", "log_level", fallback="INFO").upper(),
        t_tol=config.getfloat("Numerics", "t_tol", fallback=1e-12),
        value_tol=config.getfloat("Numerics", "value_tol", fallback=1e-9),
        zero_band=config.getfloat("Numerics", "zero_band", fallback=1e-9),
        coincide_tol=config.getfloat("Numerics", "coincide_tol", fallback=1e-6),
        max_bisect_iter=config.getint("Numerics", "max_bisect_iter", fallback=200),
        growth=config.getfloat("Surgery", "growth", fallback=2.0),
        lambda_cap=config.getfloat("Surgery", "lambda_cap", fallback=1e4),
        out_dir=config.get("Output", "out_dir", fallback="lyapspec_out"),
        grid_points=config.getint("Output", "grid_points", fallback=2001),
        emit_svg=config.getboolean("Output", "emit_svg", fallback=False),
    )

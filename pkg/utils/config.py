import os
from dataclasses import dataclass, field, fields
from typing import Any, Dict, Mapping, Optional

import yaml

from utils.logger import logger

THREADS_ENV_VAR = "PACKLAB_THREADS"
OUTPUT_FORMATS = ("json", "table")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class ConfigError(ValueError):
    """Raised for malformed configuration values (a usage error)"""


def resolve_threads(env: Optional[Mapping[str, str]] = None) -> int:
    """Worker count from PACKLAB_THREADS, falling back to available parallelism"""
    env = os.environ if env is None else env
    raw = env.get(THREADS_ENV_VAR)
    if raw is None or raw.strip() == "":
        return os.cpu_count() or 1
    try:
        threads = int(raw.strip())
    except ValueError:
        raise ConfigError(f"{THREADS_ENV_VAR} must be a positive integer, got {raw!r}")
    if threads <= 0:
        raise ConfigError(f"{THREADS_ENV_VAR} must be a positive integer, got {raw!r}")
    return threads


@dataclass
class PacklabConfig:
    """Runtime configuration"""

    threads: int = field(default_factory=lambda: os.cpu_count() or 1)
    output_format: str = "json"
    quiet: bool = False
    log_level: str = "WARNING"
    log_file: Optional[str] = None
    # default search budget for d_Omega
    c1_max: int = 20
    coeff_max: int = 10
    progress: bool = False

    def update_config(self, config: Dict[str, Any]):
        known = {f.name for f in fields(self)}
        for key, value in config.items():
            if key in known:
                setattr(self, key, value)
            else:
                logger.warning(f"Ignoring unknown configuration key: {key}")
        self.check()

    def check(self):
        if self.output_format not in OUTPUT_FORMATS:
            raise ConfigError(f"output_format must be one of {OUTPUT_FORMATS}")
        if str(self.log_level).upper() not in LOG_LEVELS:
            raise ConfigError(f"log_level must be one of {LOG_LEVELS}")
        for name in ("threads", "coeff_max"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value <= 0:
                raise ConfigError(f"{name} must be a positive integer")
        if not isinstance(self.c1_max, int) or self.c1_max < 2:
            raise ConfigError("c1_max must be an integer >= 2")

    def effective_log_level(self) -> str:
        return "ERROR" if self.quiet else str(self.log_level).upper()


def load_config(
    path: Optional[str] = None, env: Optional[Mapping[str, str]] = None
) -> PacklabConfig:
    """Build a config from defaults, the environment and an optional YAML file"""
    config = PacklabConfig(threads=resolve_threads(env))
    if path:
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = yaml.safe_load(f) or {}
        except OSError as e:
            raise ConfigError(f"Cannot read config file {path}: {e}")
        except yaml.YAMLError as e:
            raise ConfigError(f"Config file {path} is not valid YAML: {e}")
        if not isinstance(data, dict):
            raise ConfigError(f"Config file {path} must contain a mapping")
        config.update_config(data)
        logger.debug(f"Loaded configuration from {path}")
    return config

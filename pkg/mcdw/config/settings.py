"""Workbench configuration management."""
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from pydantic import BaseModel, Field, ValidationError, field_validator

logger = logging.getLogger(__name__)

ENV_PREFIX = "MCDW_"


class ConfigError(ValueError):
    """Raised when configuration loading or validation fails."""


class Config(BaseModel):
    """Resolved workbench settings."""

    cache_dir: Path = Field(default_factory=lambda: Path.home() / ".mcdw" / "cache")
    use_cache: bool = True
    workers: int = 1
    strategy: str = "hlt"
    coset_limit: int = 2 ** 22
    deduction_limit: int = 50000
    dense_cap: int = 2 ** 19
    automorphism_cap: int = 2 ** 13
    search_timeout: float = 1200.0
    candidate_cap: int = 10 ** 9
    collector_samples: int = 10 ** 5
    collector_exhaustive_limit: int = 2 ** 22
    hypothesis_cap: int = 2 ** 12

    @field_validator(
        "workers", "coset_limit", "deduction_limit", "dense_cap", "automorphism_cap",
        "search_timeout", "candidate_cap", "collector_samples", "collector_exhaustive_limit",
        "hypothesis_cap",
    )
    @classmethod
    def _positive(cls, value):
        if value <= 0:
            raise ValueError("caps and budgets must be positive")
        return value

    @field_validator("strategy")
    @classmethod
    def _known_strategy(cls, value: str) -> str:
        value = value.lower()
        if value not in ("hlt", "felsch"):
            raise ValueError(f"unknown enumeration strategy '{value}' (hlt, felsch)")
        return value


def load_config(config_file: Optional[str] = None) -> Config:
    """Load workbench configuration.

    Loads configuration with the following priority:
    1. Explicit --config path
    2. ~/.mcdw/config.yaml
    3. Environment variables (MCDW_CACHE, MCDW_WORKERS, ...) override file values
    4. Defaults

    Args:
        config_file: Optional explicit YAML file

    Returns:
        Validated Config

    Raises:
        ConfigError: If a file is missing, malformed or holds invalid values
    """
    values: Dict[str, Any] = {}
    source = "defaults"

    if config_file:
        values.update(_load_yaml_config(config_file))
        source = f"file: {config_file}"
    else:
        default_path = Path.home() / ".mcdw" / "config.yaml"
        if default_path.exists():
            values.update(_load_yaml_config(str(default_path)))
            source = f"file: {default_path}"

    env_values = _load_from_env()
    if env_values:
        values.update(env_values)
        source = f"{source} + environment variables"

    try:
        config = Config(**values)
    except ValidationError as e:
        raise ConfigError(f"Invalid configuration ({source}):\n{e}") from e
    logger.info("Loaded configuration from %s", source)
    return config


def _load_yaml_config(file_path: str) -> Dict[str, Any]:
    try:
        if not os.path.exists(file_path):
            raise ConfigError(f"Configuration file not found: {file_path}")

        with open(file_path, "r", encoding="utf-8") as f:
            config = yaml.safe_load(f)

        if config is None:
            return {}
        if not isinstance(config, dict):
            raise ConfigError(f"Configuration file must contain a YAML dictionary: {file_path}")
        return config

    except yaml.YAMLError as e:
        raise ConfigError(f"Invalid YAML configuration: {file_path}\n{e}") from e
    except OSError as e:
        raise ConfigError(f"Error reading configuration file: {file_path}\n{e}") from e


_ENV_FIELDS = {
    "CACHE": "cache_dir",
    "USE_CACHE": "use_cache",
    "WORKERS": "workers",
    "STRATEGY": "strategy",
    "COSET_LIMIT": "coset_limit",
    "TIMEOUT": "search_timeout",
    "DENSE_CAP": "dense_cap",
}


def _load_from_env() -> Dict[str, Any]:
    """Read MCDW_* environment variables; pydantic coerces the strings."""
    config = {}
    for suffix, field in _ENV_FIELDS.items():
        value = os.getenv(f"{ENV_PREFIX}{suffix}")
        if value:
            config[field] = value
    return config


def validate_config(config: Config) -> bool:
    """Check that the cache directory can be created and written.

    Raises:
        ConfigError: If caching is enabled and the directory is unusable
    """
    if not config.use_cache:
        return True
    try:
        config.cache_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ConfigError(f"Cache directory is not usable: {config.cache_dir}\n{e}") from e
    if not os.access(config.cache_dir, os.W_OK):
        raise ConfigError(
            f"Cache directory is not writable: {config.cache_dir}. "
            f"Set MCDW_CACHE or cache_dir in ~/.mcdw/config.yaml"
        )
    return True

"""Configuration management."""
from mcdw.config.settings import (
    Config,
    ConfigError,
    load_config,
    validate_config,
)

__all__ = [
    'Config',
    'ConfigError',
    'load_config',
    'validate_config',
]

"""Tests for workbench configuration."""
import os
from pathlib import Path
from unittest.mock import patch

import pytest
import yaml

from mcdw.config.settings import Config, ConfigError, load_config, validate_config


def test_defaults(tmp_path):
    """Test defaults when neither file nor environment is present."""
    with patch.dict(os.environ, {}, clear=True):
        with patch("pathlib.Path.home", return_value=tmp_path):
            config = load_config()

    assert config.use_cache is True
    assert config.strategy == "hlt"
    assert config.workers == 1
    assert config.cache_dir == tmp_path / ".mcdw" / "cache"


def test_load_from_explicit_file(tmp_path):
    config_file = tmp_path / "mcdw.yaml"
    config_file.write_text(yaml.dump({"strategy": "felsch", "workers": 4, "use_cache": False}))

    with patch.dict(os.environ, {}, clear=True):
        config = load_config(str(config_file))

    assert config.strategy == "felsch"
    assert config.workers == 4
    assert config.use_cache is False


def test_load_from_default_path(tmp_path):
    """Test loading config from ~/.mcdw/config.yaml."""
    config_dir = tmp_path / ".mcdw"
    config_dir.mkdir()
    (config_dir / "config.yaml").write_text(yaml.dump({"dense_cap": 4096}))

    with patch.dict(os.environ, {}, clear=True):
        with patch("pathlib.Path.home", return_value=tmp_path):
            config = load_config()

    assert config.dense_cap == 4096


def test_environment_overrides_file(tmp_path):
    config_file = tmp_path / "mcdw.yaml"
    config_file.write_text(yaml.dump({"workers": 2, "search_timeout": 10}))

    with patch.dict(os.environ, {
        "MCDW_WORKERS": "8",
        "MCDW_CACHE": str(tmp_path / "elsewhere"),
        "MCDW_USE_CACHE": "false",
        "MCDW_STRATEGY": "FELSCH",
    }, clear=True):
        config = load_config(str(config_file))

    assert config.workers == 8
    assert config.search_timeout == 10
    assert config.cache_dir == tmp_path / "elsewhere"
    assert config.use_cache is False
    assert config.strategy == "felsch"


def test_empty_file_gives_defaults(tmp_path):
    config_file = tmp_path / "empty.yaml"
    config_file.write_text("")

    with patch.dict(os.environ, {}, clear=True):
        config = load_config(str(config_file))

    assert config.coset_limit == 2 ** 22


def test_missing_file():
    with pytest.raises(ConfigError, match="Configuration file not found"):
        load_config("/nonexistent/mcdw.yaml")


def test_non_dictionary_file(tmp_path):
    config_file = tmp_path / "list.yaml"
    config_file.write_text(yaml.dump([1, 2, 3]))

    with pytest.raises(ConfigError, match="YAML dictionary"):
        load_config(str(config_file))


def test_invalid_yaml(tmp_path):
    config_file = tmp_path / "broken.yaml"
    config_file.write_text("workers: [1, 2\n")

    with pytest.raises(ConfigError, match="Invalid YAML"):
        load_config(str(config_file))


@pytest.mark.parametrize("values", [{"workers": 0}, {"candidate_cap": -1}, {"strategy": "todd"}])
def test_invalid_values(tmp_path, values):
    config_file = tmp_path / "bad.yaml"
    config_file.write_text(yaml.dump(values))

    with patch.dict(os.environ, {}, clear=True):
        with pytest.raises(ConfigError, match="Invalid configuration"):
            load_config(str(config_file))


def test_validate_config_creates_cache_dir(tmp_path):
    config = Config(cache_dir=tmp_path / "a" / "b")
    assert validate_config(config)
    assert (tmp_path / "a" / "b").is_dir()


def test_validate_config_without_cache():
    assert validate_config(Config(cache_dir=Path("/nonexistent/never"), use_cache=False))


def test_validate_config_unusable_dir(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("not a directory")

    with pytest.raises(ConfigError, match="not usable"):
        validate_config(Config(cache_dir=blocker / "cache"))

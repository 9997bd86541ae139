"""Common test fixtures."""
# pylint: disable=redefined-outer-name
import pytest

from mcdw.config.settings import Config
from mcdw.core.construct import build_group
from mcdw.core.params import make_params
from mcdw.core.verify import Workbench


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow acceptance checks")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def config_factory(tmp_path):
    """Factory for Config instances that never touch the home directory."""
    def _make_config(**overrides):
        values = {"cache_dir": tmp_path / "cache", "use_cache": False}
        values.update(overrides)
        return Config(**values)
    return _make_config


@pytest.fixture
def params_factory():
    """Factory for validated FamilyParams."""
    def _make_params(family="J2", p=2, m=1, ell=1, beta=None):
        if family == "G":
            return make_params("G", beta=beta)
        return make_params(family, p, m, ell)
    return _make_params


@pytest.fixture
def bench(config_factory):
    return Workbench(config_factory())


def _build(family, p=None, m=None, ell=None, beta=None):
    params = make_params("G", beta=beta) if family == "G" else make_params(family, p, m, ell)
    return params, build_group(family, params, Config(use_cache=False))


@pytest.fixture(scope="session")
def j2_3():
    """J2(3): p=2, m=1, ell=1, order 16."""
    return _build("J2", 2, 1, 1)


@pytest.fixture(scope="session")
def j2_5():
    """J2(5): p=2, m=2, ell=1, order 2048."""
    return _build("J2", 2, 2, 1)


@pytest.fixture(scope="session")
def j1_4():
    """J1(4): p=3, m=1, ell=1, order 2187."""
    return _build("J1", 3, 1, 1)


@pytest.fixture(scope="session")
def k1_4():
    return _build("K1", 3, 1, 1)


@pytest.fixture(scope="session")
def g_3():
    return _build("G", beta=3)


@pytest.fixture(scope="session")
def g_minus_1():
    return _build("G", beta=-1)

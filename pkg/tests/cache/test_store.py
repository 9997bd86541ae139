"""Tests for the on-disk group cache."""
import json

import numpy as np
import pytest

from mcdw.cache import store
from mcdw.cache.store import MAGIC, CacheError, GroupCache, cache_key, read_tables, write_tables
from mcdw.config.settings import Config
from mcdw.core.construct import build_group


def test_cache_key(params_factory):
    assert cache_key(params_factory("G", beta=3)) == "G_b3"
    assert cache_key(params_factory("J2", 2, 1, 1)) == "J2_p2_m1_a3"
    assert cache_key(params_factory("J2", 2, 2, 1)) == "J2_p2_m2_a5"
    assert cache_key(params_factory("H1", 3, 1, 1)) == "H1_p3_m1_a4"


def test_cache_key_reduces_alpha(params_factory):
    """alpha = 7 and alpha = 3 give the same relators when x^4 = 1."""
    assert cache_key(params_factory("J2", 2, 1, 3)) == cache_key(params_factory("J2", 2, 1, 1))


def test_cache_key_of_quotient_families_uses_parent_exponent(params_factory):
    """H3(7) and H3(34) agree modulo 27 but come from different J3 presentations."""
    assert cache_key(params_factory("H3", 3, 1, 2)) == "H3_p3_m1_a7"
    assert cache_key(params_factory("H3", 3, 1, 11)) == "H3_p3_m1_a34"
    assert cache_key(params_factory("K3", 3, 1, 2)) != cache_key(params_factory("K3", 3, 1, 11))
    assert cache_key(params_factory("J3", 3, 1, 29)) == cache_key(params_factory("J3", 3, 1, 2))


def test_tables_round_trip(tmp_path):
    tables = [np.array([1, 2, 0, 3]), np.array([3, 0, 1, 2])]
    path = tmp_path / "sub" / "t.mcdw"
    write_tables(path, tables)

    data = path.read_bytes()
    assert data.startswith(MAGIC)
    assert len(data) == len(MAGIC) + 8 + 2 * 4 * 4
    loaded = read_tables(path)
    assert all(np.array_equal(a, b) for a, b in zip(loaded, tables))
    assert list(tmp_path.joinpath("sub").iterdir()) == [path]


def test_bad_magic(tmp_path):
    path = tmp_path / "bad.mcdw"
    path.write_bytes(b"NOPE!" + bytes(8))
    with pytest.raises(CacheError, match="bad magic"):
        read_tables(path)


def test_truncated_files(tmp_path):
    path = tmp_path / "short.mcdw"
    path.write_bytes(MAGIC + b"\x01")
    with pytest.raises(CacheError, match="Truncated"):
        read_tables(path)

    write_tables(path, [np.arange(4)])
    path.write_bytes(path.read_bytes()[:-2])
    with pytest.raises(CacheError, match="expected 16"):
        read_tables(path)


def test_group_cache_save_and_load(tmp_path, j2_3):
    params, G = j2_3
    cache = GroupCache(tmp_path)
    assert cache.load(params) is None

    binary = cache.save(params, G)
    assert binary.name == "J2_p2_m1_a3.mcdw"
    sidecar = json.loads((tmp_path / "J2_p2_m1_a3.json").read_text())
    assert sidecar["order"] == 16

    loaded = cache.load(params)
    assert loaded.order == 16
    assert loaded.name == "J2(3)"
    assert all(np.array_equal(a, b) for a, b in zip(loaded.tables, G.tables))


def test_group_cache_ignores_corrupt_entry(tmp_path, params_factory):
    params = params_factory("J2", 2, 1, 1)
    cache = GroupCache(tmp_path)
    binary, _ = cache.paths(params)
    binary.write_bytes(b"garbage")
    assert cache.load(params) is None


def test_build_group_uses_cache(tmp_path, params_factory):
    params = params_factory("G", beta=3)
    config = Config(cache_dir=tmp_path, use_cache=True)
    first = build_group("G", params, config)
    assert (tmp_path / "G_b3.mcdw").exists()
    second = build_group("G", params, config)
    assert second.order == first.order == 16
    assert all(np.array_equal(a, b) for a, b in zip(first.tables, second.tables))


def test_failed_sidecar_write_leaves_no_temp_file(tmp_path, monkeypatch):
    def broken_dump(*args, **kwargs):
        raise TypeError("not serializable")

    monkeypatch.setattr(store.json, "dump", broken_dump)
    with pytest.raises(TypeError):
        store._write_json(tmp_path / "J2_p2_m1_a3.json", {"order": 16})  # pylint: disable=protected-access
    assert list(tmp_path.iterdir()) == []


def test_failed_table_write_leaves_no_temp_file(tmp_path, monkeypatch):
    def broken_replace(src, dst):
        raise OSError("disk full")

    monkeypatch.setattr(store.os, "replace", broken_replace)
    with pytest.raises(OSError, match="disk full"):
        write_tables(tmp_path / "t.mcdw", [np.array([1, 0])])
    assert list(tmp_path.iterdir()) == []

"""Tests for coset enumeration."""
import numpy as np
import pytest

from mcdw.core.enumerate import (
    CosetLimitError,
    LabelError,
    PermGroupGens,
    TableStatus,
    UnsupportedStrategyError,
    closure_order,
    coset_enumerate,
    faithful_action,
    get_strategy,
    list_strategies,
    order,
    regular_action,
)
from mcdw.config.settings import Config
from mcdw.core.construct import build_group
from mcdw.core.presentations import X, Y, macdonald_presentation, parse_presentation, presentation


@pytest.mark.parametrize("strategy", ["hlt", "felsch"])
def test_order_of_small_groups(strategy, params_factory):
    assert order(presentation("J2", params_factory("J2", 2, 1, 1)), strategy=strategy) == 16
    assert order(macdonald_presentation(3), strategy=strategy) == 16
    assert order(macdonald_presentation(-1), strategy=strategy) == 16


def test_trivial_macdonald_groups():
    assert order(macdonald_presentation(0)) == 1
    assert order(macdonald_presentation(2)) == 1


def test_dihedral_group():
    pres = parse_presentation("x, y | x^2, y^2, (x y)^4")
    assert order(pres) == 8
    assert order(pres, strategy="felsch") == 8


def test_subgroup_index():
    pres = parse_presentation("x, y | x^2, y^2, (x y)^4")
    table = coset_enumerate(pres, [X])
    assert table.index == 4
    assert table.status is TableStatus.COMPLETE


def test_coset_limit_is_resumable(params_factory):
    pres = presentation("J2", params_factory("J2", 2, 2, 1))
    with pytest.raises(CosetLimitError) as excinfo:
        coset_enumerate(pres, (), limit=8)
    table = coset_enumerate(pres, (), draft=excinfo.value.table)
    assert table.index == 2048


def test_unknown_strategy():
    assert set(list_strategies()) == {"hlt", "felsch"}
    assert get_strategy("HLT").name == "hlt"
    with pytest.raises(UnsupportedStrategyError, match="Unsupported strategy"):
        get_strategy("todd")


def test_permutation_generators(params_factory):
    pres = presentation("J2", params_factory("J2", 2, 1, 1))
    table = coset_enumerate(pres)
    gens = PermGroupGens.from_table(table, faithful=True, group_order=table.index)
    assert gens.regular
    assert gens.degree == 16
    for image in gens.images:
        assert np.array_equal(np.sort(image), np.arange(16))
    assert closure_order(gens.images) == 16


def test_faithful_action():
    """<x> is core-free in D8; <y^2> is normal in Z4, forcing the regular action."""
    pres = parse_presentation("x, y | x^2, y^2, (x y)^4")
    gens = faithful_action(pres, subgroup=X)
    assert gens.faithful
    assert gens.degree == 4
    assert gens.group_order == 8

    cyclic = parse_presentation("x, y | x^4, y x^-1")
    regular = faithful_action(cyclic, subgroup=Y ** 2)
    assert regular.regular
    assert regular.degree == 4


def test_regular_action_from_cyclic_cosets():
    pres = parse_presentation("x, y | x^4, y^2, (x y)^2")
    gens = regular_action(pres, 4)
    assert gens.regular
    assert gens.degree == 8
    assert closure_order(gens.images) == 8


def test_regular_action_rejects_wrong_exponent():
    pres = parse_presentation("x, y | x^4, y^2, (x y)^2")
    with pytest.raises(LabelError):
        regular_action(pres, 8)


@pytest.mark.parametrize("family, p, m, size", [("J2", 2, 1, 16), ("J2", 2, 2, 2048), ("J1", 3, 1, 2187)])
def test_regular_action_matches_trivial_enumeration(family, p, m, size, params_factory):
    params = params_factory(family, p, m, 1)
    pres = presentation(family, params)
    gens = regular_action(pres, {"J2": 2 ** (3 * m - 1), "J1": p ** (3 * m)}[family])
    assert gens.regular
    assert gens.degree == size == order(pres)


@pytest.mark.slow
def test_j2_at_m3_builds_with_default_config(params_factory):
    params = params_factory("J2", 2, 3, 1)
    G = build_group("J2", params, Config(use_cache=False))
    assert G.order == 2 ** 18

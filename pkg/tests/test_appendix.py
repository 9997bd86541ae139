"""Tests for the identity catalogues evaluated in normal form."""
import pytest

from mcdw.config.settings import Config
from mcdw.core.appendix import (
    CATALOGUES,
    IdentityTally,
    evaluate_catalogue,
    evaluate_identity,
    grid_points,
    point_for,
)
from mcdw.core.collect import derive_collector
from mcdw.core.construct import build_group
from mcdw.core.group import center


@pytest.fixture(scope="module")
def collector_m2(j2_5):
    params, G = j2_5
    return derive_collector(params, G)


def test_point_alpha_matches_params(params_factory):
    params = params_factory("J2", 2, 3, 5)
    point = point_for(params, 7)
    assert point.alpha == params.alpha
    assert point.alpha_p == 1 + 8 * 7
    assert point.s == params.constants.s


def test_grid_sizes(params_factory):
    lift_points = list(grid_points(params_factory("J2", 2, 3, 1), "lift"))
    assert len(lift_points) == 32
    assert len({p.ell_p for p in lift_points}) == 2

    params = params_factory("J2", 2, 2, 1)
    residue_points = list(grid_points(params, "residue"))
    assert len(residue_points) == 16
    assert {p.ell_p for p in residue_points} == {params.ell + params.constants.s}


def test_custom_grid(params_factory):
    points = list(grid_points(params_factory("J2", 2, 2, 1), "residue", {"i": (0, 1, 2)}))
    assert len(points) == 24


def test_tally_flags():
    tally = IdentityTally("lift.x", "lift")
    assert not tally.all_passed
    tally.checked = tally.passed = 4
    assert tally.all_passed
    assert "witness" not in tally.to_dict()
    tally.witness = {"point": {}}
    assert tally.to_dict()["witness"] == {"point": {}}


def test_residue_catalogue_at_m2(collector_m2, j2_5):
    _, G = j2_5
    tallies = evaluate_catalogue(collector_m2, "residue", center=center(G))
    assert [t.name for t in tallies] == [i.name for i in CATALOGUES["residue"]]
    for tally in tallies:
        assert tally.checked == tally.passed == 16
        assert tally.all_passed
        assert tally.witness is None


def test_evaluate_identity_shape(collector_m2):
    identity = CATALOGUES["residue"][0]
    point = point_for(collector_m2.params, collector_m2.params.ell + collector_m2.params.constants.s)
    outcome = evaluate_identity(identity, collector_m2, point)
    assert set(outcome) == {"holds", "left", "right"}
    assert len(outcome["left"]) == 3


def test_catalogue_guards(collector_m2):
    with pytest.raises(ValueError, match="needs m >= 3"):
        evaluate_catalogue(collector_m2, "lift")
    with pytest.raises(KeyError):
        evaluate_catalogue(collector_m2, "bogus")


@pytest.mark.slow
def test_lift_catalogue_at_m3(params_factory):
    params = params_factory("J2", 2, 3, 1)
    G = build_group("J2", params, Config(use_cache=False))
    col = derive_collector(params, G)
    tallies = evaluate_catalogue(col, "lift", center=center(G))
    assert len(tallies) == len(CATALOGUES["lift"])
    assert all(t.checked == 32 for t in tallies)
    assert all(t.all_passed for t in tallies), [t.to_dict() for t in tallies if not t.all_passed]

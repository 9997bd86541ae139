"""Tests for homomorphism checks, isomorphism searches and the explicit maps."""
from concurrent.futures import Future

import numpy as np
import pytest

from mcdw.core import iso
from mcdw.core.enumerate import faithful_action
from mcdw.core.group import DenseCapError, NotNormalError, build, center, quotient, subgroup_closure
from mcdw.core.iso import (
    HomomorphismError,
    NoConstructiveClauseError,
    automorphisms,
    check_hom,
    compose_images,
    explicit_sufficiency_map,
    hom_map,
    lift_search,
    search_epimorphism,
    search_isomorphism,
)
from mcdw.core.params import find_t
from mcdw.core.presentations import X, macdonald_presentation, parse_presentation, presentation
from mcdw.models.report import SearchBudget, SearchOutcome


def test_check_hom_identity(j2_3):
    params, G = j2_3
    certificate = check_hom(presentation("J2", params), G, G.generators, source_order=16)
    assert certificate.valid
    assert certificate.relations_hold and certificate.bijective
    assert certificate.source == "J2(3)"


def test_check_hom_requires_source_order(j2_3):
    params, G = j2_3
    with pytest.raises(ValueError, match="source_order"):
        check_hom(presentation("J2", params), G, G.generators)


def test_check_hom_rejects_bad_images(j2_3):
    params, G = j2_3
    with pytest.raises(HomomorphismError):
        check_hom(presentation("J2", params), G, [G.generators[0], 0], source_order=16)
    with pytest.raises(HomomorphismError, match="expected 2 images"):
        check_hom(presentation("J2", params), G, [0], source_order=16)


def test_hom_map_of_identity(j2_3):
    _, G = j2_3
    assert np.array_equal(hom_map(G, G, G.generators), np.arange(G.order))
    assert check_hom(G, G, G.generators).bijective


def test_macdonald_groups_isomorphic(g_3, g_minus_1):
    """G(3) and G(-1) are the same group of order 16."""
    _, target = g_3
    _, source = g_minus_1
    result = search_epimorphism(macdonald_presentation(-1), target, source_group=source)
    assert result.outcome is SearchOutcome.FOUND
    assert result.certificate.valid
    assert result.candidates >= 1


def test_search_epimorphism_order_mismatch(j2_3):
    _, G = j2_3
    result = search_epimorphism(macdonald_presentation(-1), G, source_order=32)
    assert result.outcome is SearchOutcome.EXHAUSTED
    assert result.reason == "order mismatch"
    with pytest.raises(ValueError):
        search_epimorphism(macdonald_presentation(-1), G)


def test_search_isomorphism(j2_3, j2_5):
    _, G = j2_3
    hinted = search_isomorphism(G, G, hints=[[0, 0], G.generators])
    assert hinted.outcome is SearchOutcome.FOUND
    assert hinted.notes == ["hint accepted"]
    assert hinted.candidates == 2

    result = search_isomorphism(G, G, SearchBudget(timeout=60))
    assert result.outcome is SearchOutcome.FOUND

    _, larger = j2_5
    mismatch = search_isomorphism(G, larger)
    assert mismatch.outcome is SearchOutcome.EXHAUSTED
    assert mismatch.reason == "order mismatch"


def test_automorphisms(j2_3):
    _, G = j2_3
    autos = automorphisms(G)
    assert tuple(G.generators) in autos
    assert len(autos) == len(set(autos))
    first = autos[-1]
    composed = compose_images(G, first, G.generators)
    assert composed == tuple(first)
    with pytest.raises(DenseCapError):
        automorphisms(G, cap=8)


def test_lift_search_through_center(j2_3):
    _, G = j2_3
    Z = center(G)
    L = quotient(G, Z)
    result = lift_search(G, G, Z, Z, L.generators, [L.generators])
    assert result.outcome is SearchOutcome.FOUND
    assert result.notes == [f"hypothesis verified over {Z.order ** 2} perturbations"]


def test_lift_search_needs_normal_subgroups():
    D8 = build(faithful_action(parse_presentation("x, y | x^2, y^2, (x y)^4"), subgroup=X))
    N = subgroup_closure(D8, [D8.generators[0]])
    with pytest.raises(NotNormalError):
        lift_search(D8, D8, N, N, [0, 0], [])


def test_k_map(k1_4, params_factory):
    params, G = k1_4
    other = params_factory("K1", 3, 1, 4)
    t = find_t(params, other.alpha)
    certificate = explicit_sufficiency_map("K1", params, other, target=G, source_group=G)
    assert certificate.valid
    assert certificate.images == [G.generators[0], G.power(G.generators[1], t)]
    assert certificate.source == "K1(13)"


def test_congruent_map(j1_4, params_factory):
    params, G = j1_4
    certificate = explicit_sufficiency_map("J1", params, params_factory("J1", 3, 1, 4), target=G)
    assert certificate.valid
    assert certificate.images == [G.generators[0], G.power(G.generators[1], 4)]


def test_m2_map(j2_5, params_factory):
    params, G = j2_5
    certificate = explicit_sufficiency_map("J2", params, params_factory("J2", 2, 2, 3), target=G)
    assert certificate.valid
    assert certificate.source == "J2(13)"
    assert certificate.target == "J2(5)"


def test_no_constructive_clause(params_factory):
    with pytest.raises(NoConstructiveClauseError):
        explicit_sufficiency_map("G", params_factory("G", beta=3), params_factory("G", beta=-1))
    with pytest.raises(NoConstructiveClauseError):
        explicit_sufficiency_map("J2", params_factory("J2", 2, 3, 1), params_factory("J2", 2, 3, 3))


class _InlineExecutor:
    """Runs submitted blocks in-process and records their time and candidate allowances."""

    def __init__(self, max_workers):
        self.max_workers = max_workers
        self.allowances = []

    def __enter__(self):
        _InlineExecutor.last = self
        return self

    def __exit__(self, *exc):
        return False

    def submit(self, fn, *args):
        self.allowances.append(args[-2:])
        future = Future()
        future.set_result(fn(*args))
        return future


def test_parallel_blocks_share_the_budget(j2_3, monkeypatch):
    _, G = j2_3
    monkeypatch.setattr(iso, "ProcessPoolExecutor", _InlineExecutor)
    abelian = parse_presentation("x, y | x^4, y^4, [x, y]")
    budget = SearchBudget(timeout=30, candidate_cap=10 ** 6, workers=2)
    result = search_epimorphism(abelian, G, budget, source_order=16)
    assert result.outcome is SearchOutcome.EXHAUSTED
    allowances = _InlineExecutor.last.allowances
    assert len(allowances) > 2
    assert all(0 < seconds <= 30 for seconds, _ in allowances)
    caps = [cap for _, cap in allowances]
    assert caps[0] == 10 ** 6
    assert caps == sorted(caps, reverse=True)
    assert caps[-1] < caps[0]


def test_parallel_search_stops_at_candidate_cap(j2_3, monkeypatch):
    _, G = j2_3
    monkeypatch.setattr(iso, "ProcessPoolExecutor", _InlineExecutor)
    abelian = parse_presentation("x, y | x^4, y^4, [x, y]")
    result = search_epimorphism(abelian, G, SearchBudget(candidate_cap=1, workers=2), source_order=16)
    assert result.outcome is SearchOutcome.TIMEOUT
    assert result.reason == "candidate cap reached"
    assert len(_InlineExecutor.last.allowances) <= 2

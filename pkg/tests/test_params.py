"""Tests for parameter arithmetic and the classification predicates."""
import pytest

from mcdw.core.params import (
    ParameterError,
    check_sum_congruence,
    class_count,
    classify,
    expected_class,
    expected_order,
    find_f,
    find_t,
    iso_predicate,
    lift_congruences,
    lift_obstruction,
    m2_congruences,
    macdonald_order,
    make_params,
    sibling,
    solve_m2_residues,
    sylow_parameters,
    sylow_wise_predicate,
    tet,
    theorem_d_predicate,
    tri,
)
from mcdw.models.params import CaseTag, Family


def test_classify_cases():
    """Test the three parameter regimes."""
    assert classify(2, 1, 1) is CaseTag.CASE2
    assert classify(2, 3, 5) is CaseTag.CASE2
    assert classify(3, 1, 1) is CaseTag.CASE1
    assert classify(3, 1, 2) is CaseTag.CASE3
    assert classify(3, 2, 2) is CaseTag.CASE1
    assert classify(5, 1, 4) is CaseTag.CASE1


@pytest.mark.parametrize("p,m,ell", [(4, 1, 1), (3, 0, 1), (3, 1, 3), (2, 2, 4)])
def test_classify_rejects_invalid(p, m, ell):
    with pytest.raises(ParameterError):
        classify(p, m, ell)


def test_make_params_derives_alpha(params_factory):
    params = params_factory("J2", 2, 2, 1)
    assert params.alpha == 5
    assert params.case is CaseTag.CASE2
    assert params.label() == "J2(5)"
    assert params_factory("J1", 5, 1, 6).alpha == 31
    assert params_factory("J3", 3, 1, 2).alpha == 7


def test_make_params_family_gate():
    """A family only accepts parameters of its own case."""
    with pytest.raises(ParameterError, match="needs Case1"):
        make_params("J1", 2, 1, 1)
    with pytest.raises(ParameterError):
        make_params("J3", 3, 1, 1)
    with pytest.raises(ParameterError):
        make_params("G")


def test_sibling_keeps_slice(params_factory):
    params = params_factory("J2", 2, 3, 1)
    other = sibling(params, 3, family="H2")
    assert other.family is Family.H2
    assert (other.p, other.m, other.alpha) == (2, 3, 25)


def test_expected_order_and_class(params_factory):
    assert expected_order("J2", params_factory("J2", 2, 1, 1)) == 16
    assert expected_order("J2", params_factory("J2", 2, 2, 1)) == 2048
    assert expected_order("J1", params_factory("J1", 3, 1, 1)) == 2187
    assert expected_order("J1", params_factory("J1", 5, 1, 1)) == 78125
    assert expected_order("J3", params_factory("J3", 3, 1, 2)) == 59049
    assert expected_class("J2", params_factory("J2", 2, 1, 1)) == 3
    assert expected_class("J2", params_factory("J2", 2, 2, 1)) == 5
    assert expected_class("J3", params_factory("J3", 3, 1, 2)) == 7


def test_expected_order_needs_j_family(params_factory):
    with pytest.raises(ParameterError, match="no closed form"):
        expected_order("H1", params_factory("H1", 3, 1, 1))


def test_tri_and_tet():
    assert tri(5) == 10
    assert tet(4) == 4
    assert tet(2) == 0


def test_find_t_minimal(params_factory):
    """31 ≡ 6 (mod 25), so t = 1."""
    params = params_factory("J1", 5, 1, 1)
    assert find_t(params, 31) == 1
    assert find_t(params_factory("K1", 3, 1, 1), 7) == 2


def test_find_t_rejects_case3(params_factory):
    with pytest.raises(ParameterError):
        find_t(params_factory("J3", 3, 1, 2), 16)


def test_find_f_and_power_sum(params_factory):
    """4^4 ≡ 13 (mod 27) and 4 + 2*16 + 3*64 = 228 ≡ 0 (mod 3)."""
    params = params_factory("J1", 3, 1, 1)
    f = find_f(params, 4)
    assert f == 4
    report = check_sum_congruence(params, f)
    assert report.condition == "power-sum"
    assert report.left == 228
    assert report.holds
    assert report.agree
    assert [v.condition for v in report.variants] == ["power-sum.closed"]


def test_find_f_needs_congruent_ell(params_factory):
    params = params_factory("J1", 3, 1, 1)
    with pytest.raises(ParameterError, match="no f"):
        find_f(params_factory("J1", 5, 1, 1), 2)
    with pytest.raises(ParameterError):
        find_f(params, 2)


def test_power_sum_case3_variants(params_factory):
    params = params_factory("J3", 3, 1, 2)
    report = check_sum_congruence(params, 4)
    assert report.modulus == 9
    assert {v.condition for v in report.variants} == {"power-sum.mod9", "power-sum.mod3"}


def test_check_sum_congruence_rejects_nonpositive(params_factory):
    with pytest.raises(ParameterError):
        check_sum_congruence(params_factory("J1", 3, 1, 1), 0)


def test_iso_predicate(params_factory):
    j1 = lambda ell: params_factory("J1", 5, 1, ell)  # noqa: E731
    assert iso_predicate("J1", j1(1), j1(6))
    assert not iso_predicate("J1", j1(1), j1(2))
    assert iso_predicate("K1", params_factory("K1", 5, 1, 1), params_factory("K1", 5, 1, 2))
    j2 = lambda ell: params_factory("J2", 2, 3, ell)  # noqa: E731
    assert iso_predicate("J2", j2(1), j2(9))
    assert not iso_predicate("J2", j2(1), j2(3))
    assert iso_predicate("J2", params_factory("J2", 2, 2, 1), params_factory("J2", 2, 2, 3))


def test_iso_predicate_rejects_mixed_slices(params_factory):
    with pytest.raises(ParameterError, match="mixed parameters"):
        iso_predicate("J2", params_factory("J2", 2, 2, 1), params_factory("J2", 2, 3, 1))


def test_class_counts():
    assert class_count("J1", 5, 1) == 4
    assert class_count("J1", 3, 1) == 1
    assert class_count("J2", 2, 3, CaseTag.CASE2) == 4
    assert class_count("J2", 2, 2, CaseTag.CASE2) == 1
    assert class_count("H2", 2, 4, CaseTag.CASE2) == 2
    assert class_count("K1", 5, 2) == 1


def test_macdonald_order():
    assert macdonald_order(3) == 16
    assert macdonald_order(-1) == 16
    assert macdonald_order(5) == 2 ** 11
    assert macdonald_order(0) == 1
    assert macdonald_order(2) == 1
    # beta - 1 = 3 and -3: the Case-3 Sylow subgroup is the larger one
    assert macdonald_order(4) == 3 ** 7
    assert macdonald_order(-2) == 3 ** 10
    assert macdonald_order(7) == 2 ** 4 * 3 ** 10


def test_macdonald_order_rejects_one():
    with pytest.raises(ParameterError, match="infinite"):
        macdonald_order(1)


def test_sylow_parameters():
    sylows = sylow_parameters(7)
    assert [(s.family, s.p, s.m, s.ell) for s in sylows] == [(Family.J2, 2, 1, 3), (Family.J3, 3, 1, 2)]
    (three,) = sylow_parameters(-2)
    assert three.family is Family.J3
    assert three.alpha == -2


def test_theorem_d_predicate():
    assert theorem_d_predicate(3, -1)
    assert theorem_d_predicate(5, -3)
    assert theorem_d_predicate(9, 9)
    assert not theorem_d_predicate(4, -2)
    assert not theorem_d_predicate(7, -5)
    assert not theorem_d_predicate(3, 5)


@pytest.mark.parametrize("alpha", [-3, -1, 3, 4, 5, 7, 9, 10])
def test_sylow_wise_predicate_agrees(alpha):
    assert sylow_wise_predicate(alpha, 2 - alpha) == theorem_d_predicate(alpha, 2 - alpha)


def test_m2_residues_at_m2(params_factory):
    """For alpha = 5, alpha' = 13 the conditions reduce to i + b odd."""
    params = params_factory("J2", 2, 2, 1)
    reports = m2_congruences(params, 3, 1, 0, 0, 0)
    assert [r.condition for r in reports] == ["residue.x", "residue.y", "residue.commutator"]
    solutions = solve_m2_residues(params, 3)
    assert len(solutions) == 8
    assert all((i + b) % 2 == 1 for i, _, _, b in solutions)


def test_m2_residues_need_odd_q(params_factory):
    with pytest.raises(ParameterError, match="q odd"):
        solve_m2_residues(params_factory("J2", 2, 2, 1), 5)


def test_lift_conditions_never_hold_together(params_factory):
    params = params_factory("J2", 2, 3, 1)
    for ell1 in (0, 1):
        counts = lift_obstruction(params, ell1)
        assert counts["tuples"] == 4 ** 4
        assert counts["both"] == 0


def test_lift_congruences_need_m3(params_factory):
    with pytest.raises(ParameterError):
        lift_congruences(params_factory("J2", 2, 2, 1), 0, 0, 0, 0, 0)

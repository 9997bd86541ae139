"""Tests for the parameter and report models."""
import pytest
from pydantic import ValidationError

from mcdw.models.params import Case2Constants, CongruenceReport, Family
from mcdw.models.report import CheckReport, CheckStatus, IsoCertificate, SearchBudget, SeriesReport


def test_family_kind_and_index():
    assert Family.J2.kind == "J"
    assert Family.K3.index == 3
    assert Family("H1") is Family.H1


def test_case2_constants():
    c = Case2Constants.for_m(3)
    assert (c.s, c.u, c.r, c.rbar) == (4, 16, 2, 1)
    assert Case2Constants.for_m(1).r is None


def test_params_are_hashable(params_factory):
    a = params_factory("J2", 2, 2, 1)
    b = params_factory("J2", 2, 2, 1)
    assert a == b
    assert len({a, b}) == 1
    with pytest.raises(ValidationError):
        a.ell = 3


def test_congruence_report():
    report = CongruenceReport.evaluate("power-sum", 3, 228, 0, f=4)
    assert report.holds
    assert report.detail == {"f": 4}
    assert not CongruenceReport.evaluate("x", 4, 3, 0).holds


def test_certificate_layout():
    certificate = IsoCertificate(source="J1(13)", target="J1(4)", images=[1, 7], relations_hold=True,
                                 generates=True, orders_match=True, bijective=True)
    data = certificate.to_dict()
    assert list(data) == ["source", "target", "img_x", "img_y", "checks", "elapsed"]
    assert certificate.valid
    with_nf = certificate.model_copy(update={"images_nf": [[1, 0, 0], [0, 4, 0]]})
    assert with_nf.to_dict()["img_y"] == [0, 4, 0]


def test_failed_check_needs_witness():
    with pytest.raises(ValueError, match="witness"):
        CheckReport(check_id="structure", status=CheckStatus.FAIL)
    report = CheckReport(check_id="structure", status=CheckStatus.FAIL, evidence={"witness": {}})
    assert not report.passed


def test_series_alias():
    series = SeriesReport.model_validate({"terms": [], "class": 0})
    assert series.nilpotency_class == 0
    assert series.to_dict() == {"terms": [], "class": 0}


def test_budget_must_be_positive():
    with pytest.raises(ValidationError):
        SearchBudget(timeout=0)

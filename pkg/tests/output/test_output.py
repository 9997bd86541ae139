"""Tests for the JSON and Markdown renderers."""
import json

from mcdw.models.report import CheckReport, CheckStatus, SearchOutcome, SearchResult, SeriesReport, SeriesTerm
from mcdw.output.json import render_json, render_reports
from mcdw.output.markdown import render_series, render_summary


def _reports():
    return [
        CheckReport(check_id="structure", parameters={"family": "J2", "m": 1}, status=CheckStatus.PASS,
                    evidence={"order": 16}, elapsed=0.25),
        CheckReport(check_id="appendix", parameters={"m": 3}, status=CheckStatus.FAIL,
                    evidence={"witness": {"identity": "lift.x1"}}),
        CheckReport(check_id="theorem.B", status=CheckStatus.SKIPPED,
                    evidence={"reason": "DenseCapError: too large"}),
    ]


def test_render_json_model():
    result = SearchResult(outcome=SearchOutcome.EXHAUSTED, candidates=12, reason="search space exhausted")
    data = json.loads(render_json(result))
    assert data == {"outcome": "exhausted", "candidates": 12, "reason": "search space exhausted", "elapsed": 0.0}


def test_render_json_plain_dict():
    data = json.loads(render_json({"label": "J2(3)", "order": 16}))
    assert data["order"] == 16


def test_render_reports_summary():
    data = json.loads(render_reports(_reports()))
    assert data["summary"] == {"pass": 1, "fail": 1, "skipped": 1}
    assert [r["check_id"] for r in data["reports"]] == ["structure", "appendix", "theorem.B"]
    assert data["reports"][0]["elapsed"] == 0.25


def test_render_summary():
    output = render_summary(_reports())
    assert "# MCDW Verification Report" in output
    assert "| structure |" in output
    assert "🟢 pass" in output
    assert "## Witnesses" in output
    assert "### 🔴 appendix" in output
    assert "lift.x1" in output
    assert "### ⚠️ Not decided" in output
    assert "- theorem.B: DenseCapError: too large" in output
    assert output.endswith("**1/3 checks passed.**")


def test_render_summary_all_passed():
    output = render_summary(_reports()[:1])
    assert "## Witnesses" not in output
    assert "Not decided" not in output
    assert "**1/1 checks passed.**" in output


def test_render_series():
    series = SeriesReport(
        terms=[
            SeriesTerm(index=1, order=2, factor_invariants=[2], abelian=True),
            SeriesTerm(index=2, order=4, factor_invariants=[2], abelian=True),
            SeriesTerm(index=3, order=16, factor_invariants=[2, 2], abelian=False),
        ],
        nilpotency_class=3,
    )
    output = render_series("J2(3)", series)
    assert "## Upper central series of J2(3)" in output
    assert "**Nilpotency class:** 3" in output
    assert "| Z3 | 16 | C2 x C2 | No |" in output

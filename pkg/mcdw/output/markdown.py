"""Markdown output rendering for check reports."""
from typing import Sequence

from mcdw.models.report import CheckReport, CheckStatus, SeriesReport

_STATUS_EMOJI = {
    CheckStatus.PASS: "🟢",
    CheckStatus.FAIL: "🔴",
    CheckStatus.TIMEOUT: "🟡",
    CheckStatus.SKIPPED: "⚪",
}


def _short(value, width: int = 60) -> str:
    text = str(value)
    return text if len(text) <= width else text[: width - 3] + "..."


def render_summary(reports: Sequence[CheckReport]) -> str:
    """Render a batch of check reports as a Markdown table followed by failure witnesses."""
    lines = [
        "# MCDW Verification Report",
        "",
        "| Check | Parameters | Status | Elapsed (s) |",
        "|-------|------------|--------|-------------|",
    ]
    for report in reports:
        emoji = _STATUS_EMOJI.get(report.status, "")
        lines.append(
            f"| {report.check_id} | `{_short(report.parameters)}` | "
            f"{emoji} {report.status.value} | {report.elapsed:.2f} |"
        )
    lines.append("")

    failed = [r for r in reports if r.status is CheckStatus.FAIL]
    if failed:
        lines.append("## Witnesses")
        lines.append("")
        for report in failed:
            lines.append(f"### 🔴 {report.check_id}")
            lines.append(f"- **Parameters:** `{report.parameters}`")
            lines.append(f"- **Witness:** `{report.evidence.get('witness')}`")
            lines.append("")

    skipped = [r for r in reports if r.status in (CheckStatus.SKIPPED, CheckStatus.TIMEOUT)]
    if skipped:
        lines.append("### ⚠️ Not decided")
        for report in skipped:
            reason = report.evidence.get("reason") or report.evidence.get("timeouts")
            lines.append(f"- {report.check_id}: {_short(reason, 120)}")
        lines.append("")

    passed = sum(r.passed for r in reports)
    lines.append(f"**{passed}/{len(reports)} checks passed.**")
    return "\n".join(lines)


def render_series(name: str, series: SeriesReport) -> str:
    """Render an upper central series as a Markdown table."""
    lines = [
        f"## Upper central series of {name}",
        f"**Nilpotency class:** {series.nilpotency_class}",
        "",
        "| Term | Order | Factor invariants | Abelian |",
        "|------|-------|-------------------|---------|",
    ]
    for term in series.terms:
        invariants = " x ".join(f"C{d}" for d in term.factor_invariants) or "1"
        lines.append(f"| Z{term.index} | {term.order} | {invariants} | {'Yes' if term.abelian else 'No'} |")
    return "\n".join(lines)

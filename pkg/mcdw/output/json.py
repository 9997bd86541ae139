"""JSON output rendering for check reports and search results."""
import json  # pylint: disable=import-self,redefined-builtin
from typing import Any, Dict, Sequence

from mcdw.models.report import CheckReport


def render_json(payload: Any) -> str:
    """Render any report model (or plain dict) as a JSON string."""
    # pylint: disable=no-member
    data = payload.to_dict() if hasattr(payload, "to_dict") else payload
    return json.dumps(data, indent=2, default=str)


def render_reports(reports: Sequence[CheckReport]) -> str:
    """Render a batch of check reports with a status summary."""
    summary: Dict[str, int] = {}
    for report in reports:
        summary[report.status.value] = summary.get(report.status.value, 0) + 1
    return json.dumps({"summary": summary, "reports": [r.to_dict() for r in reports]}, indent=2, default=str)

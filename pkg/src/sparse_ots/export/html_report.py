"""HTML rendering of security reports."""
from datetime import datetime
from pathlib import Path
from typing import Any

from jinja2 import Template

from sparse_ots.core.models import SecurityReport

# ============================================================================
# HTML Template for the security report
# ============================================================================

SECURITY_REPORT_TEMPLATE = """<!DOCTYPE html>
<html lang="en">
<head>
    <meta charset="UTF-8">
    <meta name="viewport" content="width=device-width, initial-scale=1.0">
    <title>sparse-ots - Security Report</title>
    <style>
        * { margin: 0; padding: 0; box-sizing: border-box; }
        body {
            font-family: -apple-system, BlinkMacSystemFont, 'Segoe UI', Roboto, sans-serif;
            line-height: 1.6;
            color: #333;
            background-color: #f5f5f5;
            padding: 20px;
        }
        .container { max-width: 1000px; margin: 0 auto; background: white; border-radius: 8px; }
        .header {
            background: linear-gradient(135deg, #2c3e50 0%, #4ca1af 100%);
            color: white;
            padding: 30px;
            border-radius: 8px 8px 0 0;
        }
        .section { padding: 20px 30px; }
        h2 { font-size: 18px; margin-bottom: 10px; color: #2c3e50; }
        table { width: 100%; border-collapse: collapse; font-size: 14px; }
        th, td { text-align: left; padding: 6px 10px; border-bottom: 1px solid #eee; }
        th { background: #fafafa; }
        td.value { font-family: monospace; text-align: right; }
        .missing { color: #c0392b; }
        .notes li { margin-left: 20px; color: #c0392b; }
    </style>
</head>
<body>
<div class="container">
    <div class="header">
        <h1>Security Report</h1>
        <p>{{ points|length }} parameter point(s), generated {{ timestamp }}</p>
    </div>
    {% for point in points %}
    <div class="section">
        <h2>Point {{ loop.index }}</h2>
        <table>
            <tr><th>Parameter / bound</th><th>Value</th></tr>
            {% for name, value in point['values'] %}
            <tr>
                <td>{{ name }}</td>
                {% if value is none %}
                <td class="value missing">n/a</td>
                {% else %}
                <td class="value">{{ value }}</td>
                {% endif %}
            </tr>
            {% endfor %}
        </table>
        {% if point.notes %}
        <ul class="notes">
            {% for note in point.notes %}<li>{{ note }}</li>{% endfor %}
        </ul>
        {% endif %}
    </div>
    {% endfor %}
</div>
</body>
</html>
"""


def _display(value: Any) -> str | None:
    if value is None:
        return None
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


class SecurityReportGenerator:
    """Generate standalone HTML pages for security reports."""

    def __init__(self) -> None:
        self.template = Template(SECURITY_REPORT_TEMPLATE, autoescape=True)

    def render(self, reports: list[SecurityReport]) -> str:
        points = []
        for report in reports:
            row = report.flat()
            notes = report.notes
            row.pop("notes", None)
            points.append(
                {"values": [(k, _display(v)) for k, v in row.items()], "notes": notes}
            )
        return self.template.render(
            points=points, timestamp=datetime.now().strftime("%Y-%m-%d %H:%M:%S")
        )

    def generate(self, reports: list[SecurityReport], output_path: Path) -> None:
        """Render ``reports`` and write the page to ``output_path``."""
        output_path.parent.mkdir(parents=True, exist_ok=True)
        output_path.write_text(self.render(reports), encoding="utf-8")

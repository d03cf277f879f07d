"""Tests for CSV and HTML output."""
import io
import math

from sparse_ots.core.models import BasisKind, CpaParams, IndistParams
from sparse_ots.export.csv_writer import Marker, format_value, read_data_rows, render_csv, write_csv
from sparse_ots.export.html_report import SecurityReportGenerator
from sparse_ots.security.report import security_report


def test_format_value():
    """Test cell formatting of the value types the harnesses emit."""
    assert format_value(None) == ""
    assert format_value(True) == "true"
    assert format_value(math.inf) == "inf"
    assert format_value(-math.inf) == "-inf"
    assert format_value(0.1 + 0.2) == "0.3"
    assert format_value(137) == "137"
    assert format_value(BasisKind.HAAR) == "haar"


def test_marker_render():
    """Test marker rows carry the grid point and reason behind a hash."""
    assert Marker("skipped").render() == "# skipped"
    assert Marker("K=9 > M=8", {"rho": 0.25, "kappa": 1.125}).render() == (
        "# rho=0.25,kappa=1.125: K=9 > M=8"
    )


def test_render_csv_with_markers():
    """Test data rows follow the header order and markers stay on one line."""
    rows = [{"b": 2, "a": 1}, Marker("bad\npoint", {"a": 3}), {"a": 4}]
    assert render_csv(("a", "b"), rows) == "a,b\n1,2\n# a=3: bad point\n4,\n"


def test_write_and_read_csv(tmp_path):
    """Test files are created with parents and markers are skipped on read."""
    path = tmp_path / "nested" / "table.csv"
    write_csv(path, ("x", "y"), [{"x": 1, "y": 0.5}, Marker("gap", {"x": 2})])
    assert read_data_rows(path) == [{"x": "1", "y": "0.5"}]

    stream = io.StringIO()
    write_csv(stream, ("x",), [{"x": 9}])
    assert stream.getvalue() == "x\n9\n"


def test_html_report(tmp_path):
    """Test the page lists every point, marks missing values and escapes notes."""
    reports = [
        security_report(CpaParams(k=256, q=256), IndistParams(m=256, q=48, gamma=0.9)),
        security_report(CpaParams(k=200, q=200)),
    ]
    reports[1].notes.append("<script>")
    path = tmp_path / "report" / "bounds.html"
    SecurityReportGenerator().generate(reports, path)

    html = path.read_text()
    assert "2 parameter point(s)" in html
    assert "Point 2" in html
    assert "n/a" in html
    assert "&lt;script&gt;" in html
    assert "<script>" not in html

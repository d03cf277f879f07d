"""CSV and HTML output."""
from sparse_ots.export.csv_writer import Marker, format_value, read_data_rows, render_csv, write_csv
from sparse_ots.export.html_report import SecurityReportGenerator

__all__ = [
    "Marker",
    "SecurityReportGenerator",
    "format_value",
    "read_data_rows",
    "render_csv",
    "write_csv",
]

# Copyright The fracstep Authors. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0
import json
import logging
from pathlib import Path

from ..constants import (
    COL_ALPHA,
    COL_CORRECTED,
    COL_ERROR,
    COL_EXPECTED_RATE,
    COL_K,
    COL_LEVEL,
    COL_NEWTON_AVG,
    COL_PROBLEM,
    COL_RATE,
    COL_STEPS,
    COL_TAU,
    COL_WALL_MS,
    FORMAT_CSV,
    FORMAT_JSON,
    REPORT_COLUMNS,
)
from ..exceptions import ConfigError, ReportIOError, UnsupportedError
from ..utils import format_float, write_csv
from .study import ConvergenceReport

__all__ = ["emit_report", "load_report", "report_rows"]

logger = logging.getLogger(__name__)


def report_rows(report: ConvergenceReport) -> list[dict]:
    """Flatten a report into CSV rows, one per (alpha, k, level), floats at 17 significant digits."""
    rows = []
    for cell in report.cells:
        for level in cell.levels:
            rows.append(
                {
                    COL_PROBLEM: report.problem,
                    COL_ALPHA: format_float(cell.alpha),
                    COL_K: str(cell.k),
                    COL_CORRECTED: "true" if cell.corrected else "false",
                    COL_LEVEL: str(level.level),
                    COL_STEPS: str(level.N),
                    COL_TAU: format_float(level.tau),
                    COL_ERROR: format_float(level.error),
                    COL_RATE: format_float(level.rate),
                    COL_EXPECTED_RATE: format_float(cell.expected_rate),
                    COL_WALL_MS: format_float(level.wall_ms),
                    COL_NEWTON_AVG: format_float(level.newton_avg),
                }
            )
    return rows


def emit_report(report: ConvergenceReport, format: str, path) -> None:
    """
    Write a report to disk.

    CSV holds one row per level with the columns of REPORT_COLUMNS. JSON
    nests the same fields per (alpha, k) cell and reloads exactly with
    :func:`load_report`. Both end with a newline.

    :param report: the report
    :param format: "csv" or "json"
    :param path: output file
    :raises ReportIOError: the file cannot be written
    """
    if format not in (FORMAT_CSV, FORMAT_JSON):
        raise ConfigError(f"Configuration error: unknown report format {format!r}.")
    try:
        if format == FORMAT_CSV:
            write_csv(path, REPORT_COLUMNS, report_rows(report))
        else:
            text = json.dumps(report.to_dict(), indent=2, allow_nan=False)
            Path(path).write_text(text + "\n", encoding="utf-8")
    except OSError as e:
        raise ReportIOError(path, e) from e
    logger.info(f"Wrote {format} report with {len(report.cells)} cells to {path}")


def load_report(path) -> ConvergenceReport:
    """
    Read a JSON report written by :func:`emit_report`.

    :param path: report file
    :return: ConvergenceReport
    :raises ReportIOError: the file cannot be read
    """
    if str(path).endswith(f".{FORMAT_CSV}"):
        raise UnsupportedError("Only JSON reports can be loaded back")
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ReportIOError(path, e) from e
    return ConvergenceReport.from_dict(data)

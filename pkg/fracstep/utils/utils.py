# Copyright The fracstep Authors. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0
import csv
import logging
import sys
from itertools import islice
from typing import Iterable, List, Mapping, Optional

from ..constants import FLOAT_FORMAT

__all__ = ["get_stdout_logger", "format_float", "read_csv", "write_csv"]


def get_stdout_logger(
    project_identifier: str,
    debug_modules: Optional[List[str]] = None,
    default_level: int = logging.WARNING,
    with_logger_name=False,
) -> logging.Logger:
    """
    Send log records to stdout and return the logger named ``project_identifier``.

    Parameters
    ----------
    project_identifier : str
        Logger name, usually "fracstep".
    debug_modules : Optional[List[str]], default=None
        Logger names switched to DEBUG, e.g. ["fracstep.timestepping.stepper"]
        to trace every Newton solve.
    default_level : int, default=logging.WARNING
        Level of the root handler.
    with_logger_name : bool, default=False
        Prefix records with the logger name.

    Examples
    --------
    >>> logger = get_stdout_logger("fracstep", default_level=logging.INFO)
    >>> logger.info("Study allen-cahn-1d started")
    INFO - Study allen-cahn-1d started
    """
    fmt = "%(levelname)s - %(message)s"
    if with_logger_name:
        fmt = "%(name)s - " + fmt
    logging.basicConfig(level=default_level, format=fmt, stream=sys.stdout)
    for name in debug_modules or ():
        logging.getLogger(name).setLevel(logging.DEBUG)
    return logging.getLogger(project_identifier)


def format_float(value: Optional[float]) -> str:
    """
    Render a float with 17 significant digits, or an empty string for None.

    Examples
    --------
    >>> format_float(0.1)
    '0.10000000000000001'
    >>> format_float(None)
    ''
    """
    if value is None:
        return ""
    return format(float(value), FLOAT_FORMAT)


def read_csv(path: str, limit: Optional[int] = None) -> tuple[list[str], list[dict]]:
    """
    Load a CSV file with a header line.

    :param path: file to read
    :param limit: stop after this many data rows; None reads all
    :return: (column names, rows as dicts keyed by column name)
    """
    with open(path, newline="", encoding="utf-8") as fin:
        reader = csv.DictReader(fin)
        rows = list(islice(reader, limit)) if limit else list(reader)
        header = list(reader.fieldnames or [])
    return header, rows


def write_csv(path: str, headers: List[str], rows: Iterable[Mapping[str, str]]) -> None:
    """
    Write rows under a header line. Lines end with a bare newline on every
    platform, so reports are byte-stable.
    """
    with open(path, "w", newline="", encoding="utf-8") as fout:
        writer = csv.DictWriter(fout, fieldnames=headers, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)

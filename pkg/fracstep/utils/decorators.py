# Copyright The fracstep Authors. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0
import logging
from functools import wraps

import click

from ..constants import EXIT_CONFIG_ERROR, EXIT_SOLVER_FAILURE
from ..exceptions import (
    ConfigError,
    PreconditionError,
    RangeError,
    ReportIOError,
    SolverFailure,
    UnsupportedError,
)

__all__ = ["exit_on_error"]

logger = logging.getLogger(__name__)

_CONFIG_ERRORS = (ConfigError, RangeError, PreconditionError, UnsupportedError, ReportIOError)


def exit_on_error():
    """
    Decorator for CLI commands: maps fracstep errors onto process exit codes.

    Configuration, range and I/O errors exit with 2; solver failures exit with 3.
    """

    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            try:
                return func(*args, **kwargs)
            except _CONFIG_ERRORS as e:
                logger.debug(f"{func.__name__}: {type(e).__name__}", exc_info=True)
                click.echo(f"Error: {e}", err=True)
                raise SystemExit(EXIT_CONFIG_ERROR) from e
            except SolverFailure as e:
                logger.debug(f"{func.__name__}: {type(e).__name__}", exc_info=True)
                click.echo(f"Solver failure: {e}", err=True)
                raise SystemExit(EXIT_SOLVER_FAILURE) from e

        return wrapper

    return decorator

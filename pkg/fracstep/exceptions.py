# Copyright The fracstep Authors. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0
"""
Error hierarchy shared by the solver library and the benchmark CLI.
"""
from typing import Optional

__all__ = [
    "FracstepError",
    "ConfigError",
    "RangeError",
    "PreconditionError",
    "UnsupportedError",
    "SolverFailure",
    "StepFailure",
    "ReportIOError",
]


class FracstepError(Exception):
    """Base class for every error raised by fracstep."""


class ConfigError(FracstepError, ValueError):
    """Invalid configuration value, CLI option or problem name."""


class RangeError(FracstepError, ValueError):
    """A numeric argument lies outside its supported range."""


class PreconditionError(FracstepError, ValueError):
    """Inputs are inconsistent with each other (lengths, shapes)."""


class UnsupportedError(FracstepError, NotImplementedError):
    """The requested combination of options is not implemented."""


class SolverFailure(FracstepError, RuntimeError):
    """
    An iterative solver stopped before reaching its tolerance.

    Attributes:
        residual (float): last residual norm seen by the solver
    """

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(message)
        self.residual = residual


class StepFailure(SolverFailure):
    """
    Newton's method failed on one time step.

    Attributes:
        step (int): index n of the failing step
        residual (float): residual infinity-norm after the last iteration
    """

    def __init__(self, step: int, residual: float, iterations: Optional[int] = None):
        message = f"Newton iteration failed at step n={step} (residual={residual:.3e}"
        if iterations is not None:
            message += f" after {iterations} iterations"
        message += "); the time step is likely too large"
        super().__init__(message, residual)
        self.step = step
        self.iterations = iterations


class ReportIOError(FracstepError, OSError):
    """Reading or writing a report file failed."""

    def __init__(self, path, cause: Exception):
        super().__init__(f"Unable to access report file '{path}': {cause}")
        self.path = path

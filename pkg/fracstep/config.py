# Copyright The fracstep Authors. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0
import logging
import os
from dataclasses import dataclass
from typing import Any

from networkx.utils.configs import Config

from .constants import (
    ENV_CHOLESKY_MAX_ROWS,
    ENV_LOG_LEVEL,
    ENV_NEWTON_MAX_ITER,
    ENV_NEWTON_TOL,
    ENV_WORKERS,
)
from .exceptions import ConfigError

__all__ = [
    "FracstepConfig",
    "get_config",
    "set_config",
]

logger = logging.getLogger(__name__)

_LOG_LEVELS = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}


@dataclass
class FracstepConfig(Config):
    """
    Configuration for the fracstep solvers and the benchmark runner.

    Attribute and bracket notation are supported for getting and setting configurations::

        >>> cfg = get_config()
        >>> cfg.workers = 4
        >>> cfg["newton_tol"]
        1e-12

    It can also be changed temporarily::

        >>> with get_config()(workers=2):
        ...     run_study(study)

    Newton Parameters
    -----------------
    newton_tol: float
        Tolerance on the scaled residual infinity-norm of every time step. Overridden by FRACSTEP_NEWTON_TOL.
        Defaults to 1e-12.

    newton_max_iter: int
        Iteration cap of one Newton solve. Overridden by FRACSTEP_NEWTON_MAX_ITER. Defaults to 25.

    Linear Algebra Parameters
    -------------------------
    cholesky_max_rows: int
        Largest system solved by sparse Cholesky; bigger SPD systems go to Jacobi-preconditioned CG.
        Overridden by FRACSTEP_CHOLESKY_MAX_ROWS. Defaults to 200000.

    cg_max_iter_factor: int
        CG gives up after cg_max_iter_factor * n iterations. Defaults to 10.

    spd_rtol: float
        Relative residual target of solve_spd. Defaults to 1e-12.

    Special Function Parameters
    ---------------------------
    ml_series_limit: float
        Largest |x| for which the Mittag-Leffler Taylor series is ever used. Defaults to 5.0.

    Benchmark Parameters
    --------------------
    workers: int
        Number of study cells run concurrently. Overridden by FRACSTEP_WORKERS. Defaults to 1.

    log_level: str
        Default level of the CLI stdout logger. Overridden by FRACSTEP_LOG_LEVEL. Defaults to "WARNING".

    Notes
    -----
    This is a global configuration. Use with caution when using from multiple threads.
    """

    newton_tol: float = 1e-12
    newton_max_iter: int = 25

    cholesky_max_rows: int = 200000
    cg_max_iter_factor: int = 10
    spd_rtol: float = 1e-12

    ml_series_limit: float = 5.0

    workers: int = 1
    log_level: str = "WARNING"

    def _on_setattr(self, key: str, value: Any) -> Any:
        if key in ("newton_tol", "spd_rtol"):
            value = float(value)
            if not value > 0:
                raise ConfigError(f"Configuration error: {key} must be positive, got {value}.")
        elif key in ("newton_max_iter", "cholesky_max_rows", "cg_max_iter_factor", "workers"):
            if isinstance(value, bool) or int(value) != value:
                raise ConfigError(f"Configuration error: {key} must be an integer, got {value!r}.")
            value = int(value)
            if value < 1:
                raise ConfigError(f"Configuration error: {key} must be at least 1, got {value}.")
        elif key == "ml_series_limit":
            value = float(value)
            if not 0 < value <= 5.0:
                raise ConfigError(
                    f"Configuration error: ml_series_limit must lie in (0, 5], got {value}."
                )
        elif key == "log_level":
            value = str(value).upper()
            if value not in _LOG_LEVELS:
                raise ConfigError(
                    f"Configuration error: log_level must be one of {sorted(_LOG_LEVELS)}, got {value!r}."
                )
        return value

    @classmethod
    def from_env(cls) -> "FracstepConfig":
        """Build a configuration from defaults overridden by FRACSTEP_* environment variables."""
        overrides: dict[str, Any] = {}
        env_map = {
            ENV_WORKERS: "workers",
            ENV_NEWTON_TOL: "newton_tol",
            ENV_NEWTON_MAX_ITER: "newton_max_iter",
            ENV_CHOLESKY_MAX_ROWS: "cholesky_max_rows",
            ENV_LOG_LEVEL: "log_level",
        }
        for env_name, key in env_map.items():
            raw = os.environ.get(env_name)
            if raw:
                logger.debug(f"Using {env_name}={raw}")
                overrides[key] = _parse_env_value(key, raw)
        return cls(**overrides)


def _parse_env_value(key: str, raw: str) -> Any:
    try:
        if key in ("newton_tol",):
            return float(raw)
        if key == "log_level":
            return raw
        return int(raw)
    except ValueError as e:
        raise ConfigError(f"Configuration error: cannot parse {key} from {raw!r}.") from e


_config = FracstepConfig.from_env()


def get_config() -> FracstepConfig:
    """Return the process-wide configuration."""
    return _config


def set_config(**kwargs) -> FracstepConfig:
    """
    Update fields of the process-wide configuration.

    :param kwargs: configuration names and their new values
    :return: the updated configuration
    """
    for key, value in kwargs.items():
        if key not in _config:
            raise ConfigError(f"Configuration error: unknown configuration name {key!r}.")
        _config[key] = value
    return _config


def reload_from_env() -> FracstepConfig:
    """Re-read FRACSTEP_* environment variables into the process-wide configuration."""
    fresh = FracstepConfig.from_env()
    for key in fresh:
        _config[key] = fresh[key]
    return _config

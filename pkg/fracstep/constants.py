# Copyright The fracstep Authors. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0
"""
fracstep constants
"""

# Environment variables read by FracstepConfig.from_env()
ENV_WORKERS = "FRACSTEP_WORKERS"
ENV_NEWTON_TOL = "FRACSTEP_NEWTON_TOL"
ENV_NEWTON_MAX_ITER = "FRACSTEP_NEWTON_MAX_ITER"
ENV_CHOLESKY_MAX_ROWS = "FRACSTEP_CHOLESKY_MAX_ROWS"
ENV_LOG_LEVEL = "FRACSTEP_LOG_LEVEL"

# Supported BDF orders
MIN_BDF_ORDER = 1
MAX_BDF_ORDER = 6

# Spatial backends
BACKEND_FD1D = "fd1d"
BACKEND_FEM1D = "fem1d"
BACKEND_FEM2D = "fem2d"
BACKENDS = (BACKEND_FD1D, BACKEND_FEM1D, BACKEND_FEM2D)

# Reference modes of a convergence study
REF_EXACT = "exact-oracle"
REF_FINE = "fine-run"

# Report formats
FORMAT_CSV = "csv"
FORMAT_JSON = "json"

# Report columns, in emission order
COL_PROBLEM = "problem"
COL_ALPHA = "alpha"
COL_K = "k"
COL_CORRECTED = "corrected"
COL_LEVEL = "level"
COL_STEPS = "N"
COL_TAU = "tau"
COL_ERROR = "error"
COL_RATE = "rate"
COL_EXPECTED_RATE = "expected_rate"
COL_WALL_MS = "wall_ms"
COL_NEWTON_AVG = "newton_avg"

REPORT_COLUMNS = [
    COL_PROBLEM,
    COL_ALPHA,
    COL_K,
    COL_CORRECTED,
    COL_LEVEL,
    COL_STEPS,
    COL_TAU,
    COL_ERROR,
    COL_RATE,
    COL_EXPECTED_RATE,
    COL_WALL_MS,
    COL_NEWTON_AVG,
]

# Float rendering for text outputs
FLOAT_FORMAT = ".17g"

# CLI exit codes
EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_SOLVER_FAILURE = 3

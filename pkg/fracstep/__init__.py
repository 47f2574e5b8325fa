# Copyright The fracstep Authors. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0
from .bench import (
    ConvergenceReport,
    StudyConfig,
    emit_report,
    load_report,
    observed_order,
    run_study,
)
from .config import FracstepConfig, get_config, set_config
from .exceptions import (
    ConfigError,
    FracstepError,
    PreconditionError,
    RangeError,
    ReportIOError,
    SolverFailure,
    StepFailure,
    UnsupportedError,
)
from .problems import (
    ProblemSpec,
    allen_cahn_1d,
    allen_cahn_2d,
    available_problems,
    get_problem,
    linear_mode_1d,
    linear_source_1d,
)
from .quadrature import (
    BdfDelta,
    CorrectionSet,
    CqWeights,
    bdf_delta_coeffs,
    correction_coeffs,
    cq_weights,
    cq_weights_fft,
)
from .spatial import (
    Mesh,
    OperatorPair,
    SparseSpd,
    assemble,
    assemble_fd,
    assemble_fem,
    build_mesh,
    discrete_eigenvalue,
    solve_spd,
)
from .special import MlParams, linear_mode_solution, mittag_leffler
from .timestepping import (
    SemilinearRhs,
    StepperConfig,
    Trajectory,
    history_term,
    run,
    step,
)

__version__ = "0.1.0"

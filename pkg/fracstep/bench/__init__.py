# Copyright The fracstep Authors. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0
from .report import emit_report, load_report, report_rows
from .study import (
    ConvergenceReport,
    LevelResult,
    StudyCell,
    StudyConfig,
    observed_order,
    reference_noise_floor,
    run_study,
    tail_rate,
)

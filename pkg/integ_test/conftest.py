# Copyright The fracstep Authors. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0
"""Root conftest for acceptance studies.

The studies run full refinement ladders against fine reference runs and take
minutes each, so they only run when FRACSTEP_ACCEPTANCE is set.
"""

import logging
import os

import pytest

from fracstep.bench import ConvergenceReport, StudyConfig, run_study

logger = logging.getLogger(__name__)

ACCEPTANCE = os.environ.get("FRACSTEP_ACCEPTANCE", "")

ALPHAS = (0.3, 0.5, 0.7)
NONLINEAR_KS = (2, 3, 6)

# corrected BDF3 at 32x the finest ladder step, N_ref = 12800
REFERENCE = dict(ref_k=3, ref_multiplier=32)


@pytest.fixture(scope="module", autouse=True)
def _require_acceptance():
    if not ACCEPTANCE:
        pytest.skip("FRACSTEP_ACCEPTANCE not set")


def study(**kwargs) -> ConvergenceReport:
    """Run a study and log its summary lines."""
    report = run_study(StudyConfig(**kwargs))
    for cell in report.cells:
        logger.info(
            f"{report.problem} alpha={cell.alpha} k={cell.k} corrected={cell.corrected} "
            f"errors={cell.errors} rates={cell.rates} tail={cell.tail_rate}"
        )
    return report


@pytest.fixture(scope="session")
def allen_cahn_corrected():
    """Corrected allen-cahn-1d sweep at the default acceptance scale."""
    return study(problem="allen-cahn-1d", alphas=ALPHAS, ks=NONLINEAR_KS, **REFERENCE)


@pytest.fixture(scope="session")
def allen_cahn_uncorrected():
    """The same sweep with the starting corrections disabled."""
    return study(problem="allen-cahn-1d", alphas=ALPHAS, ks=NONLINEAR_KS, corrected=False, **REFERENCE)

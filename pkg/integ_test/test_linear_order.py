# Copyright The fracstep Authors. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0
import pytest

from conftest import ALPHAS, study
from fracstep.constants import REF_EXACT

LINEAR_KS = (1, 2, 3, 4)


@pytest.fixture(scope="module")
def linear_mode_report():
    return study(problem="linear-mode-1d", alphas=ALPHAS, ks=LINEAR_KS)


class TestLinearOrder:
    """Corrected BDF-k on the single-mode problem against its Mittag-Leffler oracle"""

    def test_exact_reference(self, linear_mode_report):
        assert linear_mode_report.reference == REF_EXACT
        assert not linear_mode_report.failures

    @pytest.mark.parametrize("alpha", ALPHAS)
    @pytest.mark.parametrize("k", LINEAR_KS)
    def test_rate(self, linear_mode_report, alpha, k):
        cell = linear_mode_report.cell(alpha, k)
        assert cell.expected_rate == k
        assert cell.tail_rate is not None, f"No rate above the noise floor for alpha={alpha}, k={k}: errors={cell.errors}"
        assert cell.tail_rate == pytest.approx(k, abs=0.15)

    @pytest.mark.parametrize("alpha", ALPHAS)
    @pytest.mark.parametrize("k", LINEAR_KS)
    def test_monotone_refinement(self, linear_mode_report, alpha, k):
        """Test that errors decrease strictly along the ladder"""
        errors = linear_mode_report.cell(alpha, k).errors
        assert all(fine < coarse for coarse, fine in zip(errors, errors[1:]))

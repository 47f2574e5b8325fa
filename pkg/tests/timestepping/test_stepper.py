# Copyright The fracstep Authors. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0
import math
from unittest.mock import patch

import numpy as np
import pytest
import scipy.sparse as sps

from fracstep.config import set_config
from fracstep.exceptions import PreconditionError, RangeError, SolverFailure, StepFailure
from fracstep.problems import linear_source_1d
from fracstep.quadrature import cq_weights
from fracstep.spatial import OperatorPair, SparseSpd, assemble, build_mesh
from fracstep.special import linear_mode_solution
from fracstep.timestepping import (
    CqStepper,
    SemilinearRhs,
    StepperConfig,
    history_term,
    run,
    step,
)


def scalar_ops(lam: float) -> OperatorPair:
    """A single unknown with mass [1] and stiffness [lam]."""
    return OperatorPair(
        mesh=build_mesh(1, 2),
        mass=SparseSpd(sps.identity(1)),
        stiffness=SparseSpd(sps.csr_matrix([[lam]])),
        kappa=lam,
        backend="fd1d",
    )


def sine(ops, m=1):
    return ops.mesh.sample(lambda x: np.sin(m * np.pi * x))


class TestStepperConfig:
    """Tests for StepperConfig"""

    def test_time_grid(self):
        config = StepperConfig(alpha=0.5, k=2, N=8, T=2.0)
        assert config.tau == 0.25
        assert config.times()[-1] == 2.0
        assert len(config.times()) == 9

    def test_defaults_from_config(self):
        """Test that Newton settings fall back to the global configuration"""
        set_config(newton_tol=1e-10, newton_max_iter=7)
        config = StepperConfig(alpha=0.5, k=2, N=8)
        assert config.newton_tol == 1e-10
        assert config.newton_max_iter == 7
        assert StepperConfig(alpha=0.5, k=2, N=8, newton_tol=1e-8).newton_tol == 1e-8

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(alpha=0.0, k=2, N=8),
            dict(alpha=1.5, k=2, N=8),
            dict(alpha=0.5, k=7, N=8),
            dict(alpha=0.5, k=3, N=2),
            dict(alpha=0.5, k=2, N=8, T=0.0),
            dict(alpha=0.5, k=2, N=8, newton_tol=-1.0),
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(RangeError):
            StepperConfig(**kwargs)


class TestHistoryTerm:
    """Tests for history_term"""

    def test_first_step(self):
        """Test H_1 = 0"""
        u0 = np.array([1.0, 2.0])
        assert history_term(cq_weights(1, 0.5, 4), [], u0, 1).tolist() == [0.0, 0.0]

    def test_second_step(self):
        """Test H_2 = omega_1 (u_1 - u_0)"""
        u0 = np.array([1.0, 2.0])
        v = np.array([0.5, -1.0])
        H = history_term(cq_weights(1, 0.5, 2), [u0 + v], u0, 2)
        np.testing.assert_allclose(H, -0.5 * v)

    def test_constant_sequence(self):
        """Test that a constant sequence has no history"""
        u0 = np.array([3.0, -1.0, 0.5])
        weights = cq_weights(3, 0.7, 10)
        for n in range(1, 11):
            assert np.all(history_term(weights, [u0] * (n - 1), u0, n) == 0.0)

    def test_general_sum(self):
        """Test the full sum against a direct loop"""
        rng = np.random.default_rng(3)
        weights = cq_weights(4, 0.3, 6)
        u = [rng.standard_normal(3) for _ in range(6)]
        expected = sum(weights[i] * (u[6 - i] - u[0]) for i in range(1, 6))
        np.testing.assert_allclose(history_term(weights, u[1:], u[0], 6), expected, atol=1e-15)

    @pytest.mark.parametrize("past_len,n", [(2, 2), (0, 0), (5, 6)])
    def test_length_mismatch(self, past_len, n):
        """Test that inconsistent inputs are rejected"""
        weights = cq_weights(2, 0.5, 4)
        with pytest.raises(PreconditionError):
            history_term(weights, [np.zeros(2)] * past_len, np.zeros(2), n)


class TestStep:
    """Tests for a single step"""

    @pytest.mark.parametrize("lam,alpha,tau", [(1.0, 0.5, 0.1), (5.0, 0.3, 0.5), (0.2, 0.9, 1.0)])
    def test_scalar_backward_euler(self, lam, alpha, tau):
        """Test u_1 = u_0 / (1 + tau^alpha lam) for one unknown"""
        config = StepperConfig(alpha=alpha, k=1, N=1, T=tau)
        u1 = step(config, scalar_ops(lam), SemilinearRhs.zero(), [np.array([2.0])], 1)
        assert u1[0] == pytest.approx(2.0 / (1.0 + tau**alpha * lam), rel=1e-14)

    def test_matches_run(self):
        """Test that step recomputes the u_n of a full run"""
        ops = assemble("fd1d", 16, 0.1)
        problem_u0 = ops.mesh.sample(lambda x: 4 * x * (1 - x))
        rhs = SemilinearRhs.allen_cahn()
        config = StepperConfig(alpha=0.5, k=3, N=6)
        trajectory = run(config, ops, rhs, problem_u0, snapshot_at=range(7))
        state = [trajectory.snapshots[j] for j in range(4)]
        np.testing.assert_allclose(step(config, ops, rhs, state, 4), trajectory.snapshots[4], atol=1e-13)

    def test_wrong_state_length(self):
        config = StepperConfig(alpha=0.5, k=1, N=4)
        with pytest.raises(PreconditionError):
            step(config, scalar_ops(1.0), SemilinearRhs.zero(), [np.ones(1)], 3)

    def test_index_out_of_range(self):
        config = StepperConfig(alpha=0.5, k=1, N=4)
        with pytest.raises(RangeError):
            step(config, scalar_ops(1.0), SemilinearRhs.zero(), [np.ones(1)] * 5, 5)


class TestRun:
    """Tests for run and CqStepper"""

    def test_zero_solution(self):
        """Test that f = 0 and u0 = 0 stay zero"""
        ops = assemble("fem2d", 6, 0.1)
        trajectory = run(StepperConfig(alpha=0.5, k=4, N=12), ops, SemilinearRhs.zero(), np.zeros(ops.n))
        for values in trajectory.snapshots.values():
            assert np.all(values == 0.0)

    @pytest.mark.parametrize("backend", ["fd1d", "fem1d", "fem2d"])
    def test_equilibrium(self, backend):
        """Test that the fixed point u = 0 of u - u^3 is kept with one Newton iteration per step"""
        ops = assemble(backend, 8, 0.1)
        trajectory = run(StepperConfig(alpha=0.7, k=3, N=10), ops, SemilinearRhs.allen_cahn(1.0), np.zeros(ops.n))
        assert np.all(trajectory.final == 0.0)
        assert trajectory.newton_iters.tolist() == [1] * 10
        assert trajectory.newton_avg == 1.0

    def test_backward_euler_single_step(self):
        """Test that N = k = 1 is one backward Euler CQ step"""
        config = StepperConfig(alpha=0.5, k=1, N=1)
        trajectory = run(config, scalar_ops(3.0), SemilinearRhs.zero(), np.array([1.0]))
        assert trajectory.final[0] == pytest.approx(1.0 / 4.0, rel=1e-14)

    def test_linearity(self):
        """Test that u0 -> u_N is linear when f = 0"""
        ops = assemble("fem1d", 16, 1.0)
        rng = np.random.default_rng(5)
        a, b = rng.standard_normal(ops.n), rng.standard_normal(ops.n)
        config = StepperConfig(alpha=0.5, k=3, N=16)
        rhs = SemilinearRhs.zero()
        combined = run(config, ops, rhs, 2.0 * a - 3.0 * b).final
        separate = 2.0 * run(config, ops, rhs, a).final - 3.0 * run(config, ops, rhs, b).final
        np.testing.assert_allclose(combined, separate, rtol=0, atol=1e-11)

    @pytest.mark.parametrize("m", [1, 3])
    def test_modal(self, m):
        """Test that a discrete eigenvector stays a multiple of itself"""
        ops = assemble("fd1d", 32, 1.0)
        v = sine(ops, m)
        final = run(StepperConfig(alpha=0.3, k=4, N=20), ops, SemilinearRhs.zero(), v).final
        amplitude = final @ v / (v @ v)
        assert np.max(np.abs(final - amplitude * v)) < 1e-11

    def test_k1_corrected_is_uncorrected(self):
        """Test that k = 1 has no corrections at all"""
        ops = assemble("fd1d", 16, 0.1)
        u0 = ops.mesh.sample(lambda x: 4 * x * (1 - x))
        rhs = SemilinearRhs.allen_cahn()
        corrected = run(StepperConfig(alpha=0.5, k=1, N=10, corrected=True), ops, rhs, u0).final
        uncorrected = run(StepperConfig(alpha=0.5, k=1, N=10, corrected=False), ops, rhs, u0).final
        assert np.array_equal(corrected, uncorrected)

    @pytest.mark.parametrize("corrected,order", [(True, 2.0), (False, 1.0)])
    def test_scalar_mode_order(self, corrected, order):
        """Test the order of BDF2 on one decaying mode against the Mittag-Leffler solution"""
        exact = linear_mode_solution(0.5, 1.0, 1.0)

        def error(N):
            config = StepperConfig(alpha=0.5, k=2, N=N, corrected=corrected)
            final = run(config, scalar_ops(1.0), SemilinearRhs.zero(), np.array([1.0])).final
            return abs(final[0] - exact)

        observed = math.log2(error(64) / error(128))
        assert observed == pytest.approx(order, abs=0.2)

    def test_newton_iterations_bounded(self):
        """Test quadratic Newton convergence on Allen-Cahn at acceptance scale"""
        ops = assemble("fd1d", 50, 0.1)
        u0 = ops.mesh.sample(lambda x: 4 * x * (1 - x))
        trajectory = run(StepperConfig(alpha=0.5, k=3, N=50), ops, SemilinearRhs.allen_cahn(), u0)
        assert trajectory.newton_iters.max() <= 6
        assert np.max(np.abs(trajectory.final)) <= 1.01

    def test_affine_factorizes_once(self):
        """Test that affine problems reuse one Jacobian factorization"""
        ops = assemble("fem1d", 16, 1.0)
        stepper = CqStepper(StepperConfig(alpha=0.5, k=2, N=10), ops, SemilinearRhs.affine(-1.0, 1.0), sine(ops))
        stepper.run()
        assert stepper.factorizations == 1

    def test_snapshots(self):
        """Test that snapshots are sorted and always hold 0 and N"""
        ops = assemble("fd1d", 8, 1.0)
        u0 = sine(ops)
        trajectory = run(StepperConfig(alpha=0.5, k=2, N=6), ops, SemilinearRhs.zero(), u0, snapshot_at=[4, 2])
        assert list(trajectory.snapshots) == [0, 2, 4, 6]
        assert np.array_equal(trajectory.snapshots[0], u0)
        assert trajectory.N == 6
        assert len(trajectory.newton_iters) == 6

    def test_snapshot_out_of_range(self):
        ops = assemble("fd1d", 8, 1.0)
        with pytest.raises(RangeError):
            run(StepperConfig(alpha=0.5, k=2, N=6), ops, SemilinearRhs.zero(), sine(ops), snapshot_at=[7])

    def test_initial_shape(self):
        """Test that a wrongly sized initial vector is rejected"""
        ops = assemble("fd1d", 8, 1.0)
        with pytest.raises(PreconditionError):
            run(StepperConfig(alpha=0.5, k=2, N=6), ops, SemilinearRhs.zero(), np.ones(3))

    def test_newton_failure(self):
        """Test that an exhausted Newton budget raises StepFailure with the step index"""
        ops = assemble("fd1d", 8, 0.1)
        u0 = ops.mesh.sample(lambda x: 4 * x * (1 - x))
        config = StepperConfig(alpha=0.5, k=2, N=4, newton_max_iter=1)
        with pytest.raises(StepFailure) as exc_info:
            run(config, ops, SemilinearRhs.allen_cahn(), u0)
        assert exc_info.value.step == 1
        assert exc_info.value.iterations == 1
        assert exc_info.value.residual > 0

    @patch("fracstep.timestepping.stepper.logger")
    def test_linear_solve_failure(self, mock_logger):
        """Test that a singular Jacobian is reported as StepFailure"""
        ops = assemble("fem1d", 8, 0.1)
        u0 = ops.mesh.sample(lambda x: 4 * x * (1 - x))
        with patch("fracstep.timestepping.stepper.splu", side_effect=RuntimeError("Factor is exactly singular")):
            with pytest.raises(StepFailure) as exc_info:
                run(StepperConfig(alpha=0.5, k=2, N=4), ops, SemilinearRhs.allen_cahn(), u0)
        assert exc_info.value.step == 1
        mock_logger.error.assert_called_once()
        assert "Factor is exactly singular" in mock_logger.error.call_args[0][0]

    @patch("fracstep.timestepping.stepper.logger")
    def test_cholesky_failure_falls_back_to_lu(self, mock_logger):
        """Test that a rejected Cholesky factorization of the Jacobian is retried with LU"""
        ops = assemble("fd1d", 16, 0.1)
        u0 = ops.mesh.sample(lambda x: x * (1 - x))
        config = StepperConfig(alpha=0.5, k=2, N=16)
        expected = run(config, ops, SemilinearRhs.allen_cahn(), u0).final
        failure = SolverFailure("Sparse factorization found pivot -1.000e+00; matrix is not positive definite")
        with patch("fracstep.timestepping.stepper.factorize_spd", side_effect=failure) as factorize:
            final = run(config, ops, SemilinearRhs.allen_cahn(), u0).final
        assert factorize.called
        np.testing.assert_allclose(final, expected, rtol=0, atol=1e-10)
        assert any("using LU" in call[0][0] for call in mock_logger.debug.call_args_list)


class TestLinearSourceOrder:
    """Corrected BDF-k keeps order k with a constant source"""

    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    def test_order(self, k):
        problem = linear_source_1d(alpha=0.5)
        ops = assemble("fd1d", 16, problem.kappa)
        u0 = problem.initial_nodal(ops)
        exact = problem.exact_nodal(ops, problem.T)

        def error(N):
            final = run(StepperConfig(alpha=problem.alpha, k=k, N=N, T=problem.T), ops, problem.rhs, u0).final
            return np.max(np.abs(final - exact))

        errors = [error(N) for N in (16, 32, 64, 128)]
        rates = [math.log2(coarse / fine) for coarse, fine in zip(errors, errors[1:])]
        assert errors[-1] < errors[0]
        assert sum(rates[-2:]) / 2 == pytest.approx(k, abs=0.15)

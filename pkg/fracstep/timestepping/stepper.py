# Copyright The fracstep Authors. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0
"""
Fully implicit corrected BDF-k convolution quadrature for

    mass * d^alpha u + stiffness * u = mass * f(u),   u(0) = u0.

Step n solves

    tau^{-alpha} mass (omega_0 (u_n - u0) + H_n) + stiffness u_n - mass f(u_n)
        - a_n (-stiffness u0 + mass f(u0)) = 0

by Newton's method, where H_n is the convolution history and a_n are the
starting-step corrections (non-zero only for n <= k-1 in corrected mode).
"""
import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.sparse as sps
from scipy.sparse.linalg import splu

from ..config import get_config
from ..constants import MAX_BDF_ORDER, MIN_BDF_ORDER
from ..exceptions import PreconditionError, RangeError, SolverFailure, StepFailure
from ..quadrature import CqWeights, correction_coeffs, cq_weights
from ..spatial import OperatorPair, SparseSpd, factorize_spd
from .rhs import SemilinearRhs

__all__ = [
    "StepperConfig",
    "Trajectory",
    "CqStepper",
    "history_term",
    "step",
    "run",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StepperConfig:
    """
    Time grid and solver settings of one run.

    Attributes:
        alpha (float): fractional order in (0, 1]
        k (int): BDF step count, 1..6
        N (int): number of time steps, at least k
        T (float): final time, positive
        corrected (bool): apply the starting-step corrections
        newton_tol (Optional[float]): scaled residual tolerance; None reads the global configuration
        newton_max_iter (Optional[int]): Newton iteration cap; None reads the global configuration
    """

    alpha: float
    k: int
    N: int
    T: float = 1.0
    corrected: bool = True
    newton_tol: Optional[float] = None
    newton_max_iter: Optional[int] = None

    def __post_init__(self):
        config = get_config()
        if not 0.0 < self.alpha <= 1.0:
            raise RangeError(f"Fractional order alpha must lie in (0, 1], got {self.alpha!r}")
        if isinstance(self.k, bool) or int(self.k) != self.k or not MIN_BDF_ORDER <= self.k <= MAX_BDF_ORDER:
            raise RangeError(f"BDF step count k must be an integer in [1, 6], got {self.k!r}")
        if isinstance(self.N, bool) or int(self.N) != self.N or self.N < self.k:
            raise RangeError(f"Step count N must be an integer >= k={self.k}, got {self.N!r}")
        if not self.T > 0:
            raise RangeError(f"Final time T must be positive, got {self.T!r}")
        if self.newton_tol is None:
            object.__setattr__(self, "newton_tol", config.newton_tol)
        if self.newton_max_iter is None:
            object.__setattr__(self, "newton_max_iter", config.newton_max_iter)
        if not self.newton_tol > 0:
            raise RangeError(f"newton_tol must be positive, got {self.newton_tol!r}")
        if int(self.newton_max_iter) < 1:
            raise RangeError(f"newton_max_iter must be at least 1, got {self.newton_max_iter!r}")

    @property
    def tau(self) -> float:
        return self.T / self.N

    def times(self) -> np.ndarray:
        """t_0..t_N; t_N equals T exactly."""
        return self.T * (np.arange(self.N + 1) / self.N)


@dataclass(eq=False)
class Trajectory:
    """
    Output of a run.

    Attributes:
        times (np.ndarray): t_0..t_N
        snapshots (dict[int, np.ndarray]): step index -> nodal vector; always holds 0 and N
        newton_iters (np.ndarray): Newton iterations of steps 1..N
    """

    times: np.ndarray
    snapshots: dict = field(default_factory=dict)
    newton_iters: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))

    @property
    def N(self) -> int:
        return len(self.times) - 1

    @property
    def final(self) -> np.ndarray:
        return self.snapshots[self.N]

    @property
    def newton_avg(self) -> float:
        if len(self.newton_iters) == 0:
            return 0.0
        return float(np.mean(self.newton_iters))


def history_term(weights: CqWeights, past: Sequence[np.ndarray], u0: np.ndarray, n: int) -> np.ndarray:
    """
    Convolution history H_n = sum_{i=1}^{n} omega_i (u_{n-i} - u0).

    :param weights: omega_0..omega_m with m >= n
    :param past: u_1..u_{n-1}
    :param u0: initial nodal vector
    :param n: step index, at least 1
    :return: H_n (zero for n = 1)
    """
    if n < 1:
        raise PreconditionError(f"history_term needs n >= 1, got {n}")
    if len(past) != n - 1:
        raise PreconditionError(f"history_term at n={n} needs {n - 1} past vectors, got {len(past)}")
    if len(weights) <= n:
        raise PreconditionError(f"history_term at n={n} needs {n + 1} weights, got {len(weights)}")
    u0 = np.asarray(u0, dtype=float)
    if n == 1:
        return np.zeros_like(u0)
    diffs = np.asarray(past, dtype=float) - u0
    if diffs.shape[1:] != u0.shape:
        raise PreconditionError(f"Past vectors have shape {diffs.shape[1:]}, expected {u0.shape}")
    return weights[n - 1 : 0 : -1] @ diffs


class CqStepper:
    """
    Sequential driver of the scheme on one spatial operator pair.

    Keeps the full history u_j - u0 (O(N) vectors) and evaluates each
    convolution directly. Newton Jacobian factorizations are reused while
    f'(u) is unchanged, so affine problems factorize once per run.
    """

    def __init__(self, config: StepperConfig, ops: OperatorPair, rhs: SemilinearRhs, u0: np.ndarray):
        u0 = np.asarray(u0, dtype=float)
        if u0.shape != (ops.n,):
            raise PreconditionError(f"Initial vector has shape {u0.shape}, expected ({ops.n},)")
        if not np.all(np.isfinite(u0)):
            raise PreconditionError("Initial vector must be finite")
        self.config = config
        self.ops = ops
        self.rhs = rhs
        self.u0 = u0
        self.weights = cq_weights(config.k, config.alpha, config.N)
        self.corrections = correction_coeffs(config.k)

        self.scale = config.tau ** (-config.alpha)
        self.c = self.weights[0] * self.scale
        self.mass = ops.mass.matrix
        self.stiffness = ops.stiffness.matrix
        self.base = (self.c * self.mass + self.stiffness).tocsr()
        self._base_norm = float(abs(self.base).sum(axis=1).max())
        self._mass_norm = float(abs(self.mass).sum(axis=1).max())
        self._symmetric = ops.mass_is_diagonal or rhs.is_affine

        self.diffs = np.zeros((config.N + 1, ops.n))
        self.current = u0.copy()
        self._correction_source = -(self.stiffness @ u0) + self.mass @ rhs(u0)
        self._cached_fp: Optional[np.ndarray] = None
        self._cached_solver = None
        self.factorizations = 0

    def _history(self, n: int) -> np.ndarray:
        return self.weights.weights[n:0:-1] @ self.diffs[:n]

    def _jacobian_solver(self, fp: np.ndarray):
        if self._cached_solver is not None and (
            self.rhs.is_affine or np.array_equal(fp, self._cached_fp)
        ):
            return self._cached_solver
        if self.rhs.is_affine:
            jac = self.base - self.rhs.constant_derivative * self.mass
        else:
            jac = self.base - self.mass @ sps.diags(fp)
        jac = sps.csr_matrix(jac)
        solver = None
        if self._symmetric and self.c > float(np.max(fp, initial=-np.inf)):
            try:
                solver = factorize_spd(SparseSpd(jac)).solve
            except SolverFailure as e:
                logger.debug(f"Cholesky of the Newton Jacobian failed ({e}); using LU")
        if solver is None:
            solver = splu(jac.tocsc()).solve
        self._cached_fp = fp
        self._cached_solver = solver
        self.factorizations += 1
        return solver

    def _tolerance(self, u: np.ndarray, fp_max: float) -> float:
        jac_norm = self._base_norm + self._mass_norm * fp_max
        return self.config.newton_tol * max(1.0, jac_norm * max(1.0, float(np.max(np.abs(u), initial=0.0))))

    def solve_step(self, n: int) -> tuple[np.ndarray, int, float]:
        """
        Solve for u_n given u_0..u_{n-1} stored in the history.

        :return: (u_n, Newton iterations, final residual infinity-norm)
        """
        rhs = self.rhs
        constant = self.mass @ (self.scale * self._history(n) - self.c * self.u0)
        a_n = self.corrections.at_step(n) if self.config.corrected else 0.0
        if a_n != 0.0:
            constant = constant - a_n * self._correction_source

        u = self.current.copy()
        max_iter = int(self.config.newton_max_iter)
        residual_norm = np.inf
        for iteration in range(1, max_iter + 2):
            residual = self.base @ u - self.mass @ rhs(u) + constant
            residual_norm = float(np.max(np.abs(residual), initial=0.0))
            if not np.isfinite(residual_norm):
                raise StepFailure(n, residual_norm, iteration)
            fp = rhs.derivative(u)
            fp_abs_max = float(np.max(np.abs(fp), initial=0.0))
            if residual_norm <= self._tolerance(u, fp_abs_max):
                return u, iteration, residual_norm
            if iteration > max_iter:
                break
            try:
                u = u - self._jacobian_solver(fp)(residual)
            except (SolverFailure, RuntimeError) as e:
                logger.error(f"Linear solve failed at step n={n}: {e}")
                raise StepFailure(n, residual_norm, iteration) from e
        raise StepFailure(n, residual_norm, max_iter)

    def advance(self, n: int) -> tuple[np.ndarray, int]:
        u, iterations, residual_norm = self.solve_step(n)
        self.diffs[n] = u - self.u0
        self.current = u
        if logger.isEnabledFor(logging.DEBUG):
            logger.debug(f"step n={n}: {iterations} Newton iterations, residual {residual_norm:.3e}")
        return u, iterations

    def run(self, snapshot_at: Optional[Iterable[int]] = None) -> Trajectory:
        N = self.config.N
        wanted = {0, N}
        for index in snapshot_at or ():
            if isinstance(index, bool) or int(index) != index or not 0 <= index <= N:
                raise RangeError(f"Snapshot index must lie in [0, {N}], got {index!r}")
            wanted.add(int(index))
        trajectory = Trajectory(times=self.config.times(), newton_iters=np.zeros(N, dtype=int))
        trajectory.snapshots[0] = self.u0.copy()
        for n in range(1, N + 1):
            u, iterations = self.advance(n)
            trajectory.newton_iters[n - 1] = iterations
            if n in wanted:
                trajectory.snapshots[n] = u.copy()
        logger.debug(
            f"run finished: alpha={self.config.alpha}, k={self.config.k}, N={N}, "
            f"corrected={self.config.corrected}, {self.factorizations} factorizations"
        )
        trajectory.snapshots = dict(sorted(trajectory.snapshots.items()))
        return trajectory


def step(
    config: StepperConfig,
    ops: OperatorPair,
    rhs: SemilinearRhs,
    state: Sequence[np.ndarray],
    n: int,
) -> np.ndarray:
    """
    Compute u_n from u_0..u_{n-1}.

    :param config: time grid and solver settings
    :param ops: spatial operators
    :param rhs: nonlinearity
    :param state: u_0..u_{n-1}
    :param n: step index, 1 <= n <= config.N
    :return: u_n
    :raises StepFailure: Newton did not converge
    """
    if not 1 <= n <= config.N:
        raise RangeError(f"Step index must lie in [1, {config.N}], got {n!r}")
    if len(state) != n:
        raise PreconditionError(f"step n={n} needs u_0..u_{n - 1} ({n} vectors), got {len(state)}")
    stepper = CqStepper(config, ops, rhs, state[0])
    for j in range(1, n):
        stepper.diffs[j] = np.asarray(state[j], dtype=float) - stepper.u0
    stepper.current = np.asarray(state[n - 1], dtype=float).copy()
    u, _, _ = stepper.solve_step(n)
    return u


def run(
    config: StepperConfig,
    ops: OperatorPair,
    rhs: SemilinearRhs,
    u0_nodal: np.ndarray,
    snapshot_at: Optional[Iterable[int]] = None,
) -> Trajectory:
    """
    Apply the scheme for n = 1..N.

    :param config: time grid and solver settings
    :param ops: spatial operators
    :param rhs: nonlinearity
    :param u0_nodal: initial nodal vector over the interior nodes
    :param snapshot_at: step indices to keep besides 0 and N
    :return: Trajectory
    :raises StepFailure: some step failed; carries the failing index
    """
    return CqStepper(config, ops, rhs, u0_nodal).run(snapshot_at)

# Copyright The fracstep Authors. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0
"""
Temporal convergence studies.

A study runs every (alpha, k) cell on a ladder of step counts
N = N0 * 2^l, l = 0..L-1, measures the error at t = T in the maximum norm
over the interior nodes, and fits observed orders log2(e_l / e_{l+1}).
"""
import concurrent.futures
import logging
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..config import get_config
from ..constants import (
    FORMAT_CSV,
    FORMAT_JSON,
    MAX_BDF_ORDER,
    MIN_BDF_ORDER,
    REF_EXACT,
    REF_FINE,
)
from ..exceptions import ConfigError, RangeError, StepFailure
from ..problems import ProblemSpec, get_problem
from ..spatial import OperatorPair, assemble, backend_dim
from ..timestepping import StepperConfig, run

__all__ = [
    "StudyConfig",
    "LevelResult",
    "StudyCell",
    "ConvergenceReport",
    "run_study",
    "observed_order",
    "tail_rate",
    "reference_noise_floor",
]

logger = logging.getLogger(__name__)

EXACT_NOISE_FLOOR = 1e-15
NOISE_FLOOR_FACTOR = 100.0
MIN_REFERENCE_RATIO = 4


def observed_order(errors: Sequence[float]) -> list[float]:
    """
    Observed orders r_l = log2(e_l / e_{l+1}) of a halving ladder.

    :param errors: positive errors, at least two
    :return: the len(errors) - 1 rates

    >>> observed_order([4e-2, 1e-2, 2.5e-3])
    [2.0, 2.0]
    """
    if len(errors) < 2:
        raise RangeError(f"observed_order needs at least two errors, got {len(errors)}")
    if any(not e > 0 for e in errors):
        raise RangeError(f"observed_order needs positive errors, got {list(errors)}")
    return [math.log2(errors[i] / errors[i + 1]) for i in range(len(errors) - 1)]


def reference_noise_floor(fine: np.ndarray, half: np.ndarray, rate: float) -> float:
    """
    Error estimate of a fine reference run from the same scheme at half the steps.

    If the reference scheme converges at ``rate``, its error is about
    max|fine - half| / (2^rate - 1).

    :param fine: reference solution at N_ref steps
    :param half: the same scheme at N_ref / 2 steps
    :param rate: expected order of the reference scheme, positive
    :return: estimated maximum-norm error of ``fine``
    """
    if not rate > 0:
        raise RangeError(f"Reference rate must be positive, got {rate!r}")
    gap = float(np.max(np.abs(np.asarray(fine) - np.asarray(half)), initial=0.0))
    return gap / (2.0**rate - 1.0)


def tail_rate(rates: Sequence[Optional[float]]) -> Optional[float]:
    """Mean of the last two reported (non-None) rates."""
    reported = [r for r in rates if r is not None]
    if not reported:
        return None
    tail = reported[-2:]
    return sum(tail) / len(tail)


@dataclass(frozen=True)
class StudyConfig:
    """
    Parameters of a convergence study.

    Attributes:
        problem (str): built-in problem name
        alphas (tuple[float, ...]): fractional orders to sweep
        ks (tuple[int, ...]): BDF step counts to sweep
        corrected (bool): use the starting-step corrections
        base_steps (int): N0, step count of level 0
        levels (int): L, number of levels
        backend (Optional[str]): "fd1d", "fem1d" or "fem2d"; problem default when None
        mesh (int): subdivisions M per direction
        reference (Optional[str]): "exact-oracle" or "fine-run"; exact when the problem has an oracle
        ref_multiplier (int): N_ref = ref_multiplier * N0 * 2^(L-1) for fine-run references
        ref_k (int): BDF step count of the reference run (always corrected)
        cutoff (Optional[float]): replace f by its globally Lipschitz cutoff at this level
        workers (Optional[int]): concurrent cells; the global configuration when None
        output (Optional[str]): report path
        format (str): "csv" or "json"
    """

    problem: str
    alphas: tuple = (0.3, 0.5, 0.7)
    ks: tuple = (1, 2, 3, 4, 5, 6)
    corrected: bool = True
    base_steps: int = 50
    levels: int = 4
    backend: Optional[str] = None
    mesh: int = 200
    reference: Optional[str] = None
    ref_multiplier: int = 16
    ref_k: int = 6
    cutoff: Optional[float] = None
    workers: Optional[int] = None
    output: Optional[str] = None
    format: str = FORMAT_CSV

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        object.__setattr__(self, "ks", tuple(int(k) for k in self.ks))
        if not self.alphas or not self.ks:
            raise ConfigError("Configuration error: a study needs at least one alpha and one k.")
        for alpha in self.alphas:
            if not 0.0 < alpha < 1.0:
                raise ConfigError(f"Configuration error: alpha must lie in (0, 1), got {alpha}.")
        for k in self.ks + (self.ref_k,):
            if not MIN_BDF_ORDER <= k <= MAX_BDF_ORDER:
                raise ConfigError(f"Configuration error: k must lie in [1, 6], got {k}.")
        if self.levels < 1:
            raise ConfigError(f"Configuration error: levels must be at least 1, got {self.levels}.")
        if self.base_steps < max(self.ks):
            raise ConfigError(
                f"Configuration error: base_steps={self.base_steps} is smaller than k={max(self.ks)}."
            )
        if self.reference not in (None, REF_EXACT, REF_FINE):
            raise ConfigError(
                f"Configuration error: reference must be '{REF_EXACT}' or '{REF_FINE}', got {self.reference!r}."
            )
        if self.ref_multiplier < MIN_REFERENCE_RATIO:
            raise ConfigError(
                f"Configuration error: the reference must use at least {MIN_REFERENCE_RATIO}x "
                f"the finest step count, got multiplier {self.ref_multiplier}."
            )
        if self.format not in (FORMAT_CSV, FORMAT_JSON):
            raise ConfigError(f"Configuration error: unknown report format {self.format!r}.")
        if self.cutoff is not None and not self.cutoff > 0:
            raise ConfigError(f"Configuration error: cutoff must be positive, got {self.cutoff}.")
        if self.workers is not None and self.workers < 1:
            raise ConfigError(f"Configuration error: workers must be at least 1, got {self.workers}.")

    @property
    def steps(self) -> list[int]:
        return [self.base_steps * 2**level for level in range(self.levels)]

    @property
    def reference_steps(self) -> int:
        return self.ref_multiplier * self.steps[-1]


@dataclass
class LevelResult:
    """One refinement level of a cell. error is None when the run failed."""

    level: int
    N: int
    tau: float
    error: Optional[float] = None
    rate: Optional[float] = None
    wall_ms: float = 0.0
    newton_avg: Optional[float] = None
    failure: Optional[str] = None


@dataclass
class StudyCell:
    """
    All levels of one (alpha, k) pair.

    Attributes:
        alpha (float): fractional order
        k (int): BDF step count
        corrected (bool): corrected scheme
        expected_rate (float): theoretical order
        noise_floor (float): error level below which rates are not reported
        levels (list[LevelResult]): one entry per level
        tail_rate (Optional[float]): mean of the last two reported rates
    """

    alpha: float
    k: int
    corrected: bool
    expected_rate: float
    noise_floor: float
    levels: list = field(default_factory=list)
    tail_rate: Optional[float] = None

    @property
    def errors(self) -> list[Optional[float]]:
        return [lv.error for lv in self.levels]

    @property
    def rates(self) -> list[Optional[float]]:
        return [lv.rate for lv in self.levels[1:]]

    @property
    def failed(self) -> bool:
        return any(lv.failure is not None for lv in self.levels)


@dataclass
class ConvergenceReport:
    """
    Result of :func:`run_study`.

    Attributes:
        problem (str): problem name
        backend (str): spatial backend
        mesh (int): subdivisions M
        reference (str): "exact-oracle" or "fine-run"
        reference_steps (Optional[int]): N_ref of fine-run references
        cells (list[StudyCell]): in (alpha, k) sweep order
    """

    problem: str
    backend: str
    mesh: int
    reference: str
    reference_steps: Optional[int] = None
    cells: list = field(default_factory=list)

    @property
    def failures(self) -> list[StudyCell]:
        return [cell for cell in self.cells if cell.failed]

    def cell(self, alpha: float, k: int) -> StudyCell:
        for candidate in self.cells:
            if candidate.alpha == alpha and candidate.k == k:
                return candidate
        raise KeyError(f"No cell for alpha={alpha}, k={k}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ConvergenceReport":
        cells = []
        for cell_data in data.get("cells", []):
            cell_data = dict(cell_data)
            levels = [LevelResult(**lv) for lv in cell_data.pop("levels", [])]
            cells.append(StudyCell(levels=levels, **cell_data))
        header = {key: value for key, value in data.items() if key != "cells"}
        return cls(cells=cells, **header)


def _resolve(config: StudyConfig) -> tuple[ProblemSpec, str, str]:
    problem = get_problem(config.problem)
    if config.cutoff is not None:
        problem = problem.with_lipschitz_cutoff(config.cutoff)
    backend = config.backend or problem.default_backend
    dim = backend_dim(backend)
    if dim != problem.dim:
        raise ConfigError(
            f"Configuration error: backend {backend!r} is {dim}D but problem '{problem.name}' is {problem.dim}D."
        )
    reference = config.reference or (REF_EXACT if problem.has_exact else REF_FINE)
    if reference == REF_EXACT and not problem.has_exact:
        raise ConfigError(f"Configuration error: problem '{problem.name}' has no exact oracle; use '{REF_FINE}'.")
    return problem, backend, reference


def _final_state(problem: ProblemSpec, ops: OperatorPair, k: int, N: int, corrected: bool):
    stepper_config = StepperConfig(alpha=problem.alpha, k=k, N=N, T=problem.T, corrected=corrected)
    return run(stepper_config, ops, problem.rhs, problem.initial_nodal(ops))


def _reference(problem: ProblemSpec, ops: OperatorPair, config: StudyConfig, mode: str):
    """Reference solution at T and its noise floor."""
    if mode == REF_EXACT:
        return problem.exact_nodal(ops, problem.T), EXACT_NOISE_FLOOR
    n_ref = config.reference_steps
    logger.info(f"Reference run: alpha={problem.alpha}, k={config.ref_k}, N={n_ref}")
    fine = _final_state(problem, ops, config.ref_k, n_ref, True).final
    half = _final_state(problem, ops, config.ref_k, n_ref // 2, True).final
    floor = reference_noise_floor(fine, half, problem.expected_rate(config.ref_k, True))
    logger.info(f"Reference noise floor for alpha={problem.alpha}: {floor:.3e}")
    return fine, floor


def _run_level(problem: ProblemSpec, ops: OperatorPair, k: int, level: int, N: int, corrected: bool, reference):
    tau = problem.T / N
    start = time.perf_counter()
    try:
        trajectory = _final_state(problem, ops, k, N, corrected)
    except StepFailure as e:
        wall_ms = (time.perf_counter() - start) * 1e3
        logger.error(f"Cell alpha={problem.alpha}, k={k}, N={N} failed: {e}")
        return LevelResult(level=level, N=N, tau=tau, wall_ms=wall_ms, failure=str(e))
    wall_ms = (time.perf_counter() - start) * 1e3
    error = float(np.max(np.abs(trajectory.final - reference), initial=0.0))
    logger.info(f"alpha={problem.alpha}, k={k}, N={N}: error={error:.3e} ({wall_ms:.0f} ms)")
    return LevelResult(
        level=level,
        N=N,
        tau=tau,
        error=error,
        wall_ms=wall_ms,
        newton_avg=trajectory.newton_avg,
    )


def _fit_rates(cell: StudyCell) -> None:
    threshold = NOISE_FLOOR_FACTOR * cell.noise_floor
    for previous, current in zip(cell.levels, cell.levels[1:]):
        if previous.error is None or current.error is None:
            continue
        if previous.error > threshold and current.error > threshold:
            current.rate = observed_order([previous.error, current.error])[0]
        else:
            logger.warning(
                f"alpha={cell.alpha}, k={cell.k}: rate at N={current.N} suppressed "
                f"(error {current.error:.3e} within 100x of noise floor {cell.noise_floor:.3e})"
            )
    cell.tail_rate = tail_rate(cell.rates)


def run_study(config: StudyConfig) -> ConvergenceReport:
    """
    Run a convergence study.

    Cells (alpha, k, level) are independent runs executed on a thread pool
    of ``workers`` threads; results are merged in sweep order so the report
    does not depend on scheduling. A failing step is recorded on its level
    and the remaining cells still run.

    :param config: study parameters
    :return: ConvergenceReport
    """
    problem, backend, reference_mode = _resolve(config)
    workers = config.workers or get_config().workers
    ops = assemble(backend, config.mesh, problem.kappa)
    problems = {alpha: problem.with_alpha(alpha) for alpha in config.alphas}
    logger.info(
        f"Study {problem.name}: backend={backend}, M={config.mesh}, alphas={list(config.alphas)}, "
        f"ks={list(config.ks)}, steps={config.steps}, reference={reference_mode}, workers={workers}"
    )

    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        ref_futures = {
            alpha: pool.submit(_reference, p, ops, config, reference_mode) for alpha, p in problems.items()
        }
        references = {alpha: future.result() for alpha, future in ref_futures.items()}

        level_futures = {}
        for alpha in config.alphas:
            for k in config.ks:
                for level, N in enumerate(config.steps):
                    level_futures[(alpha, k, level)] = pool.submit(
                        _run_level,
                        problems[alpha],
                        ops,
                        k,
                        level,
                        N,
                        config.corrected,
                        references[alpha][0],
                    )

        report = ConvergenceReport(
            problem=problem.name,
            backend=backend,
            mesh=config.mesh,
            reference=reference_mode,
            reference_steps=config.reference_steps if reference_mode == REF_FINE else None,
        )
        for alpha in config.alphas:
            floor = references[alpha][1]
            for k in config.ks:
                cell = StudyCell(
                    alpha=alpha,
                    k=k,
                    corrected=config.corrected,
                    expected_rate=problems[alpha].expected_rate(k, config.corrected),
                    noise_floor=floor,
                    levels=[level_futures[(alpha, k, level)].result() for level in range(config.levels)],
                )
                _fit_rates(cell)
                report.cells.append(cell)

    for cell in report.failures:
        logger.error(f"Cell alpha={cell.alpha}, k={cell.k} has failed levels")
    return report

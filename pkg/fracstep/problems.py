# Copyright The fracstep Authors. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0
"""
Built-in semilinear subdiffusion problems on the unit interval and square.

Problems are addressable by name through :func:`get_problem`:

* ``allen-cahn-2d`` / ``allen-cahn-1d``: f(u) = 4(u - u^3), kappa = 1/10, no exact solution
* ``linear-mode-1d``: f = 0, u0 = sin(m pi x), exact semidiscrete solution
* ``linear-source-1d``: f = c, u0 = sin(m pi x), exact semidiscrete solution

The exact oracles solve the spatially discrete system exactly (they use the
discrete eigenvalues of the chosen 1D backend), so errors measured against
them are pure time discretization errors.
"""
import logging
import math
from dataclasses import dataclass, field, replace
from functools import partial
from typing import Callable, Optional

import numpy as np
import scipy.fft

from .constants import BACKEND_FD1D, BACKEND_FEM1D, BACKEND_FEM2D
from .exceptions import ConfigError, PreconditionError, RangeError, UnsupportedError
from .spatial import OperatorPair, build_mesh, discrete_eigenvalue
from .special import MlParams, linear_mode_solution, mittag_leffler
from .timestepping import SemilinearRhs

__all__ = [
    "ProblemSpec",
    "allen_cahn_2d",
    "allen_cahn_1d",
    "linear_mode_1d",
    "linear_source_1d",
    "get_problem",
    "available_problems",
]

logger = logging.getLogger(__name__)

ALLEN_CAHN_KAPPA = 0.1
DEFAULT_ALPHA = 0.5
_BOUNDARY_TOL = 1e-12

ExactOracle = Callable[[OperatorPair, float], np.ndarray]


@dataclass(frozen=True)
class ProblemSpec:
    """
    One semilinear subdiffusion instance d^alpha u - kappa Laplace u = f(u) on [0, 1]^dim.

    Attributes:
        name (str): registry name
        alpha (float): fractional order in (0, 1)
        kappa (float): diffusion coefficient
        rhs (SemilinearRhs): nonlinearity
        u0 (Callable): initial value, pointwise in x (1D) or (x, y) (2D), vanishing on the boundary
        T (float): final time
        dim (int): 1 or 2
        exact (Optional[ExactOracle]): (operators, t) -> exact nodal solution of the semidiscrete system
        linear (bool): f is affine, so corrected BDF-k converges with order k
    """

    name: str
    alpha: float
    kappa: float
    rhs: SemilinearRhs
    u0: Callable = field(repr=False)
    T: float = 1.0
    dim: int = 1
    exact: Optional[ExactOracle] = field(default=None, repr=False)
    linear: bool = False
    rebuild: Optional[Callable[[float], "ProblemSpec"]] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise RangeError(f"Problem alpha must lie in (0, 1), got {self.alpha!r}")
        if not self.kappa > 0:
            raise RangeError(f"Problem kappa must be positive, got {self.kappa!r}")
        if not self.T > 0:
            raise RangeError(f"Problem final time must be positive, got {self.T!r}")
        boundary = build_mesh(self.dim, 8).sample_boundary(self.u0)
        if np.max(np.abs(boundary)) > _BOUNDARY_TOL:
            raise PreconditionError(f"Initial value of problem '{self.name}' does not vanish on the boundary")

    @property
    def has_exact(self) -> bool:
        return self.exact is not None

    @property
    def default_backend(self) -> str:
        return BACKEND_FEM2D if self.dim == 2 else BACKEND_FD1D

    def with_alpha(self, alpha: float) -> "ProblemSpec":
        """The same problem with another fractional order."""
        if self.rebuild is not None:
            return self.rebuild(alpha)
        return replace(self, alpha=float(alpha))

    def with_lipschitz_cutoff(self, bound: float) -> "ProblemSpec":
        """
        The same problem with f replaced by its globally Lipschitz cutoff at ``bound``.

        Solutions that stay in [-bound, bound] are unchanged, so an exact
        oracle is kept. The cutoff survives :meth:`with_alpha`.
        """
        rhs = self.rhs.with_lipschitz_cutoff(bound)
        rebuild = self.rebuild

        def rebuild_with_cutoff(alpha: float) -> "ProblemSpec":
            base = rebuild(alpha) if rebuild is not None else replace(self, alpha=float(alpha), rebuild=None)
            return base.with_lipschitz_cutoff(bound)

        return replace(self, rhs=rhs, rebuild=rebuild_with_cutoff)

    def initial_nodal(self, ops: OperatorPair) -> np.ndarray:
        """Nodal interpolant of u0 on the interior nodes."""
        if ops.mesh.dim != self.dim:
            raise PreconditionError(f"Problem '{self.name}' is {self.dim}D, operators are {ops.mesh.dim}D")
        return ops.mesh.sample(self.u0)

    def exact_nodal(self, ops: OperatorPair, t: float) -> np.ndarray:
        if self.exact is None:
            raise UnsupportedError(f"Problem '{self.name}' has no exact solution")
        return self.exact(ops, t)

    def expected_rate(self, k: int, corrected: bool) -> float:
        """
        Asymptotic temporal order of (un)corrected BDF-k on this problem.

        Corrected: k for affine f, min(k, 1 + 2 alpha) otherwise. Uncorrected: min(k, 1).
        """
        if not corrected:
            return float(min(k, 1))
        if self.linear:
            return float(k)
        return min(float(k), 1.0 + 2.0 * self.alpha)


def _allen_cahn_u0_2d(x, y):
    return 4.0 * x * (1.0 - x) * y * (1.0 - y)


def _allen_cahn_u0_1d(x):
    # the 2D initial data on the midline y = 1/2
    return x * (1.0 - x)


def _sine_mode(m: int, x):
    return np.sin(m * math.pi * np.asarray(x, dtype=float))


def _check_1d_backend(ops: OperatorPair) -> None:
    if ops.backend not in (BACKEND_FD1D, BACKEND_FEM1D):
        raise UnsupportedError(f"Exact solutions need a 1D backend, got {ops.backend!r}")


def allen_cahn_2d(alpha: float = DEFAULT_ALPHA) -> ProblemSpec:
    """Allen-Cahn on the unit square: f(u) = 4(u - u^3), u0 = 4x(1-x)y(1-y), kappa = 1/10, T = 1."""
    return ProblemSpec(
        name="allen-cahn-2d",
        alpha=alpha,
        kappa=ALLEN_CAHN_KAPPA,
        rhs=SemilinearRhs.allen_cahn(4.0),
        u0=_allen_cahn_u0_2d,
        T=1.0,
        dim=2,
    )


def allen_cahn_1d(alpha: float = DEFAULT_ALPHA) -> ProblemSpec:
    """One-dimensional analogue of :func:`allen_cahn_2d` with u0 = x(1-x), the 2D data at y = 1/2."""
    return ProblemSpec(
        name="allen-cahn-1d",
        alpha=alpha,
        kappa=ALLEN_CAHN_KAPPA,
        rhs=SemilinearRhs.allen_cahn(4.0),
        u0=_allen_cahn_u0_1d,
        T=1.0,
        dim=1,
    )


def linear_mode_1d(alpha: float = DEFAULT_ALPHA, m: int = 1) -> ProblemSpec:
    """
    Single sine mode without source: f = 0, kappa = 1, u0 = sin(m pi x).

    The exact solution E_{alpha,1}(-lam_h t^alpha) sin(m pi x) uses the
    discrete eigenvalue lam_h of the operators it is evaluated on.
    """
    if isinstance(m, bool) or int(m) != m or m < 1:
        raise RangeError(f"Mode number m must be a positive integer, got {m!r}")

    def exact(ops: OperatorPair, t: float) -> np.ndarray:
        _check_1d_backend(ops)
        lam = discrete_eigenvalue(ops.backend, ops.mesh, ops.kappa, m)
        amplitude = linear_mode_solution(alpha, lam, t)
        return amplitude * _sine_mode(m, ops.mesh.interior_nodes[:, 0])

    return ProblemSpec(
        name="linear-mode-1d",
        alpha=alpha,
        kappa=1.0,
        rhs=SemilinearRhs.zero(),
        u0=partial(_sine_mode, m),
        T=1.0,
        dim=1,
        exact=exact,
        linear=True,
        rebuild=partial(linear_mode_1d, m=m),
    )


def linear_source_1d(alpha: float = DEFAULT_ALPHA, c: float = 1.0, m: int = 1) -> ProblemSpec:
    """
    Sine mode driven by a constant source: f = c, kappa = 1, u0 = sin(m pi x).

    Expanding the source in the discrete sine modes v_j gives the exact
    semidiscrete solution
        b_j(t) = b_j(0) E_{a,1}(-lam_j t^a) + c d_j t^a E_{a,1+a}(-lam_j t^a).
    Every mode must satisfy lam_j T^a <= 1e4, which bounds the mesh size
    (M <= 48 for fd1d and M <= 28 for fem1d at T = 1).
    """
    if isinstance(m, bool) or int(m) != m or m < 1:
        raise RangeError(f"Mode number m must be a positive integer, got {m!r}")
    c = float(c)

    def exact(ops: OperatorPair, t: float) -> np.ndarray:
        _check_1d_backend(ops)
        mesh = ops.mesh
        if m > mesh.M - 1:
            raise RangeError(f"Mode m={m} is not resolved on a mesh with M={mesh.M}")
        n = mesh.n_interior
        # DST-I: ones = sum_j d_j sin(j pi x_i)
        source = c * scipy.fft.dst(np.ones(n), type=1) / mesh.M
        amplitudes = np.zeros(n)
        t_alpha = t**alpha
        for j in range(1, n + 1):
            lam = discrete_eigenvalue(ops.backend, mesh, ops.kappa, j)
            x = -lam * t_alpha
            value = source[j - 1] * t_alpha * mittag_leffler(MlParams(alpha, 1.0 + alpha), x)
            if j == m:
                value += mittag_leffler(MlParams(alpha, 1.0), x)
            amplitudes[j - 1] = value
        return scipy.fft.dst(amplitudes, type=1) / 2.0

    return ProblemSpec(
        name="linear-source-1d",
        alpha=alpha,
        kappa=1.0,
        rhs=SemilinearRhs.constant(c),
        u0=partial(_sine_mode, m),
        T=1.0,
        dim=1,
        exact=exact,
        linear=True,
        rebuild=partial(linear_source_1d, c=c, m=m),
    )


_PROBLEMS: dict[str, Callable[..., ProblemSpec]] = {
    "allen-cahn-2d": allen_cahn_2d,
    "allen-cahn-1d": allen_cahn_1d,
    "linear-mode-1d": linear_mode_1d,
    "linear-source-1d": linear_source_1d,
}


def available_problems() -> list[str]:
    """Names accepted by :func:`get_problem`."""
    return list(_PROBLEMS)


def get_problem(name: str, alpha: Optional[float] = None) -> ProblemSpec:
    """
    Look up a built-in problem by name.

    :param name: one of :func:`available_problems`
    :param alpha: fractional order; the problem default when omitted
    :return: ProblemSpec
    :raises ConfigError: unknown name
    """
    try:
        factory = _PROBLEMS[name]
    except KeyError:
        raise ConfigError(
            f"Configuration error: unknown problem {name!r}; choose one of {available_problems()}."
        ) from None
    problem = factory() if alpha is None else factory(alpha=alpha)
    logger.debug(f"Resolved problem {problem.name} with alpha={problem.alpha}")
    return problem

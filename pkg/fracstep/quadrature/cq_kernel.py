# Copyright The fracstep Authors. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0
"""
Convolution quadrature weights generated by the k-step BDF method.

The generating function of BDF-k is

    delta(xi) = sum_{i=1}^{k} (1/i) (1 - xi)^i = sum_{j=0}^{k} c_j xi^j

and the weights of the fractional derivative of order alpha are the power
series coefficients of delta(xi)^alpha. The tau^{-alpha} scaling is left to
the caller.
"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
import scipy.fft

from ..constants import MAX_BDF_ORDER, MIN_BDF_ORDER
from ..exceptions import RangeError

__all__ = [
    "BdfDelta",
    "CqWeights",
    "CorrectionSet",
    "bdf_delta_coeffs",
    "cq_weights",
    "cq_weights_fft",
    "correction_coeffs",
]

logger = logging.getLogger(__name__)

# Starting-step coefficients a_n^{(k)}, n = 1..k-1
_CORRECTION_TABLE: dict[int, tuple[Fraction, ...]] = {
    1: (),
    2: (Fraction(1, 2),),
    3: (Fraction(11, 12), Fraction(-5, 12)),
    4: (Fraction(31, 24), Fraction(-7, 6), Fraction(3, 8)),
    5: (
        Fraction(1181, 720),
        Fraction(-177, 80),
        Fraction(341, 240),
        Fraction(-251, 720),
    ),
    6: (
        Fraction(2837, 1440),
        Fraction(-2543, 720),
        Fraction(17, 5),
        Fraction(-1201, 720),
        Fraction(95, 288),
    ),
}

# FFT sampling: largest tolerated round-off amplification rho^{-n_max}
_FFT_MAX_AMPLIFICATION = 1.0e3
_FFT_MIN_RADIUS = 0.5
_FFT_MIN_POINTS = 128


def _read_only(values) -> np.ndarray:
    array = np.array(values, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class BdfDelta:
    """
    Coefficients c_0..c_k of tau * delta_tau(xi) expanded in powers of xi.

    Attributes:
        k (int): step count of the BDF method, 1..6
        coeffs (tuple[float, ...]): c_0..c_k, exact to floating precision
        exact (tuple[Fraction, ...]): the same coefficients as rationals
    """

    k: int
    coeffs: tuple[float, ...]
    exact: tuple[Fraction, ...] = field(repr=False, default=())

    def __call__(self, xi):
        """Evaluate tau * delta_tau at xi (scalar or array, real or complex)."""
        xi = np.asarray(xi)
        return np.polynomial.polynomial.polyval(xi, self.coeffs)


@dataclass(frozen=True, eq=False)
class CqWeights:
    """
    Dimensionless convolution quadrature weights omega_0..omega_N.

    Attributes:
        k (int): BDF step count
        alpha (float): fractional order in (0, 1]
        weights (np.ndarray): read-only array of omega_0..omega_N
    """

    k: int
    alpha: float
    weights: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.weights)

    def __getitem__(self, item):
        return self.weights[item]

    @property
    def n_max(self) -> int:
        return len(self.weights) - 1

    def partial_sums(self) -> np.ndarray:
        return np.cumsum(self.weights)


@dataclass(frozen=True)
class CorrectionSet:
    """
    Starting-step correction coefficients a_1..a_{k-1} of the corrected BDF-k scheme.

    Attributes:
        k (int): BDF step count
        coeffs (tuple[float, ...]): a_1..a_{k-1}; empty for k = 1
        exact (tuple[Fraction, ...]): the same values as rationals
    """

    k: int
    coeffs: tuple[float, ...]
    exact: tuple[Fraction, ...] = field(repr=False, default=())

    def __len__(self) -> int:
        return len(self.coeffs)

    def at_step(self, n: int) -> float:
        """Coefficient a_n for step n, zero once n >= k."""
        if 1 <= n <= len(self.coeffs):
            return self.coeffs[n - 1]
        return 0.0


def _check_order(k: int) -> None:
    if isinstance(k, bool) or int(k) != k or not MIN_BDF_ORDER <= k <= MAX_BDF_ORDER:
        raise RangeError(
            f"BDF step count k must be an integer in [{MIN_BDF_ORDER}, {MAX_BDF_ORDER}], got {k!r}"
        )


def _check_weight_args(k: int, alpha: float, n_max: int) -> None:
    _check_order(k)
    if not 0.0 < alpha <= 1.0:
        raise RangeError(f"Fractional order alpha must lie in (0, 1], got {alpha!r}")
    if isinstance(n_max, bool) or int(n_max) != n_max or n_max < 0:
        raise RangeError(f"n_max must be a non-negative integer, got {n_max!r}")


@lru_cache(maxsize=None)
def bdf_delta_coeffs(k: int) -> BdfDelta:
    """
    Expand sum_{i=1}^{k} (1/i) (1 - xi)^i in powers of xi.

    :param k: BDF step count, 1..6
    :return: BdfDelta with k+1 coefficients, built from exact rational arithmetic

    >>> bdf_delta_coeffs(2).coeffs
    (1.5, -2.0, 0.5)
    """
    _check_order(k)
    exact = [Fraction(0)] * (k + 1)
    for i in range(1, k + 1):
        for j in range(i + 1):
            exact[j] += Fraction((-1) ** j * math.comb(i, j), i)
    return BdfDelta(k=k, coeffs=tuple(float(c) for c in exact), exact=tuple(exact))


def cq_weights(k: int, alpha: float, n_max: int) -> CqWeights:
    """
    Power series coefficients of delta(xi)^alpha by the Miller recurrence.

    omega_0 = c_0^alpha and, for n >= 1,
    omega_n = 1/(n c_0) * sum_{j=1}^{min(n,k)} ((alpha+1) j - n) c_j omega_{n-j}.

    :param k: BDF step count, 1..6
    :param alpha: fractional order in (0, 1]
    :param n_max: index of the last weight
    :return: CqWeights holding omega_0..omega_{n_max}
    """
    _check_weight_args(k, alpha, n_max)
    c = np.array(bdf_delta_coeffs(k).coeffs)
    c0 = c[0]
    omega = np.zeros(n_max + 1)
    omega[0] = c0**alpha
    j_all = np.arange(1, k + 1)
    for n in range(1, n_max + 1):
        m = min(n, k)
        j = j_all[:m]
        omega[n] = np.dot(((alpha + 1.0) * j - n) * c[1 : m + 1], omega[n - j]) / (n * c0)
    return CqWeights(k=k, alpha=float(alpha), weights=_read_only(omega))


def cq_weights_fft(k: int, alpha: float, n_max: int) -> CqWeights:
    """
    Power series coefficients of delta(xi)^alpha by sampling on a circle.

    delta(xi)^alpha is sampled at L equispaced points of |xi| = rho and the
    coefficients are recovered with a discrete Fourier transform. The radius
    keeps the round-off amplification rho^{-n_max} below 1e3; L is large
    enough that aliasing (of size rho^L) is negligible. Used as an
    independent check of cq_weights.

    :param k: BDF step count, 1..6
    :param alpha: fractional order in (0, 1]
    :param n_max: index of the last weight
    :return: CqWeights holding omega_0..omega_{n_max}
    """
    _check_weight_args(k, alpha, n_max)
    delta = bdf_delta_coeffs(k)
    rho = _FFT_MIN_RADIUS
    if n_max > 0:
        rho = max(_FFT_MIN_RADIUS, _FFT_MAX_AMPLIFICATION ** (-1.0 / n_max))
    n_points = 1 << math.ceil(math.log2(max(_FFT_MIN_POINTS, 8 * (n_max + 1))))
    logger.debug(f"cq_weights_fft: k={k}, alpha={alpha}, rho={rho:.6f}, L={n_points}")

    xi = rho * np.exp(2j * np.pi * np.arange(n_points) / n_points)
    samples = delta(xi) ** alpha
    coeffs = scipy.fft.fft(samples)[: n_max + 1] / n_points
    omega = coeffs.real * rho ** (-np.arange(n_max + 1, dtype=float))
    return CqWeights(k=k, alpha=float(alpha), weights=_read_only(omega))


def correction_coeffs(k: int) -> CorrectionSet:
    """
    Starting-step correction coefficients a_n^{(k)}, n = 1..k-1.

    :param k: BDF step count, 1..6
    :return: CorrectionSet; empty for k = 1

    >>> correction_coeffs(2).coeffs
    (0.5,)
    """
    _check_order(k)
    exact = _CORRECTION_TABLE[k]
    return CorrectionSet(k=k, coeffs=tuple(float(a) for a in exact), exact=exact)

# Copyright The fracstep Authors. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0
"""
Two-parameter Mittag-Leffler function on the real axis.

    E_{a,b}(x) = sum_{k>=0} x^k / Gamma(a k + b)

Evaluated for x in [-1e4, 1], which covers every exact solution
E_{a,1}(-lam t^a) of the linear test problems. Routes:

* a = b = 1: exp(x); a = 2 with b in {1, 2} and x < 0: cos/sin closed forms
* -s_lim <= x <= 1: Taylor series, summed in double precision
* a < 1, x < -s_lim: real-line integral representation (scipy.integrate.quad)
* 1 <= a <= 2, x < -s_lim: Taylor series in extended precision (mpmath)
"""
import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath as mp
import numpy as np
from scipy import integrate, special

from ..config import get_config
from ..exceptions import RangeError

__all__ = [
    "MlParams",
    "mittag_leffler",
    "linear_mode_solution",
]

logger = logging.getLogger(__name__)

X_MAX = 1.0e4
X_SMALL = 1.0
MAX_ALPHA = 2.0
MAX_BETA = 5.0

# The alternating series keeps its cancellation below ~1e-13 while |x|^{1/a} <= 6
_SERIES_CANCELLATION_BASE = 6.0
_SERIES_BLOCK = 128
_SERIES_MAX_TERMS = 1 << 20
_QUAD_OPTIONS = dict(epsabs=1e-14, epsrel=1e-12, limit=200)
# log of u^{1/a} beyond which exp(-u^{1/a}) is below 1e-280
_EXP_ARG_MAX = math.log(645.0)


@dataclass(frozen=True)
class MlParams:
    """
    Parameters (alpha, beta) of E_{alpha,beta}.

    Attributes:
        alpha (float): in (0, 2]
        beta (float): in (0, 5]
    """

    alpha: float
    beta: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.alpha <= MAX_ALPHA:
            raise RangeError(f"Mittag-Leffler alpha must lie in (0, 2], got {self.alpha!r}")
        if not 0.0 < self.beta <= MAX_BETA:
            raise RangeError(f"Mittag-Leffler beta must lie in (0, 5], got {self.beta!r}")


def mittag_leffler(params: MlParams, x: float) -> float:
    """
    Evaluate E_{alpha,beta}(x) for real x in [-1e4, 1] to about 1e-12 absolute accuracy.

    :param params: the pair (alpha, beta)
    :param x: argument
    :return: E_{alpha,beta}(x)

    >>> mittag_leffler(MlParams(1.0, 1.0), -1.0)
    0.36787944117144233
    """
    x = float(x)
    if not -X_MAX <= x <= X_SMALL:
        raise RangeError(f"Mittag-Leffler argument must lie in [-1e4, 1], got {x!r}")
    series_limit = min(
        get_config().ml_series_limit, _SERIES_CANCELLATION_BASE**params.alpha
    )
    return _evaluate(float(params.alpha), float(params.beta), x, series_limit)


@lru_cache(maxsize=8192)
def _evaluate(alpha: float, beta: float, x: float, series_limit: float) -> float:
    if x == 0.0:
        return float(special.rgamma(beta))
    if alpha == 1.0 and beta == 1.0:
        return math.exp(x)
    if alpha == 2.0 and x < 0.0 and beta in (1.0, 2.0):
        z = math.sqrt(-x)
        return math.cos(z) if beta == 1.0 else math.sin(z) / z
    if x >= -series_limit:
        return _series(alpha, beta, x)
    if alpha < 1.0:
        return _integral(alpha, beta, -x)
    return _series_mp(alpha, beta, x)


def _series(alpha: float, beta: float, x: float) -> float:
    """Taylor series in double precision, summed with math.fsum in blocks."""
    log_abs_x = math.log(abs(x))
    sign = -1.0 if x < 0 else 1.0
    terms: list[float] = []
    start = 0
    while start < _SERIES_MAX_TERMS:
        k = np.arange(start, start + _SERIES_BLOCK)
        block = np.exp(k * log_abs_x - special.gammaln(alpha * k + beta))
        if sign < 0:
            block[k % 2 == 1] *= -1.0
        terms.extend(block.tolist())
        partial = math.fsum(terms)
        # terms decay monotonically once a k + b exceeds the peak of the series
        if abs(block[-1]) < 1e-16 * max(abs(partial), 1e-300) or block[-1] == 0.0:
            return partial
        start += _SERIES_BLOCK
    raise RangeError(
        f"Mittag-Leffler series did not converge for alpha={alpha}, beta={beta}, x={x}"
    )


def _integral(alpha: float, beta: float, s: float) -> float:
    """
    E_{a,b}(-s) for 0 < a < 1 and s > 0 from its real-line integral representation.

    The representation needs b < 1 + a; larger b are lowered with
    E_{a,b}(z) = (E_{a,b-a}(z) - 1/Gamma(b-a)) / z.
    """
    if beta >= 1.0 + alpha:
        lower = _integral(alpha, beta - alpha, s)
        return (lower - float(special.rgamma(beta - alpha))) / (-s)

    power = (1.0 - beta) / alpha
    sin_b = math.sin(math.pi * beta)
    sin_ba = math.sin(math.pi * (beta - alpha))
    cos_a = math.cos(math.pi * alpha)

    def kernel(u):
        if u > 0.0 and math.log(u) / alpha > _EXP_ARG_MAX:
            return 0.0
        return (
            math.exp(-(u ** (1.0 / alpha)))
            * (u * sin_b + s * sin_ba)
            / (u * u + 2.0 * s * u * cos_a + s * s)
        )

    def weighted(u):
        value = kernel(u)
        return u**power * value if value else 0.0

    head = min(1.0, 0.25 * s)
    cut = max(2.0, 60.0**alpha)
    value, _ = integrate.quad(
        kernel, 0.0, head, weight="alg", wvar=(power, 0.0), **_QUAD_OPTIONS
    )
    points = [p for p in (s, -s * cos_a) if head < p < cut]
    body, _ = integrate.quad(weighted, head, cut, points=points or None, **_QUAD_OPTIONS)
    tail, _ = integrate.quad(weighted, cut, np.inf, **_QUAD_OPTIONS)
    return (value + body + tail) / (math.pi * alpha)


def _series_mp(alpha: float, beta: float, x: float) -> float:
    """Taylor series at a working precision that absorbs the cancellation."""
    if alpha == 1.0:
        # E_{1,b}(x) = 1F1(1; b; x) / Gamma(b); mpmath raises precision internally
        with mp.workdps(30):
            return float(mp.hyp1f1(1, beta, x) * mp.rgamma(beta))
    dps = int(abs(x) ** (1.0 / alpha) / math.log(10.0)) + 30
    logger.debug(f"Mittag-Leffler mpmath series: alpha={alpha}, beta={beta}, x={x}, dps={dps}")
    with mp.workdps(dps):
        z = mp.mpf(x)
        a = mp.mpf(alpha)
        b = mp.mpf(beta)
        total = mp.mpf(0)
        peak = abs(x) ** (1.0 / alpha)
        k = 0
        while True:
            term = z**k * mp.rgamma(a * k + b)
            total += term
            if k > peak and abs(term) < mp.mpf(10) ** -25:
                break
            k += 1
        return float(total)


def linear_mode_solution(alpha: float, lam: float, t: float) -> float:
    """
    Exact amplitude E_{alpha,1}(-lam t^alpha) of d^alpha y/dt^alpha = -lam y, y(0) = 1.

    :param alpha: fractional order in (0, 1]
    :param lam: decay rate, lam >= 0
    :param t: time, t >= 0
    :return: y(t)
    """
    if not 0.0 < alpha <= 1.0:
        raise RangeError(f"Fractional order alpha must lie in (0, 1], got {alpha!r}")
    if lam < 0.0 or t < 0.0:
        raise RangeError(f"linear_mode_solution needs lam >= 0 and t >= 0, got lam={lam}, t={t}")
    if lam == 0.0 or t == 0.0:
        return 1.0
    return mittag_leffler(MlParams(alpha, 1.0), -lam * t**alpha)

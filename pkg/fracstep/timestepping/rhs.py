# Copyright The fracstep Authors. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0
import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..exceptions import RangeError

__all__ = ["SemilinearRhs"]

logger = logging.getLogger(__name__)

ScalarField = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SemilinearRhs:
    """
    Nonlinearity f of the semilinear equation together with its exact derivative.

    Both callables act elementwise on nodal vectors.

    Attributes:
        f (ScalarField): the nonlinearity
        f_prime (ScalarField): its derivative
        name (str): label used in logs
        constant_derivative (Optional[float]): set when f is affine, f' then equals this value
            everywhere and Newton Jacobians do not depend on the iterate
    """

    f: ScalarField
    f_prime: ScalarField
    name: str = "custom"
    constant_derivative: Optional[float] = None

    def __call__(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return np.array(np.broadcast_to(self.f(u), u.shape), dtype=float)

    def derivative(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return np.array(np.broadcast_to(self.f_prime(u), u.shape), dtype=float)

    @property
    def is_affine(self) -> bool:
        return self.constant_derivative is not None

    @classmethod
    def zero(cls) -> "SemilinearRhs":
        """f = 0."""
        return cls(f=np.zeros_like, f_prime=np.zeros_like, name="zero", constant_derivative=0.0)

    @classmethod
    def constant(cls, c: float) -> "SemilinearRhs":
        """Time-independent source f = c."""
        c = float(c)
        return cls(
            f=lambda u: np.full_like(u, c),
            f_prime=np.zeros_like,
            name=f"constant({c:g})",
            constant_derivative=0.0,
        )

    @classmethod
    def affine(cls, slope: float, offset: float = 0.0) -> "SemilinearRhs":
        """f(u) = slope * u + offset."""
        slope, offset = float(slope), float(offset)
        return cls(
            f=lambda u: slope * u + offset,
            f_prime=lambda u: np.full_like(u, slope),
            name=f"affine({slope:g}, {offset:g})",
            constant_derivative=slope,
        )

    @classmethod
    def allen_cahn(cls, scale: float = 4.0) -> "SemilinearRhs":
        """f(u) = scale * (u - u^3)."""
        scale = float(scale)
        return cls(
            f=lambda u: scale * (u - u**3),
            f_prime=lambda u: scale * (1.0 - 3.0 * u**2),
            name=f"allen-cahn({scale:g})",
        )

    def with_lipschitz_cutoff(self, bound: float) -> "SemilinearRhs":
        """
        Globally Lipschitz version of f.

        Equal to f on [-bound, bound] and continued by its tangent lines
        outside, so the result is C^1 with a bounded derivative.

        :param bound: cutoff level, positive
        :return: the modified SemilinearRhs
        """
        if not bound > 0:
            raise RangeError(f"Cutoff bound must be positive, got {bound!r}")
        bound = float(bound)
        edges = np.array([-bound, bound])
        f_edge = self(edges)
        fp_edge = self.derivative(edges)
        base_f, base_fp = self.f, self.f_prime

        def f(u):
            u = np.asarray(u, dtype=float)
            clipped = np.clip(u, -bound, bound)
            value = np.array(np.broadcast_to(base_f(clipped), u.shape), dtype=float)
            low, high = u < -bound, u > bound
            value[low] = f_edge[0] + fp_edge[0] * (u[low] + bound)
            value[high] = f_edge[1] + fp_edge[1] * (u[high] - bound)
            return value

        def f_prime(u):
            u = np.asarray(u, dtype=float)
            clipped = np.clip(u, -bound, bound)
            value = np.array(np.broadcast_to(base_fp(clipped), u.shape), dtype=float)
            value[u < -bound] = fp_edge[0]
            value[u > bound] = fp_edge[1]
            return value

        return SemilinearRhs(
            f=f,
            f_prime=f_prime,
            name=f"{self.name}|cutoff({bound:g})",
            constant_derivative=self.constant_derivative,
        )

    def check_derivative(self, samples=None, eps: float = 1e-6) -> float:
        """
        Largest deviation between f_prime and a central difference of f.

        :param samples: points to check, defaults to 41 points of [-2, 2]
        :param eps: difference step
        :return: max |(f(s+eps) - f(s-eps)) / (2 eps) - f'(s)|
        """
        s = np.linspace(-2.0, 2.0, 41) if samples is None else np.asarray(samples, dtype=float)
        central = (self(s + eps) - self(s - eps)) / (2.0 * eps)
        deviation = float(np.max(np.abs(central - self.derivative(s))))
        logger.debug(f"{self.name}: derivative check deviation {deviation:.3e}")
        return deviation

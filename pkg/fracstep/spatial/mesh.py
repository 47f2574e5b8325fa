# Copyright The fracstep Authors. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0
"""
Uniform grids of the unit interval and the unit square.

Nodes are addressed by integer grid indices (i,) in 1D and (i, j) in 2D with
coordinates (i h, j h), h = 1/M. Only interior nodes carry unknowns: the
homogeneous Dirichlet boundary is eliminated. Interior rows are numbered
with i running fastest.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from ..exceptions import RangeError

__all__ = ["Mesh", "build_mesh"]

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Mesh:
    """
    Uniform mesh of [0, 1]^dim with M subdivisions per direction.

    Attributes:
        dim (int): 1 or 2
        M (int): number of subintervals per direction
        h (float): mesh width 1/M
        interior_nodes (np.ndarray): (n, dim) coordinates of the interior nodes, in row order
        node_index (Mapping[tuple, int]): grid index of an interior node -> row
    """

    dim: int
    M: int
    h: float
    interior_nodes: np.ndarray = field(repr=False)
    node_index: Mapping[tuple, int] = field(repr=False)

    @property
    def n_interior(self) -> int:
        return len(self.interior_nodes)

    @property
    def n_nodes(self) -> int:
        """Number of nodes including the boundary."""
        return (self.M + 1) ** self.dim

    def global_id(self, *grid_index: int) -> int:
        """Position of a node in the full (boundary included) numbering."""
        if self.dim == 1:
            return grid_index[0]
        i, j = grid_index
        return j * (self.M + 1) + i

    def interior_global_ids(self) -> np.ndarray:
        """Full-numbering ids of the interior nodes, in row order."""
        inner = np.arange(1, self.M)
        if self.dim == 1:
            return inner
        i, j = np.meshgrid(inner, inner, indexing="xy")
        return (j * (self.M + 1) + i).ravel()

    def all_nodes(self) -> np.ndarray:
        """(n_nodes, dim) coordinates of every node in the full numbering."""
        ticks = np.arange(self.M + 1) * self.h
        if self.dim == 1:
            return ticks[:, None]
        x, y = np.meshgrid(ticks, ticks, indexing="xy")
        return np.column_stack([x.ravel(), y.ravel()])

    def boundary_nodes(self) -> np.ndarray:
        """Coordinates of the boundary nodes."""
        mask = np.ones(self.n_nodes, dtype=bool)
        mask[self.interior_global_ids()] = False
        return self.all_nodes()[mask]

    def elements(self) -> np.ndarray:
        """
        Element connectivity in the full numbering.

        1D: (M, 2) array of intervals. 2D: (2 M^2, 3) array of right triangles;
        each cell [i, i+1] x [j, j+1] is split along its (i, j)-(i+1, j+1) diagonal.
        """
        if self.dim == 1:
            left = np.arange(self.M)
            return np.column_stack([left, left + 1])
        i, j = np.meshgrid(np.arange(self.M), np.arange(self.M), indexing="xy")
        i, j = i.ravel(), j.ravel()
        stride = self.M + 1
        sw = j * stride + i
        se = sw + 1
        ne = se + stride
        nw = sw + stride
        lower = np.column_stack([sw, se, ne])
        upper = np.column_stack([sw, ne, nw])
        return np.concatenate([lower, upper])

    def sample(self, func: Callable) -> np.ndarray:
        """Evaluate a pointwise function at the interior nodes (vectorized over coordinates)."""
        coords = self.interior_nodes
        if self.dim == 1:
            values = func(coords[:, 0])
        else:
            values = func(coords[:, 0], coords[:, 1])
        return np.broadcast_to(np.asarray(values, dtype=float), (self.n_interior,)).copy()

    def sample_boundary(self, func: Callable) -> np.ndarray:
        coords = self.boundary_nodes()
        if self.dim == 1:
            return np.asarray(func(coords[:, 0]), dtype=float)
        return np.asarray(func(coords[:, 0], coords[:, 1]), dtype=float)


def build_mesh(dim: int, M: int) -> Mesh:
    """
    Build the uniform mesh of the unit interval (dim=1) or unit square (dim=2).

    :param dim: 1 or 2
    :param M: subintervals per direction, at least 2
    :return: the Mesh

    >>> build_mesh(1, 4).interior_nodes[:, 0]
    array([0.25, 0.5 , 0.75])
    """
    if dim not in (1, 2):
        raise RangeError(f"Mesh dimension must be 1 or 2, got {dim!r}")
    if isinstance(M, bool) or int(M) != M or M < 2:
        raise RangeError(f"Mesh subdivisions M must be an integer >= 2, got {M!r}")
    M = int(M)
    h = 1.0 / M
    inner = np.arange(1, M)
    if dim == 1:
        interior = (inner * h)[:, None]
        index = {(int(i),): row for row, i in enumerate(inner)}
    else:
        i, j = np.meshgrid(inner, inner, indexing="xy")
        i, j = i.ravel(), j.ravel()
        interior = np.column_stack([i * h, j * h])
        index = {(int(a), int(b)): row for row, (a, b) in enumerate(zip(i, j))}
    logger.debug(f"Built {dim}D mesh with M={M}, {len(interior)} interior nodes")
    return Mesh(dim=dim, M=M, h=h, interior_nodes=interior, node_index=index)

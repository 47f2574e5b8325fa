# Copyright The fracstep Authors. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0
"""
Assembly of the mass and stiffness matrices of the Dirichlet Laplacian.

Two backends: conforming P1 finite elements on the meshes of
:mod:`fracstep.spatial.mesh` (1D and 2D), and the three-point finite
difference Laplacian on the 1D grid. Boundary rows and columns are
eliminated after assembly.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sps

from ..constants import BACKEND_FD1D, BACKEND_FEM1D, BACKEND_FEM2D, BACKENDS
from ..exceptions import ConfigError, RangeError, UnsupportedError
from .linalg import SparseSpd
from .mesh import Mesh, build_mesh

__all__ = [
    "OperatorPair",
    "assemble_fem",
    "assemble_fd",
    "assemble",
    "discrete_eigenvalue",
    "backend_dim",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class OperatorPair:
    """
    Discrete Dirichlet Laplacian on the interior nodes of a mesh.

    The semidiscrete equation reads mass * d^alpha u + stiffness * u = mass * f(u).

    Attributes:
        mesh (Mesh): the mesh the operators live on
        mass (SparseSpd): consistent P1 mass matrix, or the identity for finite differences
        stiffness (SparseSpd): kappa times the Laplacian stiffness matrix
        kappa (float): diffusion coefficient
        backend (str): "fd1d", "fem1d" or "fem2d"
    """

    mesh: Mesh
    mass: SparseSpd
    stiffness: SparseSpd
    kappa: float
    backend: str

    @property
    def n(self) -> int:
        return self.mass.n

    @property
    def mass_is_diagonal(self) -> bool:
        return self.mass.is_diagonal()


def _check_kappa(kappa: float) -> None:
    if not kappa > 0:
        raise RangeError(f"Diffusion coefficient kappa must be positive, got {kappa!r}")


def _restrict(matrix: sps.coo_matrix, interior: np.ndarray) -> sps.csr_matrix:
    """Drop boundary rows and columns, then symmetrize the result exactly."""
    full = matrix.tocsr()
    inner = full[interior][:, interior]
    return ((inner + inner.T) * 0.5).tocsr()


def _local_matrices_1d(mesh: Mesh, kappa: float) -> tuple[np.ndarray, np.ndarray]:
    h = mesh.h
    stiff = (kappa / h) * np.array([[1.0, -1.0], [-1.0, 1.0]])
    mass = (h / 6.0) * np.array([[2.0, 1.0], [1.0, 2.0]])
    n_el = mesh.M
    return np.broadcast_to(stiff, (n_el, 2, 2)), np.broadcast_to(mass, (n_el, 2, 2))


def _local_matrices_2d(mesh: Mesh, elements: np.ndarray, kappa: float) -> tuple[np.ndarray, np.ndarray]:
    coords = mesh.all_nodes()[elements]  # (n_el, 3, 2)
    ones = np.ones(coords.shape[:2] + (1,))
    vandermonde = np.concatenate([ones, coords], axis=2)  # rows [1, x, y]
    area = 0.5 * np.abs(np.linalg.det(vandermonde))
    # columns of inv(V) are the barycentric coordinates; rows 1: are their gradients
    grads = np.linalg.inv(vandermonde)[:, 1:, :]  # (n_el, 2, 3)
    stiff = kappa * area[:, None, None] * np.einsum("eki,ekj->eij", grads, grads)
    mass = (area / 12.0)[:, None, None] * (np.ones((3, 3)) + np.eye(3))
    return stiff, mass


def assemble_fem(mesh: Mesh, kappa: float) -> OperatorPair:
    """
    Assemble the consistent P1 mass matrix and the stiffness matrix scaled by kappa.

    Element matrices are computed for all elements at once and scattered
    into a COO matrix over every node; Dirichlet nodes are then eliminated.

    :param mesh: 1D or 2D mesh
    :param kappa: diffusion coefficient, positive
    :return: OperatorPair over the interior nodes
    """
    _check_kappa(kappa)
    elements = mesh.elements()
    if mesh.dim == 1:
        stiff_loc, mass_loc = _local_matrices_1d(mesh, kappa)
    else:
        stiff_loc, mass_loc = _local_matrices_2d(mesh, elements, kappa)
    n_loc = elements.shape[1]
    rows = np.repeat(elements, n_loc, axis=1).ravel()
    cols = np.tile(elements, (1, n_loc)).ravel()
    shape = (mesh.n_nodes, mesh.n_nodes)
    interior = mesh.interior_global_ids()

    stiffness = _restrict(sps.coo_matrix((stiff_loc.ravel(), (rows, cols)), shape=shape), interior)
    mass = _restrict(sps.coo_matrix((mass_loc.ravel(), (rows, cols)), shape=shape), interior)
    backend = BACKEND_FEM1D if mesh.dim == 1 else BACKEND_FEM2D
    logger.debug(
        f"Assembled {backend}: M={mesh.M}, {mesh.n_interior} unknowns, "
        f"{stiffness.nnz} stiffness non-zeros"
    )
    return OperatorPair(
        mesh=mesh,
        mass=SparseSpd(mass),
        stiffness=SparseSpd(stiffness),
        kappa=float(kappa),
        backend=backend,
    )


def assemble_fd(mesh: Mesh, kappa: float) -> OperatorPair:
    """
    Three-point finite difference Laplacian: stiffness = kappa/h^2 tridiag(-1, 2, -1), mass = I.

    :param mesh: 1D mesh
    :param kappa: diffusion coefficient, positive
    :return: OperatorPair over the interior nodes
    :raises UnsupportedError: for 2D meshes
    """
    if mesh.dim != 1:
        raise UnsupportedError("The finite difference backend is only available in 1D")
    _check_kappa(kappa)
    n = mesh.n_interior
    scale = kappa / mesh.h**2
    stiffness = (
        scale * (2.0 * sps.eye(n) - sps.eye(n, k=1) - sps.eye(n, k=-1))
    ).tocsr()
    mass = sps.identity(n, format="csr")
    return OperatorPair(
        mesh=mesh,
        mass=SparseSpd(mass),
        stiffness=SparseSpd(stiffness),
        kappa=float(kappa),
        backend=BACKEND_FD1D,
    )


def backend_dim(backend: str) -> int:
    """Spatial dimension of a backend name."""
    if backend not in BACKENDS:
        raise ConfigError(f"Unknown spatial backend {backend!r}; choose one of {list(BACKENDS)}")
    return 2 if backend == BACKEND_FEM2D else 1


def assemble(backend: str, M: int, kappa: float) -> OperatorPair:
    """
    Build the mesh of a backend and assemble its operators.

    :param backend: "fd1d", "fem1d" or "fem2d"
    :param M: subdivisions per direction
    :param kappa: diffusion coefficient
    :return: OperatorPair
    """
    mesh = build_mesh(backend_dim(backend), M)
    if backend == BACKEND_FD1D:
        return assemble_fd(mesh, kappa)
    return assemble_fem(mesh, kappa)


def discrete_eigenvalue(backend: str, mesh: Mesh, kappa: float, m: int) -> float:
    """
    Generalized eigenvalue of (stiffness, mass) belonging to the nodal sine mode sin(m pi x).

    fd1d:  (4 kappa / h^2) sin^2(m pi h / 2)
    fem1d: (6 kappa / h^2) (1 - cos(m pi h)) / (2 + cos(m pi h))

    :param backend: "fd1d" or "fem1d"
    :param mesh: 1D mesh
    :param kappa: diffusion coefficient
    :param m: mode number, 1 <= m <= M - 1
    :return: the eigenvalue
    """
    if backend not in (BACKEND_FD1D, BACKEND_FEM1D):
        raise UnsupportedError(f"Closed-form eigenvalues are only available for 1D backends, not {backend!r}")
    if mesh.dim != 1:
        raise UnsupportedError("Closed-form eigenvalues need a 1D mesh")
    if isinstance(m, bool) or int(m) != m or not 1 <= m <= mesh.M - 1:
        raise RangeError(f"Mode number m must be an integer in [1, {mesh.M - 1}], got {m!r}")
    _check_kappa(kappa)
    h = mesh.h
    theta = m * math.pi * h
    if backend == BACKEND_FD1D:
        return 4.0 * kappa / h**2 * math.sin(theta / 2.0) ** 2
    return 6.0 * kappa / h**2 * (1.0 - math.cos(theta)) / (2.0 + math.cos(theta))

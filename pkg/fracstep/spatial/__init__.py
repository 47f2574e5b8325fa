# Copyright The fracstep Authors. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0
from .assembly import (
    OperatorPair,
    assemble,
    assemble_fd,
    assemble_fem,
    backend_dim,
    discrete_eigenvalue,
)
from .linalg import SparseSpd, SpdFactor, factorize_spd, solve_spd
from .mesh import Mesh, build_mesh

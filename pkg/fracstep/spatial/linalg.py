# Copyright The fracstep Authors. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0
"""
Sparse symmetric positive definite matrices and their solvers.

Small and medium systems are factorized by sparse Cholesky: CHOLMOD when
scikit-sparse is installed, otherwise SuperLU restricted to symmetric
diagonal pivoting, which rejects indefinite matrices like a Cholesky would.
Systems with more rows than ``cholesky_max_rows`` are solved by
Jacobi-preconditioned conjugate gradients. Matrices without ``spd_hint``
always take the checked direct route.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sps
from scipy.sparse.linalg import LinearOperator, cg, splu

from ..config import get_config
from ..constants import FLOAT_FORMAT
from ..exceptions import PreconditionError, SolverFailure, UnsupportedError

try:
    from sksparse import cholmod  # Sparse Cholesky (CHOLMOD), optional

    _has_cholmod = True
except ImportError:
    _has_cholmod = False

__all__ = [
    "SparseSpd",
    "SpdFactor",
    "factorize_spd",
    "solve_spd",
]

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-13
_REFINEMENT_ROUNDS = 3


@dataclass(frozen=True, eq=False)
class SparseSpd:
    """
    Square sparse matrix in compressed-row layout, symmetric to 1e-13.

    Attributes:
        matrix (sps.csr_matrix): the matrix
        spd_hint (bool): the matrix is known to be positive definite; without it
            solvers pick a factorization that verifies definiteness
    """

    matrix: sps.csr_matrix = field(repr=False)
    spd_hint: bool = True

    def __post_init__(self):
        matrix = sps.csr_matrix(self.matrix, dtype=float)
        if matrix.shape[0] != matrix.shape[1]:
            raise PreconditionError(f"SparseSpd needs a square matrix, got shape {matrix.shape}")
        matrix.sum_duplicates()
        matrix.sort_indices()
        asymmetry = abs(matrix - matrix.T).max() if matrix.nnz else 0.0
        scale = max(abs(matrix).max() if matrix.nnz else 0.0, 1.0)
        if asymmetry > SYMMETRY_TOL * scale:
            raise PreconditionError(f"SparseSpd matrix is not symmetric (asymmetry {asymmetry:.3e})")
        object.__setattr__(self, "matrix", matrix)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def rows(self) -> np.ndarray:
        """Row pointer array of the compressed-row layout."""
        return self.matrix.indptr

    @property
    def cols(self) -> np.ndarray:
        return self.matrix.indices

    @property
    def values(self) -> np.ndarray:
        return self.matrix.data

    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal()

    def is_diagonal(self) -> bool:
        coo = self.matrix.tocoo()
        return bool(np.all(coo.row[coo.data != 0] == coo.col[coo.data != 0]))

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def __matmul__(self, other):
        return self.matrix @ other

    def write_triplets(self, path) -> None:
        """
        Write the matrix as text, one "row col value" line per stored entry.

        The first line is a comment holding the dimension so empty trailing
        rows survive a round trip.
        """
        coo = self.matrix.tocoo()
        with open(path, "w", encoding="utf-8") as f:
            f.write(f"# {self.n} {self.n} {coo.nnz}\n")
            for r, c, v in zip(coo.row, coo.col, coo.data):
                f.write(f"{r} {c} {format(float(v), FLOAT_FORMAT)}\n")
        logger.debug(f"Wrote {coo.nnz} triplets to {path}")

    @classmethod
    def read_triplets(cls, path, spd_hint: bool = True) -> "SparseSpd":
        """Read a matrix written by write_triplets."""
        n: Optional[int] = None
        rows, cols, vals = [], [], []
        with open(path, encoding="utf-8") as f:
            for line in f:
                parts = line.split()
                if not parts:
                    continue
                if parts[0] == "#":
                    n = int(parts[1])
                    continue
                rows.append(int(parts[0]))
                cols.append(int(parts[1]))
                vals.append(float(parts[2]))
        if n is None:
            n = max(max(rows, default=-1), max(cols, default=-1)) + 1
        matrix = sps.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
        return cls(matrix, spd_hint=spd_hint)


class SpdFactor:
    """
    Reusable solver for one SPD matrix; call :meth:`solve` for each right-hand side.

    The backend is chosen at construction: "cholmod", "splu" or "cg".
    """

    def __init__(self, A: SparseSpd, backend: Optional[str] = None):
        config = get_config()
        self.A = A
        self.rtol = config.spd_rtol
        if backend is None:
            if A.n <= config.cholesky_max_rows or not A.spd_hint:
                backend = "cholmod" if _has_cholmod else "splu"
            else:
                backend = "cg"
        if backend == "cg" and not A.spd_hint:
            raise PreconditionError("Conjugate gradients need a matrix known to be positive definite")
        self.backend = backend
        self.maxiter = config.cg_max_iter_factor * max(A.n, 1)
        self._factor = None
        if backend == "cholmod":
            if not _has_cholmod:
                raise ImportError("scikit-sparse is not installed on this system")
            try:
                self._factor = cholmod.cholesky(A.matrix.tocsc())
            except cholmod.CholmodNotPositiveDefiniteError as e:
                raise SolverFailure(f"Cholesky factorization failed: {e}") from e
        elif backend == "splu":
            self._factor = _symmetric_lu(A)
        elif backend == "cg":
            diag = A.diagonal()
            if np.any(diag <= 0):
                raise SolverFailure("Jacobi preconditioner needs a positive diagonal")
            inv_diag = 1.0 / diag
            self._factor = LinearOperator(A.matrix.shape, matvec=lambda r: inv_diag * r)
        else:
            raise UnsupportedError(f"Unknown SPD solver backend {backend!r}")
        logger.debug(f"SpdFactor: n={A.n}, backend={backend}")

    def solve(self, b: np.ndarray) -> np.ndarray:
        b = np.asarray(b, dtype=float)
        if b.shape != (self.A.n,):
            raise PreconditionError(
                f"Right-hand side has shape {b.shape}, expected ({self.A.n},)"
            )
        b_norm = np.linalg.norm(b)
        if b_norm == 0.0:
            return np.zeros_like(b)
        if self.backend == "cg":
            return self._solve_cg(b, b_norm)
        return self._solve_direct(b, b_norm)

    __call__ = solve

    def _direct(self, r: np.ndarray) -> np.ndarray:
        if self.backend == "cholmod":
            return self._factor(r)
        return self._factor.solve(r)

    def _solve_direct(self, b: np.ndarray, b_norm: float) -> np.ndarray:
        x = self._direct(b)
        residual = b - self.A @ x
        rel = np.linalg.norm(residual) / b_norm
        for _ in range(_REFINEMENT_ROUNDS):
            if rel <= self.rtol:
                break
            x = x + self._direct(residual)
            residual = b - self.A @ x
            rel = np.linalg.norm(residual) / b_norm
        if not np.isfinite(rel):
            raise SolverFailure("Direct SPD solve produced a non-finite result", rel)
        if rel > self.rtol:
            logger.debug(f"Direct solve stalled at relative residual {rel:.3e} (n={self.A.n})")
        return x

    def _solve_cg(self, b: np.ndarray, b_norm: float) -> np.ndarray:
        x, info = cg(self.A.matrix, b, rtol=self.rtol, atol=0.0, maxiter=self.maxiter, M=self._factor)
        rel = np.linalg.norm(b - self.A @ x) / b_norm
        if info != 0:
            raise SolverFailure(
                f"Conjugate gradient did not converge in {self.maxiter} iterations "
                f"(relative residual {rel:.3e})",
                rel,
            )
        return x


def _symmetric_lu(A: SparseSpd):
    """SuperLU with symmetric diagonal pivots; positive pivots certify A is positive definite."""
    try:
        lu = splu(
            A.matrix.tocsc(),
            permc_spec="MMD_AT_PLUS_A",
            diag_pivot_thresh=0.0,
            options=dict(SymmetricMode=True),
        )
    except RuntimeError as e:
        raise SolverFailure(f"Sparse factorization failed: {e}") from e
    if not np.array_equal(lu.perm_r, lu.perm_c):
        raise SolverFailure("Sparse factorization left the diagonal; matrix is not positive definite")
    pivots = lu.U.diagonal()
    if np.any(pivots <= 0):
        raise SolverFailure(
            f"Sparse factorization found pivot {float(np.min(pivots)):.3e}; matrix is not positive definite"
        )
    return lu


def factorize_spd(A: SparseSpd, backend: Optional[str] = None) -> SpdFactor:
    """
    Prepare a reusable solver for A.

    :param A: symmetric positive definite matrix
    :param backend: "cholmod", "splu" or "cg"; chosen from the configuration when omitted
    :return: SpdFactor
    """
    return SpdFactor(A, backend=backend)


def solve_spd(A: SparseSpd, b: np.ndarray, backend: Optional[str] = None) -> np.ndarray:
    """
    Solve A x = b for a symmetric positive definite A.

    Sparse Cholesky (with up to three rounds of iterative refinement) for
    n <= cholesky_max_rows, Jacobi-preconditioned CG otherwise.

    :param A: the matrix
    :param b: right-hand side of length A.n
    :param backend: force "cholmod", "splu" or "cg"
    :return: x with relative residual at most spd_rtol
    :raises SolverFailure: CG did not converge within cg_max_iter_factor * n iterations
    """
    return SpdFactor(A, backend=backend).solve(b)

"""Conjugate gradients for the symmetric systems of the time steppers."""
from dataclasses import dataclass

import numpy as np

from .errors import IndefiniteMatrix, NotConverged

__all__ = ["CGSettings", "CGResult", "cg_solve", "BlockJacobi"]


@dataclass(frozen=True)
class CGSettings:
    rel_tol: float = 1e-12
    max_iter: int | None = None  # None -> 10 * dimension


@dataclass
class CGResult:
    x: np.ndarray
    iterations: int
    residual: float


def cg_solve(A, b, x0=None, rel_tol=1e-12, max_iter=None, full_output=False, precond=None):
    """Solve ``A x = b`` for symmetric positive definite ``A``.

    Stops when ``||A x - b|| <= rel_tol * ||b||``. The reported residual is
    recomputed from scratch at exit rather than taken from the recurrence.
    ``precond``, if given, is an SPD approximation of ``A^{-1}`` supporting
    ``precond @ r``.

    Raises
    ------
    IndefiniteMatrix
        If a search direction has ``p^T A p <= 0``.
    NotConverged
        If the tolerance is not met within ``max_iter`` iterations.
    """
    if not rel_tol > 0:
        raise ValueError("rel_tol must be positive")
    b = np.asarray(b, dtype=float)
    n = b.shape[0]
    if max_iter is None:
        max_iter = 10 * max(n, 1)
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    bnorm = np.linalg.norm(b)
    target = rel_tol * bnorm

    r = b - A @ x
    rnorm = np.linalg.norm(r)
    it = 0
    if rnorm > target:
        z = r if precond is None else precond @ r
        p = z.copy()
        rz = r @ z
        while True:
            Ap = A @ p
            curv = p @ Ap
            if not curv > 0:
                raise IndefiniteMatrix(curv)
            step = rz / curv
            x += step * p
            r -= step * Ap
            it += 1
            if np.linalg.norm(r) <= target:
                # guard against recurrence drift
                r = b - A @ x
                if np.linalg.norm(r) <= target:
                    break
            if it >= max_iter:
                r = b - A @ x
                raise NotConverged(it, float(np.linalg.norm(r)))
            z = r if precond is None else precond @ r
            rz_new = r @ z
            p = z + (rz_new / rz) * p
            rz = rz_new
    residual = float(np.linalg.norm(b - A @ x))
    if full_output:
        return CGResult(x, it, residual)
    return x


class BlockJacobi:
    """Inverse of the diagonal blocks of consecutive dofs, applied via ``@``.

    With x1-fastest node numbering, blocks of ``3 * (n1 + 1)`` dofs are the
    through-thickness node columns, which carry the stiffest couplings of a
    thin plate.
    """

    def __init__(self, A, block_size):
        A = A.tocoo()
        n = A.shape[0]
        if n % block_size:
            raise ValueError("block size must divide the dimension")
        self.block_size = block_size
        nb = n // block_size
        keep = (A.row // block_size) == (A.col // block_size)
        blocks = np.zeros((nb, block_size, block_size))
        np.add.at(blocks, (A.row[keep] // block_size, A.row[keep] % block_size, A.col[keep] % block_size),
                  A.data[keep])
        self.inv = np.linalg.inv(blocks)

    def __matmul__(self, r):
        nb, bs, _ = self.inv.shape
        return np.einsum("bij,bj->bi", self.inv, r.reshape(nb, bs)).reshape(-1)

"""Theta-method time stepping of the nonlinear elastic wave equation.

The velocity is carried only through its mass product ``MR``; each step
solves the nonlinear displacement equation with Newton's method and CG for
the linearised systems.
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import NewtonDiverged
from .linalg import BlockJacobi, cg_solve
from .mesh import assemble_mass

__all__ = ["TimeGrid", "SolverConfig", "ForwardResult", "Problem", "forward"]


@dataclass(frozen=True)
class TimeGrid:
    horizon: float = 4.0
    steps: int = 16
    theta: float = 0.5

    def __post_init__(self):
        if self.steps < 1 or not self.horizon > 0 or not 0.0 <= self.theta <= 1.0:
            raise ValueError(f"invalid time grid {self}")

    @property
    def k(self):
        return self.horizon / self.steps

    @property
    def times(self):
        return np.linspace(0.0, self.horizon, self.steps + 1)


@dataclass(frozen=True)
class SolverConfig:
    density: float = 1.0
    newton_tol: float = 1e-10
    newton_max_iter: int = 20
    cg_rel_tol: float = 1e-12
    cg_max_iter: int | None = None
    boundary: str = "free"  # or "clamped_all"
    preconditioner: str = "column"  # or "none"

    def __post_init__(self):
        if not self.density > 0 or not self.newton_tol > 0 or not self.cg_rel_tol > 0:
            raise ValueError("density and tolerances must be positive")
        if self.boundary not in ("free", "clamped_all"):
            raise ValueError(f"unknown boundary mode {self.boundary!r}")
        if self.preconditioner not in ("column", "none"):
            raise ValueError(f"unknown preconditioner {self.preconditioner!r}")


@dataclass
class ForwardResult:
    U: np.ndarray  # (m + 1, L)
    MR: np.ndarray  # (m + 1, L)
    newton_residuals: list = field(default_factory=list)

    def __iter__(self):
        return iter((self.U, self.MR))


class Problem:
    """Bundle of the discrete operators shared by forward and adjoint sweeps."""

    def __init__(self, assembler, tg, cfg=SolverConfig()):
        self.assembler = assembler
        self.mesh = assembler.mesh
        self.tg = tg
        self.cfg = cfg
        self.M = assemble_mass(self.mesh)
        if cfg.boundary == "clamped_all":
            free = np.ones(self.mesh.n_dofs)
            nodes = self.mesh.boundary_nodes
            free[(3 * nodes[:, None] + np.arange(3)).ravel()] = 0.0
            self.free = free
        else:
            self.free = None

    def solve(self, J, rhs, x0=None):
        """CG solve; with clamping, constrained rows become identity rows."""
        cfg = self.cfg
        if self.free is not None:
            P = sp.diags(self.free)
            J = (P @ J @ P + sp.diags(1.0 - self.free)).tocsr()
            rhs = rhs * self.free
            x0 = None if x0 is None else x0 * self.free
        precond = None
        if cfg.preconditioner == "column":
            precond = BlockJacobi(J, 3 * (self.mesh.cells[0] + 1))
        return cg_solve(J, rhs, x0, cfg.cg_rel_tol, cfg.cg_max_iter, precond=precond)

    def restrict(self, vec):
        """Zero the constrained entries (no-op for a free boundary)."""
        if self.free is None:
            return vec
        return vec * self.free


def forward(problem, alpha, loads):
    """Displacement history for coefficients ``alpha`` and load vectors ``loads``.

    Parameters
    ----------
    problem : Problem
    alpha : ndarray, shape (n + 1, n + 1)
    loads : ndarray, shape (m + 1, L)
        Assembled load vectors ``MF^j``.

    Returns
    -------
    ForwardResult
        ``U`` and ``MR`` with ``m + 1`` levels; ``U[0] = MR[0] = 0``.
    """
    tg, cfg, asm, M = problem.tg, problem.cfg, problem.assembler, problem.M
    m, k, th, rho = tg.steps, tg.k, tg.theta, cfg.density
    loads = np.asarray(loads, dtype=float)
    L = problem.mesh.n_dofs
    if loads.shape != (m + 1, L):
        raise ValueError(f"loads must have shape {(m + 1, L)}, got {loads.shape}")
    c_d = k * k * th / rho
    c_j = k * k * th * th / rho
    c_old = k * k * (1.0 - th) * th / rho

    U = np.zeros((m + 1, L))
    MR = np.zeros((m + 1, L))
    history = []
    for j in range(1, m + 1):
        Uprev = U[j - 1]
        base = -(M @ Uprev) - k * MR[j - 1] - c_j * loads[j] - c_old * loads[j - 1]
        tol = cfg.newton_tol * (1.0 + np.linalg.norm(loads[j]))
        Ul = Uprev.copy()
        residuals = []
        it = 0
        while True:
            D = asm.internal_force(alpha, Ul, Uprev, th)
            Fh = problem.restrict(M @ Ul + base + c_d * D)
            res = float(np.linalg.norm(Fh))
            residuals.append(res)
            if res <= tol:
                break
            if it >= cfg.newton_max_iter or not np.isfinite(res):
                raise NewtonDiverged(j, it, res)
            A = asm.tangent(alpha, Ul, Uprev, th)
            Ul = Ul + problem.solve(M + c_j * A, -Fh)
            it += 1
        U[j] = Ul
        MR[j] = MR[j - 1] - (k / rho) * D + (k * th / rho) * loads[j] + (k * (1.0 - th) / rho) * loads[j - 1]
        history.append(residuals)
    return ForwardResult(U, MR, history)

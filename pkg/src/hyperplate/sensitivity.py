"""Linearised forward map and backward adjoint sweeps.

``derivative_apply`` differentiates the forward theta-scheme exactly, so it
is the true directional derivative of the discrete forward map. The adjoint
sweeps discretise the continuous backward problem with the same theta-rule;
they are not the exact transpose of the derivative, and their pairing with
it is accurate only up to the time-discretisation error.
"""
import numpy as np

from .errors import LengthMismatch

__all__ = [
    "derivative_apply",
    "adjoint_full",
    "adjoint_sensor",
    "adjoint_systems",
    "gradient_history",
    "trapezoid",
    "energy_seminorm_sq",
    "state_norm",
]


def trapezoid(values, tg):
    """``(T/m) (v0/2 + v1 + ... + v_{m-1} + v_m/2)`` over the time levels.

    ``values`` may be scalars or arrays stacked along the first axis.
    """
    values = np.asarray(values, dtype=float)
    if values.shape[0] != tg.steps + 1:
        raise LengthMismatch(f"expected {tg.steps + 1} time levels, got {values.shape[0]}")
    w = np.full(tg.steps + 1, tg.k)
    w[0] *= 0.5
    w[-1] *= 0.5
    return np.tensordot(w, values, axes=(0, 0))


def derivative_apply(problem, alpha, h, U):
    """Directional derivative ``V = T'(alpha) h`` of the forward map.

    Zero initial data; each step reuses the frozen tangent ``A(u^j, u^{j-1})``
    and is driven by the internal force of the ``h``-weighted dictionary.
    """
    tg, cfg, asm, M = problem.tg, problem.cfg, problem.assembler, problem.M
    m, k, th, rho = tg.steps, tg.k, tg.theta, cfg.density
    L = problem.mesh.n_dofs
    V = np.zeros((m + 1, L))
    MS = np.zeros(L)
    if not np.any(h):
        return V
    c_j = k * k * th * th / rho
    for j in range(1, m + 1):
        A = asm.tangent(alpha, U[j], U[j - 1], th)
        Dh = asm.direction_force(h, U[j], U[j - 1], th)
        rhs = M @ V[j - 1] + k * MS - (k * k * th / rho) * ((1.0 - th) * (A @ V[j - 1]) + Dh)
        V[j] = problem.solve(M + c_j * A, problem.restrict(rhs), V[j - 1])
        MS = MS - (k / rho) * (A @ (th * V[j] + (1.0 - th) * V[j - 1]) + Dh)
    return V


def adjoint_systems(problem, alpha, U, j):
    """``(A, S0, S1)`` of the backward step from level ``j + 1`` to ``j``."""
    tg, rho = problem.tg, problem.cfg.density
    k, th = tg.k, tg.theta
    A = problem.assembler.tangent(alpha, U[j], U[j + 1], th)
    S0 = problem.M + (k * k * th * th / rho) * A
    S1 = problem.M - (k * k * (1.0 - th) * th / rho) * A
    return A, S0, S1


def adjoint_full(problem, alpha, W, U):
    """Backward sweep for dual load vectors ``W`` (one per time level).

    Terminal data ``P^m = 0`` and ``MQ^m = 0``; returns all ``P^j``.
    """
    tg, rho, M = problem.tg, problem.cfg.density, problem.M
    m, k, th = tg.steps, tg.k, tg.theta
    W = np.asarray(W, dtype=float)
    L = problem.mesh.n_dofs
    if W.shape != (m + 1, L):
        raise LengthMismatch(f"W must have shape {(m + 1, L)}, got {W.shape}")
    P = np.zeros((m + 1, L))
    if not np.any(W):
        return P
    MQ = np.zeros(L)
    c0 = k * k * th * th / rho
    c1 = k * k * (1.0 - th) * th / rho
    for j in range(m - 1, -1, -1):
        A, S0, S1 = adjoint_systems(problem, alpha, U, j)
        rhs = S1 @ P[j + 1] + k * MQ + c0 * W[j] + c1 * W[j + 1]
        P[j] = problem.solve(S0, problem.restrict(rhs), P[j + 1])
        MQ = (MQ - (k * th / rho) * (A @ P[j]) - (k * (1.0 - th) / rho) * (A @ P[j + 1])
              + (k * th / rho) * W[j] + (k * (1.0 - th) / rho) * W[j + 1])
    return P


def adjoint_sensor(problem, alpha, Wsens, U, sensors):
    """Backward sweep driven by sensor-space residuals ``Wsens`` of shape (m + 1, l)."""
    Wsens = np.asarray(Wsens, dtype=float)
    if Wsens.shape != (problem.tg.steps + 1, sensors.count):
        raise LengthMismatch(f"sensor data must have shape {(problem.tg.steps + 1, sensors.count)}")
    return adjoint_full(problem, alpha, sensors.adjoint_history(Wsens), U)


def gradient_history(problem, U, P):
    """Dictionary integrals ``z^j_rs`` for every level, shape (m + 1, n + 1, n + 1)."""
    asm = problem.assembler
    return np.array([asm.gradient_entries(U[j], P[j]) for j in range(len(U))])


def energy_seminorm_sq(mesh, V):
    """``int |Jv|_F^2 dx`` for each level of a history, 2x2x2 Gauss."""
    from .mesh import element_gradients

    V = np.atleast_2d(V)
    return np.array([mesh.qp_weight * np.sum(element_gradients(mesh, v) ** 2) for v in V])


def state_norm(problem, Z):
    """Discrete ``L2(0,T;U) + H1(0,T;H)`` norm of a displacement history.

    The first part is the trapezoid integral of the gradient energy; the
    second adds mass-matrix norms of values and backward differences.
    """
    tg, M = problem.tg, problem.M
    Z = np.asarray(Z, dtype=float)
    l2u = np.sqrt(trapezoid(energy_seminorm_sq(problem.mesh, Z), tg))
    vals = np.einsum("ji,ji->j", Z, (M @ Z.T).T)
    dZ = np.diff(Z, axis=0) / tg.k
    dvals = np.einsum("ji,ji->j", dZ, (M @ dZ.T).T)
    h1 = np.sqrt(trapezoid(vals, tg) + tg.k * dvals.sum())
    return float(l2u + h1)

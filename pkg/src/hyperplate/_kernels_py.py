"""Pure numpy element kernels (fallback for the compiled ``_kernels``)."""
import numpy as np

from .errors import NonPositiveJacobian


def element_system(Y, wq, dN, c1, beta, with_tangent=True):
    """Element internal force vectors and tangent matrices.

    Parameters
    ----------
    Y : ndarray, shape (ne, nq, 3, 3)
        Displacement gradients at the quadrature points.
    wq : ndarray, shape (ne, nq)
        Quadrature weight times the dictionary weight.
    dN : ndarray, shape (nq, 8, 3)
        Physical shape function gradients (shared by all elements).

    Returns
    -------
    fe : ndarray, shape (ne, 24)
    Ke : ndarray, shape (ne, 24, 24) or None
    """
    ne, nq = wq.shape
    F = Y + np.eye(3)
    D = np.linalg.det(F)
    bad = ~(D > 0)
    if bad.any():
        e, q = np.argwhere(bad)[0]
        raise NonPositiveJacobian(element=int(e), qp=int(q))
    G = np.swapaxes(np.linalg.inv(F), -1, -2)
    Dp = np.exp(-2.0 * beta * np.log(D))
    P = 2.0 * c1 * (F - Dp[..., None, None] * G)
    fe = np.einsum("eq,eqij,qaj->eai", wq, P, dN).reshape(ne, 24)
    if not with_tangent:
        return fe, None
    g = np.einsum("eqij,qaj->eqai", G, dN)
    wd = wq * Dp
    dd = np.einsum("eq,qaj,qbj->eab", wq, dN, dN)
    Ke = 2.0 * c1 * np.einsum("eab,ik->eaibk", dd, np.eye(3))
    Ke += 4.0 * c1 * beta * np.einsum("eq,eqai,eqbk->eaibk", wd, g, g)
    Ke += 2.0 * c1 * np.einsum("eq,eqbi,eqak->eaibk", wd, g, g)
    return fe, Ke.reshape(ne, 24, 24)


def stress_contraction(Y, Z, c1, beta):
    """Pointwise ``stress(Y) : Z`` at every quadrature point, shape (ne, nq)."""
    F = Y + np.eye(3)
    D = np.linalg.det(F)
    bad = ~(D > 0)
    if bad.any():
        e, q = np.argwhere(bad)[0]
        raise NonPositiveJacobian(element=int(e), qp=int(q))
    G = np.swapaxes(np.linalg.inv(F), -1, -2)
    Dp = np.exp(-2.0 * beta * np.log(D))
    P = 2.0 * c1 * (F - Dp[..., None, None] * G)
    return np.einsum("eqij,eqij->eq", P, Z)

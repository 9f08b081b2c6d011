"""Neo-Hookean stored energy, its Y-derivatives, and the B-spline dictionary.

All constitutive functions take the displacement gradient ``Y`` (not the
deformation gradient) and work on any array of shape ``(..., 3, 3)``; the
deformation gradient is ``F = Y + I``.
"""
from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveJacobian

__all__ = [
    "NeoHookean",
    "SplineGrid",
    "energy",
    "stress",
    "tangent_apply",
    "tangent_tensor",
    "bspline_eval",
    "bspline_matrix",
    "dict_weight",
    "dict_gradient_weight",
    "check_coeffs",
]

_EYE = np.eye(3)


@dataclass(frozen=True)
class NeoHookean:
    """Compressible Neo-Hookean law ``c1 (I1 - 3) + c1/beta (D^-2beta - 1)``.

    Parameters
    ----------
    bulk_modulus : float
        K, in the nondimensional pressure unit of the computation.
    shear_modulus : float
        mu > 0. Requires ``3K > 2mu``.
    """

    bulk_modulus: float = 68.6
    shear_modulus: float = 26.32

    def __post_init__(self):
        if not self.shear_modulus > 0:
            raise ValueError("shear modulus must be positive")
        if not 3 * self.bulk_modulus > 2 * self.shear_modulus:
            raise ValueError("need 3K > 2mu so that beta > 0")

    @property
    def c1(self):
        return 0.5 * self.shear_modulus

    @property
    def beta(self):
        return (3 * self.bulk_modulus - 2 * self.shear_modulus) / (6 * self.shear_modulus)


def _kinematics(Y):
    Y = np.asarray(Y, dtype=float)
    F = Y + _EYE
    D = np.linalg.det(F)
    if np.any(~(D > 0)):
        raise NonPositiveJacobian()
    return F, D


def energy(params, Y):
    """Stored energy C(Y)."""
    F, D = _kinematics(Y)
    c1, beta = params.c1, params.beta
    I1 = np.einsum("...ij,...ij->...", F, F)
    return c1 * (I1 - 3.0) + (c1 / beta) * (np.exp(-2.0 * beta * np.log(D)) - 1.0)


def stress(params, Y):
    """First derivative ``2 c1 F - 2 c1 D^-2beta F^-T``."""
    F, D = _kinematics(Y)
    c1, beta = params.c1, params.beta
    G = np.swapaxes(np.linalg.inv(F), -1, -2)
    Dp = np.exp(-2.0 * beta * np.log(D))[..., None, None]
    return 2.0 * c1 * F - 2.0 * c1 * Dp * G


def tangent_apply(params, Y, H):
    """Directional second derivative of the energy at ``Y`` in direction ``H``.

    ``2c1 H + 4c1 beta D^-2beta <F^-T, H> F^-T + 2c1 D^-2beta F^-T H^T F^-T``
    """
    F, D = _kinematics(Y)
    H = np.asarray(H, dtype=float)
    c1, beta = params.c1, params.beta
    G = np.swapaxes(np.linalg.inv(F), -1, -2)
    Dp = np.exp(-2.0 * beta * np.log(D))[..., None, None]
    GH = np.einsum("...ij,...ij->...", G, H)[..., None, None]
    return (
        2.0 * c1 * H
        + 4.0 * c1 * beta * Dp * GH * G
        + 2.0 * c1 * Dp * (G @ np.swapaxes(H, -1, -2) @ G)
    )


def tangent_tensor(params, Y):
    """Fourth-order tangent ``C[..., i, j, k, l] = d stress_ij / d Y_kl``."""
    F, D = _kinematics(Y)
    c1, beta = params.c1, params.beta
    G = np.swapaxes(np.linalg.inv(F), -1, -2)
    Dp = np.exp(-2.0 * beta * np.log(D))[..., None, None, None, None]
    ident = np.einsum("ik,jl->ijkl", _EYE, _EYE)
    return (
        2.0 * c1 * ident
        + 4.0 * c1 * beta * Dp * np.einsum("...ij,...kl->...ijkl", G, G)
        + 2.0 * c1 * Dp * np.einsum("...il,...kj->...ijkl", G, G)
    )


@dataclass(frozen=True)
class SplineGrid:
    """Equidistant knots ``a = x0 < ... < xn = b`` for first-order B-splines."""

    a: float
    b: float
    n: int

    def __post_init__(self):
        if self.n < 1 or not self.b > self.a:
            raise ValueError("need n >= 1 and b > a")

    @property
    def knots(self):
        return np.linspace(self.a, self.b, self.n + 1)

    @property
    def spacing(self):
        return (self.b - self.a) / self.n


def bspline_eval(grid, i, x):
    """Hat function ``b_i`` at ``x``; zero outside ``[a, b]``."""
    x = np.asarray(x, dtype=float)
    t = (x - grid.a) / grid.spacing
    val = np.clip(1.0 - np.abs(t - i), 0.0, None)
    inside = (x >= grid.a) & (x <= grid.b)
    return np.where(inside, val, 0.0)


def bspline_matrix(grid, x):
    """All hat functions at once: array of shape ``(len(x), n + 1)``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    idx = np.arange(grid.n + 1)
    t = (x[:, None] - grid.a) / grid.spacing
    val = np.clip(1.0 - np.abs(t - idx[None, :]), 0.0, None)
    inside = (x >= grid.a) & (x <= grid.b)
    return val * inside[:, None]


def dict_weight(grid2, grid3, alpha, x, in_layer):
    """Spatial weight ``sum_ij alpha_ij b_i(x2) b_j(x3)`` in a layer, else 1."""
    if not in_layer:
        return 1.0
    b2 = bspline_matrix(grid2, x[1])[0]
    b3 = bspline_matrix(grid3, x[2])[0]
    return float(b2 @ np.asarray(alpha) @ b3)


def dict_gradient_weight(grid2, grid3, r, s, x, in_layer):
    """Spatial factor ``b_r(x2) b_s(x3)`` of one dictionary entry, 0 off-layer."""
    if not in_layer:
        return 0.0
    return float(bspline_eval(grid2, r, x[1]) * bspline_eval(grid3, s, x[2]))


def check_coeffs(alpha, n):
    """Validate a dictionary coefficient matrix and return it as float array."""
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (n + 1, n + 1):
        raise ValueError(f"coefficient matrix must be {(n + 1, n + 1)}, got {alpha.shape}")
    if np.any(alpha < 0) or not np.all(np.isfinite(alpha)):
        raise ValueError("coefficients must be finite and nonnegative")
    return alpha

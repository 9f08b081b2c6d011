"""State-dependent tangent matrix, internal force vector and dictionary gradients."""
import numpy as np
import scipy.sparse as sp

from . import kernels
from .material import SplineGrid, bspline_matrix
from .mesh import element_gradients

__all__ = ["Assembler"]


class Assembler:
    """Assembly on a fixed mesh, material and dictionary grid.

    The CSR sparsity pattern of the tangent and the scatter map from element
    entries to CSR slots are computed once. Reduction uses ``np.bincount``
    over a fixed element order, so repeated calls are bit-identical.

    Parameters
    ----------
    mesh : PlateMesh
    material : NeoHookean
    n_knots : int
        Number of knot intervals ``n`` per in-plane axis; the dictionary then
        has ``(n + 1) ** 2`` coefficients.
    """

    def __init__(self, mesh, material, n_knots):
        self.mesh = mesh
        self.material = material
        (_, _), (a2, b2), (a3, b3) = mesh.extents
        self.grid2 = SplineGrid(a2, b2, n_knots)
        self.grid3 = SplineGrid(a3, b3, n_knots)
        self.n_knots = n_knots

        ne = mesh.n_elements
        x = mesh.qp_coords.reshape(-1, 3)
        # (ne*nq, n+1) spline values at the quadrature points, zeroed off-layer
        layer = np.repeat(mesh.in_layer, 8)
        self._b2 = bspline_matrix(self.grid2, x[:, 1]) * layer[:, None]
        self._b3 = bspline_matrix(self.grid3, x[:, 2])
        self._layer = layer.reshape(ne, 8)

        dofs = mesh.element_dofs
        rows = np.repeat(dofs, 24, axis=1).ravel()
        cols = np.tile(dofs, (1, 24)).ravel()
        n = mesh.n_dofs
        pattern = sp.coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n)).tocsr()
        pattern.sort_indices()
        self._indptr = pattern.indptr
        self._indices = pattern.indices
        # slot of each (row, col) element entry inside the CSR data array
        pattern_rows = np.repeat(np.arange(n), np.diff(self._indptr))
        keys = pattern_rows.astype(np.int64) * n + self._indices
        self._slots = np.searchsorted(keys, rows.astype(np.int64) * n + cols)
        self._nnz = len(self._indices)
        self._dof_flat = dofs.ravel()

    # -- weights ---------------------------------------------------------
    def weights(self, alpha):
        """Quadrature weight times dictionary weight, shape (n_elements, 8)."""
        alpha = np.asarray(alpha, dtype=float)
        dictw = np.einsum("pi,ij,pj->p", self._b2, alpha, self._b3).reshape(self._layer.shape)
        w = np.where(self._layer, dictw, 1.0)
        return self.mesh.qp_weight * w

    def direction_weights(self, h):
        """Weights for a coefficient direction ``h``: dictionary part only, 0 off-layer."""
        h = np.asarray(h, dtype=float)
        dictw = np.einsum("pi,ij,pj->p", self._b2, h, self._b3).reshape(self._layer.shape)
        return self.mesh.qp_weight * np.where(self._layer, dictw, 0.0)

    # -- assembly ----------------------------------------------------------
    def blended_gradients(self, Ua, Ub, theta):
        Ya = element_gradients(self.mesh, Ua)
        if Ub is None or theta == 1.0:
            return Ya
        return theta * Ya + (1.0 - theta) * element_gradients(self.mesh, Ub)

    def _system(self, alpha, Ua, Ub, theta, with_tangent, weights=None):
        Y = np.ascontiguousarray(self.blended_gradients(Ua, Ub, theta))
        w = self.weights(alpha) if weights is None else weights
        mat = self.material
        return kernels.element_system(Y, np.ascontiguousarray(w), self.mesh.qp_grad,
                                      mat.c1, mat.beta, with_tangent)

    def _to_csr(self, Ke):
        Ke = 0.5 * (Ke + np.swapaxes(Ke, 1, 2))
        data = np.bincount(self._slots, weights=Ke.ravel(), minlength=self._nnz)
        n = self.mesh.n_dofs
        return sp.csr_matrix((data, self._indices, self._indptr), shape=(n, n))

    def _to_vector(self, fe):
        return np.bincount(self._dof_flat, weights=fe.ravel(), minlength=self.mesh.n_dofs)

    def tangent(self, alpha, Ua, Ub=None, theta=1.0):
        """``A_rs = int (d2C(x, theta Ju_a + (1-theta) Ju_b) : J phi_r) : J phi_s``."""
        _, Ke = self._system(alpha, Ua, Ub, theta, True)
        return self._to_csr(Ke)

    def internal_force(self, alpha, Ua, Ub=None, theta=1.0):
        """``D_s = int dC(x, theta Ju_a + (1-theta) Ju_b) : J phi_s``."""
        fe, _ = self._system(alpha, Ua, Ub, theta, False)
        return self._to_vector(fe)

    def force_and_tangent(self, alpha, Ua, Ub=None, theta=1.0):
        fe, Ke = self._system(alpha, Ua, Ub, theta, True)
        return self._to_vector(fe), self._to_csr(Ke)

    def direction_force(self, h, Ua, Ub=None, theta=1.0):
        """Internal force of the direction-weighted law ``sum h_rs b_r b_s C``."""
        fe, _ = self._system(None, Ua, Ub, theta, False, weights=self.direction_weights(h))
        return self._to_vector(fe)

    # -- dictionary gradients ---------------------------------------------
    def gradient_entries(self, U, P):
        """Matrix ``z_rs = int b_r(x2) b_s(x3) dC(Ju) : Jp dx`` over the layers."""
        Y = np.ascontiguousarray(element_gradients(self.mesh, U))
        Z = np.ascontiguousarray(element_gradients(self.mesh, P))
        mat = self.material
        s = kernels.stress_contraction(Y, Z, mat.c1, mat.beta).ravel() * self.mesh.qp_weight
        return (self._b2 * s[:, None]).T @ self._b3

    def gradient_entry(self, r, s, U, P):
        return float(self.gradient_entries(U, P)[r, s])

# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled element kernels; same contract as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log

from .errors import NonPositiveJacobian

cnp.import_array()


cdef inline int _inverse_transpose(double[3][3] F, double[3][3] G, double* det) noexcept nogil:
    cdef double d
    d = (F[0][0] * (F[1][1] * F[2][2] - F[1][2] * F[2][1])
         - F[0][1] * (F[1][0] * F[2][2] - F[1][2] * F[2][0])
         + F[0][2] * (F[1][0] * F[2][1] - F[1][1] * F[2][0]))
    det[0] = d
    if not d > 0.0:
        return 1
    # G = F^{-T} = cofactor(F) / det
    G[0][0] = (F[1][1] * F[2][2] - F[1][2] * F[2][1]) / d
    G[0][1] = (F[1][2] * F[2][0] - F[1][0] * F[2][2]) / d
    G[0][2] = (F[1][0] * F[2][1] - F[1][1] * F[2][0]) / d
    G[1][0] = (F[0][2] * F[2][1] - F[0][1] * F[2][2]) / d
    G[1][1] = (F[0][0] * F[2][2] - F[0][2] * F[2][0]) / d
    G[1][2] = (F[0][1] * F[2][0] - F[0][0] * F[2][1]) / d
    G[2][0] = (F[0][1] * F[1][2] - F[0][2] * F[1][1]) / d
    G[2][1] = (F[0][2] * F[1][0] - F[0][0] * F[1][2]) / d
    G[2][2] = (F[0][0] * F[1][1] - F[0][1] * F[1][0]) / d
    return 0


def element_system(const double[:, :, :, ::1] Y, const double[:, ::1] wq,
                   const double[:, :, ::1] dN, double c1, double beta,
                   bint with_tangent=True):
    cdef Py_ssize_t ne = Y.shape[0], nq = Y.shape[1]
    cdef Py_ssize_t e, q, a, b, i, j, k
    cdef double[3][3] F
    cdef double[3][3] G
    cdef double[3][3] P
    cdef double[8][3] g
    cdef double det, Dp, w, wd, s, t1
    cdef int bad = 0
    cdef Py_ssize_t bad_e = -1, bad_q = -1

    fe_arr = np.zeros((ne, 24))
    cdef double[:, ::1] fe = fe_arr
    cdef double[:, :, ::1] Ke
    if with_tangent:
        Ke_arr = np.zeros((ne, 24, 24))
        Ke = Ke_arr
    else:
        Ke_arr = None

    with nogil:
        for e in range(ne):
            for q in range(nq):
                for i in range(3):
                    for j in range(3):
                        F[i][j] = Y[e, q, i, j]
                    F[i][i] += 1.0
                if _inverse_transpose(F, G, &det):
                    bad = 1
                    bad_e = e
                    bad_q = q
                    break
                Dp = exp(-2.0 * beta * log(det))
                w = wq[e, q]
                for i in range(3):
                    for j in range(3):
                        P[i][j] = 2.0 * c1 * (F[i][j] - Dp * G[i][j])
                for a in range(8):
                    for i in range(3):
                        s = 0.0
                        for j in range(3):
                            s = s + P[i][j] * dN[q, a, j]
                        fe[e, 3 * a + i] += w * s
                if not with_tangent:
                    continue
                for a in range(8):
                    for i in range(3):
                        s = 0.0
                        for j in range(3):
                            s = s + G[i][j] * dN[q, a, j]
                        g[a][i] = s
                wd = w * Dp
                for a in range(8):
                    for b in range(8):
                        t1 = 2.0 * c1 * w * (dN[q, a, 0] * dN[q, b, 0] + dN[q, a, 1] * dN[q, b, 1]
                                             + dN[q, a, 2] * dN[q, b, 2])
                        for i in range(3):
                            for k in range(3):
                                s = (4.0 * c1 * beta * wd * g[a][i] * g[b][k]
                                     + 2.0 * c1 * wd * g[b][i] * g[a][k])
                                if i == k:
                                    s = s + t1
                                Ke[e, 3 * a + i, 3 * b + k] += s
            if bad:
                break
    if bad:
        raise NonPositiveJacobian(element=int(bad_e), qp=int(bad_q))
    return fe_arr, Ke_arr


def stress_contraction(const double[:, :, :, ::1] Y, const double[:, :, :, ::1] Z,
                       double c1, double beta):
    cdef Py_ssize_t ne = Y.shape[0], nq = Y.shape[1]
    cdef Py_ssize_t e, q, i, j
    cdef double[3][3] F
    cdef double[3][3] G
    cdef double det, Dp, s
    cdef int bad = 0
    cdef Py_ssize_t bad_e = -1, bad_q = -1
    out_arr = np.zeros((ne, nq))
    cdef double[:, ::1] out = out_arr
    with nogil:
        for e in range(ne):
            for q in range(nq):
                for i in range(3):
                    for j in range(3):
                        F[i][j] = Y[e, q, i, j]
                    F[i][i] += 1.0
                if _inverse_transpose(F, G, &det):
                    bad = 1
                    bad_e = e
                    bad_q = q
                    break
                Dp = exp(-2.0 * beta * log(det))
                s = 0.0
                for i in range(3):
                    for j in range(3):
                        s = s + 2.0 * c1 * (F[i][j] - Dp * G[i][j]) * Z[e, q, i, j]
                out[e, q] = s
            if bad:
                break
    if bad:
        raise NonPositiveJacobian(element=int(bad_e), qp=int(bad_q))
    return out_arr

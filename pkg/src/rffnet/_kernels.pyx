# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels.

The projection ``XL @ omega.T`` goes through BLAS; the phase shift, cosine,
sine and scaling then happen in one fused pass that the C compiler
vectorizes (libmvec) instead of the four full-size passes numpy needs.
``predict_scores`` instead keeps a fixed per-row loop so that a row's score
never depends on the other rows in the call.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, sqrt

cnp.import_array()


cdef void _trig(double[:, ::1] U, const double[::1] phases, double scale,
                double[:, ::1] C, double[:, ::1] S, bint with_sin) noexcept nogil:
    cdef Py_ssize_t m = U.shape[0], s = U.shape[1]
    cdef Py_ssize_t i, k
    cdef double u
    cdef double* urow
    cdef double* crow
    cdef double* srow
    cdef const double* ph = &phases[0]
    for i in range(m):
        urow = &U[i, 0]
        crow = &C[i, 0]
        for k in range(s):
            crow[k] = scale * cos(urow[k] + ph[k])
        if with_sin:
            srow = &S[i, 0]
            for k in range(s):
                srow[k] = scale * sin(urow[k] + ph[k])


def cos_features(const double[:, ::1] XL, const double[:, ::1] omega,
                 const double[::1] phases):
    cdef Py_ssize_t s = omega.shape[0]
    U = np.dot(np.asarray(XL), np.asarray(omega).T)
    cdef double[:, ::1] Uv = U
    with nogil:
        _trig(Uv, phases, sqrt(2.0 / s), Uv, Uv, False)
    return U


def cos_sin_features(const double[:, ::1] XL, const double[:, ::1] omega,
                     const double[::1] phases):
    cdef Py_ssize_t s = omega.shape[0]
    U = np.dot(np.asarray(XL), np.asarray(omega).T)
    Cout = np.empty_like(U)
    cdef double[:, ::1] Uv = U
    cdef double[:, ::1] Cv = Cout
    with nogil:
        _trig(Uv, phases, sqrt(2.0 / s), Cv, Uv, True)
    return Cout, U


def lambda_grad(const double[:, ::1] X, const double[::1] r,
                const double[:, ::1] S, const double[::1] beta,
                const double[:, ::1] omega):
    cdef Py_ssize_t m = X.shape[0], p = X.shape[1]
    cdef Py_ssize_t i, j
    cdef double ri
    # sum_k beta_k S_ik omega_kj; scale whichever operand is smaller
    Sa, Wa, ba = np.asarray(S), np.asarray(omega), np.asarray(beta)
    if m <= p:
        M = np.dot(Sa * ba, Wa)
    else:
        M = np.dot(Sa, ba[:, None] * Wa)
    cdef double[:, ::1] Mv = M
    out = np.zeros(p, dtype=np.float64)
    cdef double[::1] g = out
    with nogil:
        for i in range(m):
            ri = r[i]
            for j in range(p):
                g[j] -= ri * X[i, j] * Mv[i, j]
        for j in range(p):
            g[j] /= m
    return out


def predict_scores(const double[:, ::1] XL, const double[:, ::1] omega,
                   const double[::1] phases, const double[::1] beta):
    cdef Py_ssize_t m = XL.shape[0], p = XL.shape[1], s = omega.shape[0]
    cdef Py_ssize_t i, j, k
    cdef double tot
    cdef double scale = sqrt(2.0 / s)
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] y = out
    cdef double[::1] acc = np.empty(s, dtype=np.float64)
    with nogil:
        for i in range(m):
            for k in range(s):
                acc[k] = phases[k]
            for j in range(p):
                for k in range(s):
                    acc[k] += XL[i, j] * omega[k, j]
            tot = 0.0
            for k in range(s):
                tot += beta[k] * cos(acc[k])
            y[i] = scale * tot
    return out

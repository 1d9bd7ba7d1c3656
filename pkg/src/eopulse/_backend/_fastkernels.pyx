# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled twins of the pure-numpy kernels in ``pykernels``.

Hand-rolled complex loops beat numpy here because the matrices are tiny
(d <= 4) and the products are inherently sequential.
"""

import numpy as np


def chain_forward(double complex[:, :, :] props):
    """Cumulative left products X_n = U_n ... U_1 of a propagator stack."""
    cdef Py_ssize_t n = props.shape[0]
    cdef Py_ssize_t d = props.shape[1]
    out_arr = np.empty((n, d, d), dtype=np.complex128)
    acc_arr = np.eye(d, dtype=np.complex128)
    tmp_arr = np.empty((d, d), dtype=np.complex128)
    cdef double complex[:, :, :] out = out_arr
    cdef double complex[:, :] acc = acc_arr
    cdef double complex[:, :] tmp = tmp_arr
    cdef Py_ssize_t i, r, c, k
    cdef double complex s
    for i in range(n):
        for r in range(d):
            for c in range(d):
                s = 0
                for k in range(d):
                    s = s + props[i, r, k] * acc[k, c]
                tmp[r, c] = s
        for r in range(d):
            for c in range(d):
                acc[r, c] = tmp[r, c]
                out[i, r, c] = tmp[r, c]
    return out_arr


def chain_backward(double complex[:, :, :] props, double complex[:, :] tail):
    """Suffix products back_n = U_{n+1}^† ... U_N^† @ tail, back_N = tail."""
    cdef Py_ssize_t n = props.shape[0]
    cdef Py_ssize_t d = props.shape[1]
    out_arr = np.empty((n, d, d), dtype=np.complex128)
    acc_arr = np.empty((d, d), dtype=np.complex128)
    tmp_arr = np.empty((d, d), dtype=np.complex128)
    cdef double complex[:, :, :] out = out_arr
    cdef double complex[:, :] acc = acc_arr
    cdef double complex[:, :] tmp = tmp_arr
    cdef Py_ssize_t i, r, c, k
    cdef double complex s
    for r in range(d):
        for c in range(d):
            acc[r, c] = tail[r, c]
            out[n - 1, r, c] = tail[r, c]
    for i in range(n - 2, -1, -1):
        # acc <- props[i+1]^† @ acc
        for r in range(d):
            for c in range(d):
                s = 0
                for k in range(d):
                    s = s + props[i + 1, k, r].conjugate() * acc[k, c]
                tmp[r, c] = s
        for r in range(d):
            for c in range(d):
                acc[r, c] = tmp[r, c]
                out[i, r, c] = tmp[r, c]
    return out_arr


def evolve_density(double complex[:, :, :] props, double complex[:, :, :] kraus,
                   double complex[:, :] rho0):
    """Per slice: rho <- U rho U^†, then rho <- sum_m K_m rho K_m^†."""
    cdef Py_ssize_t n = props.shape[0]
    cdef Py_ssize_t d = props.shape[1]
    cdef Py_ssize_t m = kraus.shape[0]
    rho_arr = np.array(rho0, dtype=np.complex128, copy=True)
    tmp_arr = np.empty((d, d), dtype=np.complex128)
    nxt_arr = np.empty((d, d), dtype=np.complex128)
    cdef double complex[:, :] rho = rho_arr
    cdef double complex[:, :] tmp = tmp_arr
    cdef double complex[:, :] nxt = nxt_arr
    cdef Py_ssize_t i, j, r, c, k
    cdef double complex s
    for i in range(n):
        # tmp <- U rho
        for r in range(d):
            for c in range(d):
                s = 0
                for k in range(d):
                    s = s + props[i, r, k] * rho[k, c]
                tmp[r, c] = s
        # rho <- tmp U^†
        for r in range(d):
            for c in range(d):
                s = 0
                for k in range(d):
                    s = s + tmp[r, k] * props[i, c, k].conjugate()
                rho[r, c] = s
        if m > 0:
            for r in range(d):
                for c in range(d):
                    nxt[r, c] = 0
            for j in range(m):
                # tmp <- K_j rho
                for r in range(d):
                    for c in range(d):
                        s = 0
                        for k in range(d):
                            s = s + kraus[j, r, k] * rho[k, c]
                        tmp[r, c] = s
                # nxt += tmp K_j^†
                for r in range(d):
                    for c in range(d):
                        s = 0
                        for k in range(d):
                            s = s + tmp[r, k] * kraus[j, c, k].conjugate()
                        nxt[r, c] = nxt[r, c] + s
            for r in range(d):
                for c in range(d):
                    rho[r, c] = nxt[r, c]
    return rho_arr

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the integration kernels (see ``_kernels_py``)."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, fabs

cnp.import_array()


def window_integrate(double[::1] xs, double[::1] wx, double[::1] ps, double[::1] wp,
                     double[::1] mu, double[:, ::1] icov, double norm,
                     double[:, ::1] base, double[:, :, ::1] K, double[:, :, ::1] M,
                     double[::1] pref):
    cdef Py_ssize_t i, j, t
    cdef Py_ssize_t nx = xs.shape[0], np_ = ps.shape[0], nk = base.shape[0]
    cdef double dx, dp, q, dens, d0, d1, mass = 0.0
    cdef double a = icov[0, 0], b = icov[0, 1], c = icov[1, 1]
    fid = np.zeros(nk)
    cdef double[::1] fm = fid
    for i in range(nx):
        dx = xs[i] - mu[0]
        for j in range(np_):
            dp = ps[j] - mu[1]
            q = a * dx * dx + 2.0 * b * dx * dp + c * dp * dp
            dens = wx[i] * wp[j] * norm * exp(-0.5 * q)
            mass += dens
            for t in range(nk):
                d0 = base[t, 0] + K[t, 0, 0] * dx + K[t, 0, 1] * dp
                d1 = base[t, 1] + K[t, 1, 0] * dx + K[t, 1, 1] * dp
                q = M[t, 0, 0] * d0 * d0 + (M[t, 0, 1] + M[t, 1, 0]) * d0 * d1 + M[t, 1, 1] * d1 * d1
                fm[t] += dens * pref[t] * exp(-0.5 * q)
    return mass, fid


def mc_accumulate(double[:, ::1] samples, double x_th, double p_th, double[::1] mu,
                  double[:, ::1] base, double[:, :, ::1] K, double[:, :, ::1] M,
                  double[::1] pref):
    cdef Py_ssize_t i, t, n = samples.shape[0], nk = base.shape[0]
    cdef long n_acc = 0
    cdef double dx, dp, d0, d1, q, f
    sums = np.zeros(nk)
    sq = np.zeros(nk)
    cdef double[::1] s1 = sums
    cdef double[::1] s2 = sq
    for i in range(n):
        if fabs(samples[i, 0]) > x_th or fabs(samples[i, 1]) > p_th:
            continue
        n_acc += 1
        dx = samples[i, 0] - mu[0]
        dp = samples[i, 1] - mu[1]
        for t in range(nk):
            d0 = base[t, 0] + K[t, 0, 0] * dx + K[t, 0, 1] * dp
            d1 = base[t, 1] + K[t, 1, 0] * dx + K[t, 1, 1] * dp
            q = M[t, 0, 0] * d0 * d0 + (M[t, 0, 1] + M[t, 1, 0]) * d0 * d1 + M[t, 1, 1] * d1 * d1
            f = pref[t] * exp(-0.5 * q)
            s1[t] += f
            s2[t] += f * f
    return n_acc, sums, sq

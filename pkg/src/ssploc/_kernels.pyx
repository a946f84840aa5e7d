# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled batched log-likelihood kernels; see _kernels_py for the contract."""

from libc.math cimport exp, log, floor, sqrt

import numpy as np

BACKEND_NAME = "compiled"

cdef double SQRT_2PI = sqrt(2.0 * 3.14159265358979323846)


def gaussian_loglik(object x, object mean, object std, double eps):
    cdef double[:, ::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[:, ::1] mu = np.ascontiguousarray(mean, dtype=np.float64)
    cdef double[:, ::1] sg = np.ascontiguousarray(std, dtype=np.float64)
    cdef Py_ssize_t m = mu.shape[0], n = mu.shape[1], s = xv.shape[0]
    out = np.empty(m)
    cdef double[::1] ov = out
    cdef Py_ssize_t i, si, k
    cdef double acc, z, dens
    for i in range(m):
        acc = 0.0
        for si in range(s):
            for k in range(n):
                z = (xv[si, k] - mu[i, k]) / sg[i, k]
                dens = exp(-0.5 * z * z) / (sg[i, k] * SQRT_2PI)
                if dens < eps:
                    dens = eps
                acc += log(dens)
        ov[i] = acc
    return out


def mixture2_loglik(object x, object w, object mu, object sg, double eps):
    cdef double[:, ::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[:, :, ::1] wv = np.ascontiguousarray(w, dtype=np.float64)
    cdef double[:, :, ::1] mv = np.ascontiguousarray(mu, dtype=np.float64)
    cdef double[:, :, ::1] sv = np.ascontiguousarray(sg, dtype=np.float64)
    cdef Py_ssize_t m = wv.shape[0], n = wv.shape[1], s = xv.shape[0]
    out = np.empty(m)
    cdef double[::1] ov = out
    cdef Py_ssize_t i, si, k, c
    cdef double acc, z, dens
    for i in range(m):
        acc = 0.0
        for si in range(s):
            for k in range(n):
                dens = 0.0
                for c in range(2):
                    z = (xv[si, k] - mv[i, k, c]) / sv[i, k, c]
                    dens += wv[i, k, c] * exp(-0.5 * z * z) / (sv[i, k, c] * SQRT_2PI)
                if dens < eps:
                    dens = eps
                acc += log(dens)
        ov[i] = acc
    return out


def lognormal_loglik(object x, object shift, object mu, object sg, double eps):
    cdef double[:, ::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[:, ::1] cv = np.ascontiguousarray(shift, dtype=np.float64)
    cdef double[:, ::1] mv = np.ascontiguousarray(mu, dtype=np.float64)
    cdef double[:, ::1] sv = np.ascontiguousarray(sg, dtype=np.float64)
    cdef Py_ssize_t m = cv.shape[0], n = cv.shape[1], s = xv.shape[0]
    out = np.empty(m)
    cdef double[::1] ov = out
    cdef Py_ssize_t i, si, k
    cdef double acc, t, z, dens
    for i in range(m):
        acc = 0.0
        for si in range(s):
            for k in range(n):
                t = cv[i, k] - xv[si, k]
                if t > 0.0:
                    z = (log(t) - mv[i, k]) / sv[i, k]
                    dens = exp(-0.5 * z * z) / (sv[i, k] * t * SQRT_2PI)
                else:
                    dens = 0.0
                if dens < eps:
                    dens = eps
                acc += log(dens)
        ov[i] = acc
    return out


def histogram_loglik(object x, object first_edge, object width, object nbins,
                     object offsets, object dens, double eps):
    cdef double[:, ::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[:, ::1] fe = np.ascontiguousarray(first_edge, dtype=np.float64)
    cdef double[:, ::1] wd = np.ascontiguousarray(width, dtype=np.float64)
    cdef int[:, ::1] nb = np.ascontiguousarray(nbins, dtype=np.int32)
    cdef long long[:, ::1] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef double[::1] dv = np.ascontiguousarray(dens, dtype=np.float64)
    cdef Py_ssize_t m = fe.shape[0], n = fe.shape[1], s = xv.shape[0]
    out = np.empty(m)
    cdef double[::1] ov = out
    cdef Py_ssize_t i, si, k
    cdef long long idx
    cdef double acc, d
    for i in range(m):
        acc = 0.0
        for si in range(s):
            for k in range(n):
                idx = <long long> floor((xv[si, k] - fe[i, k]) / wd[i, k])
                if 0 <= idx < nb[i, k]:
                    d = dv[off[i, k] + idx]
                else:
                    d = 0.0
                if d < eps:
                    d = eps
                acc += log(d)
        ov[i] = acc
    return out


def kde_loglik(object x, object samples, object offsets, object counts,
               object bw, double eps):
    cdef double[:, ::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] smp = np.ascontiguousarray(samples, dtype=np.float64)
    cdef long long[:, ::1] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef int[:, ::1] cnt = np.ascontiguousarray(counts, dtype=np.int32)
    cdef double[:, ::1] bv = np.ascontiguousarray(bw, dtype=np.float64)
    cdef Py_ssize_t m = off.shape[0], n = off.shape[1], s = xv.shape[0]
    out = np.empty(m)
    cdef double[::1] ov = out
    cdef Py_ssize_t i, si, k, j
    cdef long long base
    cdef double acc, z, total, dens, h
    for i in range(m):
        acc = 0.0
        for si in range(s):
            for k in range(n):
                base = off[i, k]
                h = bv[i, k]
                total = 0.0
                for j in range(cnt[i, k]):
                    z = (xv[si, k] - smp[base + j]) / h
                    total += exp(-0.5 * z * z)
                dens = total / (cnt[i, k] * h * SQRT_2PI)
                if dens < eps:
                    dens = eps
                acc += log(dens)
        ov[i] = acc
    return out

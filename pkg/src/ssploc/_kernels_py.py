"""Numpy implementations of the batched log-likelihood kernels.

Each function scores a block of scans against every reference point at once:
given scan readings ``x`` of shape (S, N) and per-(point, feature) model
parameters of shape (M, N, ...), it returns the length-M vector whose entry i
is sum over scans and features of ln max(density_i(x), eps).

The compiled extension in ``_kernels.pyx`` mirrors these signatures; results
agree to rounding (summation order differs).
"""

from __future__ import annotations

import math

import numpy as np

BACKEND_NAME = "python"

_SQRT_2PI = math.sqrt(2.0 * math.pi)


def gaussian_loglik(x, mean, std, eps):
    z = (x[None, :, :] - mean[:, None, :]) / std[:, None, :]
    dens = np.exp(-0.5 * z * z) / (std[:, None, :] * _SQRT_2PI)
    return np.log(np.maximum(dens, eps)).sum(axis=(1, 2))


def mixture2_loglik(x, w, mu, sg, eps):
    # shapes: x (S,N); w/mu/sg (M,N,2) -> broadcast to (M,S,N,2)
    z = (x[None, :, :, None] - mu[:, None, :, :]) / sg[:, None, :, :]
    comp = w[:, None, :, :] * np.exp(-0.5 * z * z) / (sg[:, None, :, :] * _SQRT_2PI)
    dens = comp.sum(axis=3)
    return np.log(np.maximum(dens, eps)).sum(axis=(1, 2))


def lognormal_loglik(x, shift, mu, sg, eps):
    t = shift[:, None, :] - x[None, :, :]
    ok = t > 0
    t_safe = np.where(ok, t, 1.0)
    z = (np.log(t_safe) - mu[:, None, :]) / sg[:, None, :]
    dens = np.exp(-0.5 * z * z) / (sg[:, None, :] * t_safe * _SQRT_2PI)
    dens = np.where(ok, dens, 0.0)
    return np.log(np.maximum(dens, eps)).sum(axis=(1, 2))


def histogram_loglik(x, first_edge, width, nbins, offsets, dens, eps):
    idx = np.floor((x[None, :, :] - first_edge[:, None, :]) / width[:, None, :]).astype(np.int64)
    ok = (idx >= 0) & (idx < nbins[:, None, :])
    flat_idx = offsets[:, None, :] + np.clip(idx, 0, nbins[:, None, :] - 1)
    vals = np.where(ok, dens[flat_idx], 0.0)
    return np.log(np.maximum(vals, eps)).sum(axis=(1, 2))


def kde_loglik(x, samples, offsets, counts, bw, eps):
    m, n = offsets.shape
    s = x.shape[0]
    if counts.size and np.all(counts == counts.flat[0]):
        # uniform sample count: one dense broadcast
        c = int(counts.flat[0])
        block = samples.reshape(m, n, c)
        z = (x[None, :, :, None] - block[:, None, :, :]) / bw[:, None, :, None]
        dens = np.exp(-0.5 * z * z).sum(axis=3) / (c * bw[:, None, :] * _SQRT_2PI)
        return np.log(np.maximum(dens, eps)).sum(axis=(1, 2))
    out = np.zeros(m)
    for i in range(m):
        acc = 0.0
        for k in range(n):
            c = counts[i, k]
            block = samples[offsets[i, k] : offsets[i, k] + c]
            for si in range(s):
                z = (x[si, k] - block) / bw[i, k]
                d = np.exp(-0.5 * z * z).sum() / (c * bw[i, k] * _SQRT_2PI)
                acc += math.log(max(d, eps))
        out[i] = acc
    return out

# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the hot per-row kernels.

Semantics match ``pure.py`` exactly; that module documents the contracts.
Build is configured in setup.py (``-ffp-contract=off`` keeps float64
results bit-compatible with numpy's non-fused arithmetic).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, sqrt

cnp.import_array()

BACKEND = "compiled"

ctypedef fused floating:
    float
    double


cdef inline object _empty(Py_ssize_t n, Py_ssize_t m, bint is_double):
    if is_double:
        return np.zeros((n, m), dtype=np.float64)
    return np.zeros((n, m), dtype=np.float32)


def masked_softmax_forward(const floating[:, ::1] scores,
                           const unsigned char[:, ::1] allowed):
    cdef Py_ssize_t n = scores.shape[0], m = scores.shape[1]
    out_np = _empty(n, m, floating is double)
    cdef floating[:, ::1] out = out_np
    cdef Py_ssize_t i, j
    cdef floating mx, total
    cdef bint seen
    for i in range(n):
        seen = False
        mx = 0
        for j in range(m):
            if allowed[i, j] and (not seen or scores[i, j] > mx):
                mx = scores[i, j]
                seen = True
        if not seen:
            continue
        total = 0
        for j in range(m):
            if allowed[i, j]:
                out[i, j] = <floating> exp(scores[i, j] - mx)
                total += out[i, j]
        if total > 0:
            for j in range(m):
                if allowed[i, j]:
                    out[i, j] /= total
    return out_np


def masked_softmax_backward(const floating[:, ::1] probs,
                            const floating[:, ::1] grad_out):
    cdef Py_ssize_t n = probs.shape[0], m = probs.shape[1]
    out_np = _empty(n, m, floating is double)
    cdef floating[:, ::1] out = out_np
    cdef Py_ssize_t i, j
    cdef floating dot
    for i in range(n):
        dot = 0
        for j in range(m):
            dot += probs[i, j] * grad_out[i, j]
        for j in range(m):
            out[i, j] = probs[i, j] * (grad_out[i, j] - dot)
    return out_np


def layer_norm_forward(const floating[:, ::1] x,
                       const floating[::1] gain,
                       const floating[::1] bias,
                       double eps):
    cdef Py_ssize_t n = x.shape[0], d = x.shape[1]
    out_np = _empty(n, d, floating is double)
    xhat_np = _empty(n, d, floating is double)
    inv_np = _empty(1, n, floating is double).reshape(n)
    cdef floating[:, ::1] out = out_np
    cdef floating[:, ::1] xhat = xhat_np
    cdef floating[::1] inv = inv_np
    cdef Py_ssize_t i, j
    cdef floating mu, var, diff, istd
    for i in range(n):
        mu = 0
        for j in range(d):
            mu += x[i, j]
        mu /= d
        var = 0
        for j in range(d):
            diff = x[i, j] - mu
            var += diff * diff
        var /= d
        istd = <floating> (1.0 / sqrt(var + eps))
        inv[i] = istd
        for j in range(d):
            xhat[i, j] = (x[i, j] - mu) * istd
            out[i, j] = xhat[i, j] * gain[j] + bias[j]
    return out_np, xhat_np, inv_np


def layer_norm_backward(const floating[:, ::1] grad_out,
                        const floating[:, ::1] xhat,
                        const floating[::1] inv_std,
                        const floating[::1] gain):
    cdef Py_ssize_t n = grad_out.shape[0], d = grad_out.shape[1]
    gx_np = _empty(n, d, floating is double)
    ggain_np = _empty(1, d, floating is double).reshape(d)
    gbias_np = _empty(1, d, floating is double).reshape(d)
    cdef floating[:, ::1] gx = gx_np
    cdef floating[::1] ggain = ggain_np
    cdef floating[::1] gbias = gbias_np
    cdef Py_ssize_t i, j
    cdef floating m1, m2, gxh
    for i in range(n):
        m1 = 0
        m2 = 0
        for j in range(d):
            gxh = grad_out[i, j] * gain[j]
            m1 += gxh
            m2 += gxh * xhat[i, j]
            gbias[j] += grad_out[i, j]
            ggain[j] += grad_out[i, j] * xhat[i, j]
        m1 /= d
        m2 /= d
        for j in range(d):
            gxh = grad_out[i, j] * gain[j]
            gx[i, j] = inv_std[i] * (gxh - m1 - xhat[i, j] * m2)
    return gx_np, ggain_np, gbias_np


def graph_norm_forward(const floating[:, ::1] x,
                       const unsigned char[::1] valid,
                       const floating[::1] gain,
                       const floating[::1] bias,
                       double eps):
    cdef Py_ssize_t n = x.shape[0], d = x.shape[1]
    out_np = _empty(n, d, floating is double)
    xhat_np = _empty(n, d, floating is double)
    inv_np = _empty(1, d, floating is double).reshape(d)
    cdef floating[:, ::1] out = out_np
    cdef floating[:, ::1] xhat = xhat_np
    cdef floating[::1] inv = inv_np
    cdef Py_ssize_t i, j, n_valid = 0
    cdef floating mu, var, diff
    for i in range(n):
        if valid[i]:
            n_valid += 1
    for j in range(d):
        mu = 0
        if n_valid > 0:
            for i in range(n):
                if valid[i]:
                    mu += x[i, j]
            mu /= n_valid
        var = 0
        if n_valid > 0:
            for i in range(n):
                if valid[i]:
                    diff = x[i, j] - mu
                    var += diff * diff
            var /= n_valid
        inv[j] = <floating> (1.0 / sqrt(var + eps))
        for i in range(n):
            if valid[i]:
                xhat[i, j] = (x[i, j] - mu) * inv[j]
                out[i, j] = xhat[i, j] * gain[j] + bias[j]
    return out_np, xhat_np, inv_np


def graph_norm_backward(const floating[:, ::1] grad_out,
                        const floating[:, ::1] xhat,
                        const floating[::1] inv_std,
                        const floating[::1] gain,
                        const unsigned char[::1] valid):
    cdef Py_ssize_t n = grad_out.shape[0], d = grad_out.shape[1]
    gx_np = _empty(n, d, floating is double)
    ggain_np = _empty(1, d, floating is double).reshape(d)
    gbias_np = _empty(1, d, floating is double).reshape(d)
    cdef floating[:, ::1] gx = gx_np
    cdef floating[::1] ggain = ggain_np
    cdef floating[::1] gbias = gbias_np
    cdef Py_ssize_t i, j, n_valid = 0
    cdef floating m1, m2, gxh
    for i in range(n):
        if valid[i]:
            n_valid += 1
    if n_valid == 0:
        n_valid = 1
    for j in range(d):
        m1 = 0
        m2 = 0
        for i in range(n):
            if valid[i]:
                gxh = grad_out[i, j] * gain[j]
                m1 += gxh
                m2 += gxh * xhat[i, j]
                gbias[j] += grad_out[i, j]
                ggain[j] += grad_out[i, j] * xhat[i, j]
        m1 /= n_valid
        m2 /= n_valid
        for i in range(n):
            if valid[i]:
                gxh = grad_out[i, j] * gain[j]
                gx[i, j] = inv_std[j] * (gxh - m1 - xhat[i, j] * m2)
    return gx_np, ggain_np, gbias_np


def adam_update(floating[::1] param,
                const floating[::1] grad,
                floating[::1] m,
                floating[::1] v,
                long step,
                double lr,
                double beta1,
                double beta2,
                double eps):
    cdef Py_ssize_t i, n = param.shape[0]
    cdef double c1 = 1.0 / (1.0 - beta1**step)
    cdef double c2 = 1.0 / (1.0 - beta2**step)
    cdef double alpha = lr * c1
    for i in range(n):
        m[i] = <floating> (beta1 * m[i] + (1.0 - beta1) * grad[i])
        v[i] = <floating> (beta2 * v[i] + (1.0 - beta2) * (grad[i] * grad[i]))
        param[i] -= <floating> (alpha * m[i] / (sqrt(v[i] * c2) + eps))

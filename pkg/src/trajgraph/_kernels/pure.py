"""Pure numpy implementations of the hot per-row kernels.

This module is the reference backend: the compiled extension in
``_speedups.pyx`` implements the same functions with identical semantics
and is preferred at import time when available.  Keep the two in sync;
``tests/test_kernels.py`` cross-checks them on random inputs.

Conventions shared by both backends:
  * ``allowed`` / ``valid`` masks are uint8 (0/1) arrays.
  * fully masked softmax rows come back as exact zero rows, never NaN;
  * zero-variance rows/features normalize to zero (epsilon denominator);
  * all functions allocate fresh outputs except ``adam_update`` which
    mutates ``param``, ``m`` and ``v`` in place.
"""

import numpy as np

BACKEND = "pure"


def masked_softmax_forward(scores, allowed):
    """Row softmax of ``scores`` restricted to ``allowed`` entries."""
    neg = np.where(allowed.astype(bool), scores, -np.inf)
    mx = neg.max(axis=1, keepdims=True)
    any_allowed = np.isfinite(mx)
    # max of a fully masked row is -inf; neutralize it before exp
    safe_mx = np.where(any_allowed, mx, 0.0)
    e = np.exp(neg - safe_mx, where=np.isfinite(neg), out=np.zeros_like(scores))
    denom = e.sum(axis=1, keepdims=True)
    denom = np.where(denom > 0.0, denom, 1.0)
    return e / denom


def masked_softmax_backward(probs, grad_out):
    dot = (probs * grad_out).sum(axis=1, keepdims=True)
    return probs * (grad_out - dot)


def layer_norm_forward(x, gain, bias, eps):
    mu = x.mean(axis=1, keepdims=True)
    var = ((x - mu) ** 2).mean(axis=1, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + eps)
    xhat = (x - mu) * inv_std
    out = xhat * gain + bias
    return out, xhat, inv_std[:, 0]


def layer_norm_backward(grad_out, xhat, inv_std, gain):
    grad_bias = grad_out.sum(axis=0)
    grad_gain = (grad_out * xhat).sum(axis=0)
    gxh = grad_out * gain
    m1 = gxh.mean(axis=1, keepdims=True)
    m2 = (gxh * xhat).mean(axis=1, keepdims=True)
    grad_x = inv_std[:, None] * (gxh - m1 - xhat * m2)
    return grad_x, grad_gain, grad_bias


def graph_norm_forward(x, valid, gain, bias, eps):
    v = valid.astype(bool)
    n_valid = int(v.sum())
    xv = x[v]
    mu = xv.mean(axis=0) if n_valid else np.zeros(x.shape[1], dtype=x.dtype)
    var = ((xv - mu) ** 2).mean(axis=0) if n_valid else np.zeros_like(mu)
    inv_std = 1.0 / np.sqrt(var + eps)
    xhat = np.zeros_like(x)
    xhat[v] = (xv - mu) * inv_std
    out = np.zeros_like(x)
    out[v] = xhat[v] * gain + bias
    return out, xhat, inv_std


def graph_norm_backward(grad_out, xhat, inv_std, gain, valid):
    v = valid.astype(bool)
    n_valid = max(int(v.sum()), 1)
    g = np.where(v[:, None], grad_out, 0.0)
    grad_bias = g.sum(axis=0)
    grad_gain = (g * xhat).sum(axis=0)
    gxh = g * gain
    m1 = gxh.sum(axis=0) / n_valid
    m2 = (gxh * xhat).sum(axis=0) / n_valid
    grad_x = np.where(v[:, None], inv_std * (gxh - m1 - xhat * m2), 0.0)
    return grad_x, grad_gain, grad_bias


def adam_update(param, grad, m, v, step, lr, beta1, beta2, eps):
    """One bias-corrected Adam update; mutates param, m, v in place."""
    c1 = 1.0 / (1.0 - beta1**step)
    c2 = 1.0 / (1.0 - beta2**step)
    alpha = lr * c1
    m *= beta1
    m += (1.0 - beta1) * grad
    v *= beta2
    v += (1.0 - beta2) * (grad * grad)
    param -= alpha * m / (np.sqrt(v * c2) + eps)

"""Numba-compiled twins of the reference kernels.

Same contracts as :mod:`ordmnar.kernels.reference`, written as row loops so
numba can compile them. Compiled lazily with on-disk caching, so worker
processes reuse the compiled artifacts.
"""

from __future__ import annotations

import numpy as np
from numba import njit

__all__ = [
    "po_loglik",
    "po_derivs",
    "logit_loglik",
    "logit_derivs",
    "estep_weights",
    "obs_loglik",
]


@njit(cache=True, inline="always")
def _sigmoid(t):
    if t >= 0.0:
        return 1.0 / (1.0 + np.exp(-t))
    e = np.exp(t)
    return e / (1.0 + e)


@njit(cache=True, inline="always")
def _log_sigmoid(t):
    if t >= 0.0:
        return -np.log1p(np.exp(-t))
    return t - np.log1p(np.exp(t))


@njit(cache=True)
def po_loglik(theta, beta, y, X, w):
    J = theta.shape[0] + 1
    m = y.shape[0]
    xb = np.dot(X, beta)
    f = 0.0
    for i in range(m):
        yi = y[i]
        g_hi = 1.0 if yi == 1 else _sigmoid(theta[yi - 2] + xb[i])
        g_lo = 0.0 if yi == J else _sigmoid(theta[yi - 1] + xb[i])
        pi = g_hi - g_lo
        if pi <= 0.0:
            return -np.inf, False
        f += w[i] * np.log(pi)
    return f, True


@njit(cache=True)
def po_derivs(theta, beta, y, X, w):
    J = theta.shape[0] + 1
    m = y.shape[0]
    p = beta.shape[0]
    d = J - 1 + p
    score = np.zeros(d)
    nh = np.zeros((d, d))
    f = 0.0
    xbv = np.dot(X, beta)
    for i in range(m):
        xb = xbv[i]
        yi = y[i]
        g_hi = 1.0 if yi == 1 else _sigmoid(theta[yi - 2] + xb)
        g_lo = 0.0 if yi == J else _sigmoid(theta[yi - 1] + xb)
        pi = g_hi - g_lo
        if pi <= 0.0:
            return -np.inf, np.zeros(d), np.zeros((d, d)), False
        wi = w[i]
        f += wi * np.log(pi)

        a = 0.0 if yi == 1 else g_hi * (1.0 - g_hi)
        b = 0.0 if yi == J else g_lo * (1.0 - g_lo)
        ap = a * (1.0 - 2.0 * g_hi)
        bp = b * (1.0 - 2.0 * g_lo)
        pi2 = pi * pi
        h11 = (ap * pi - a * a) / pi2
        h22 = (-bp * pi - b * b) / pi2
        h12 = (a * b) / pi2
        u = wi * (a - b) / pi

        if yi > 1:
            i1 = yi - 2
            score[i1] += wi * a / pi
            nh[i1, i1] -= wi * h11
            for k in range(p):
                nh[i1, J - 1 + k] -= wi * (h11 + h12) * X[i, k]
        if yi < J:
            i2 = yi - 1
            score[i2] -= wi * b / pi
            nh[i2, i2] -= wi * h22
            for k in range(p):
                nh[i2, J - 1 + k] -= wi * (h22 + h12) * X[i, k]
        if yi > 1 and yi < J:
            nh[yi - 2, yi - 1] -= wi * h12
            nh[yi - 1, yi - 2] -= wi * h12

        c = wi * (h11 + 2.0 * h12 + h22)
        for k in range(p):
            score[J - 1 + k] += u * X[i, k]
            for l in range(p):
                nh[J - 1 + k, J - 1 + l] -= c * X[i, k] * X[i, l]

    for k in range(J - 1, d):
        for j in range(J - 1):
            nh[k, j] = nh[j, k]
    return f, score, nh, True


@njit(cache=True)
def logit_loglik(alpha, Z, r, w):
    m = Z.shape[0]
    u = np.dot(Z, alpha)
    f = 0.0
    for i in range(m):
        f += w[i] * (r[i] * _log_sigmoid(u[i]) + (1.0 - r[i]) * _log_sigmoid(-u[i]))
    return f


@njit(cache=True)
def logit_derivs(alpha, Z, r, w):
    m = Z.shape[0]
    u = np.dot(Z, alpha)
    f = 0.0
    s = np.empty(m)
    v = np.empty(m)
    for i in range(m):
        pr = _sigmoid(u[i])
        f += w[i] * (r[i] * _log_sigmoid(u[i]) + (1.0 - r[i]) * _log_sigmoid(-u[i]))
        s[i] = w[i] * (r[i] - pr)
        v[i] = np.sqrt(w[i] * pr * (1.0 - pr))
    score = np.dot(Z.T, s)
    Zv = Z * v.reshape(m, 1)
    nh = np.dot(Zv.T, Zv)
    return f, score, nh


@njit(cache=True)
def estep_weights(theta, beta, alpha, y, X, Z, starts):
    """Posterior candidate weights: 1 for singleton (observed) groups,
    normalized pi_j * sigmoid(z_j'alpha) within each expanded group.

    Returns (weights, ok); ok is False when an observed row's category
    probability is non-positive or a group's denominator underflows.
    """
    J = theta.shape[0] + 1
    m = y.shape[0]
    n = starts.shape[0] - 1
    xb = np.dot(X, beta)
    u = np.dot(Z, alpha)
    w = np.ones(m)
    for g in range(n):
        lo = starts[g]
        hi = starts[g + 1]
        if hi - lo == 1:
            yi = y[lo]
            g_hi = 1.0 if yi == 1 else _sigmoid(theta[yi - 2] + xb[lo])
            g_lo = 0.0 if yi == J else _sigmoid(theta[yi - 1] + xb[lo])
            if g_hi - g_lo <= 0.0:
                return w, False
            continue
        total = 0.0
        for i in range(lo, hi):
            yi = y[i]
            g_hi = 1.0 if yi == 1 else _sigmoid(theta[yi - 2] + xb[i])
            g_lo = 0.0 if yi == J else _sigmoid(theta[yi - 1] + xb[i])
            t = (g_hi - g_lo) * _sigmoid(u[i])
            w[i] = t
            total += t
        if total <= 0.0:
            return w, False
        for i in range(lo, hi):
            w[i] /= total
    return w, True


@njit(cache=True)
def obs_loglik(theta, beta, alpha, y, X, Z, starts):
    """Observed-data log-likelihood: log pi + log(1 - p) over singleton
    groups plus log sum_j pi_j p_j over expanded groups; -inf when
    infeasible."""
    J = theta.shape[0] + 1
    n = starts.shape[0] - 1
    xb = np.dot(X, beta)
    u = np.dot(Z, alpha)
    f = 0.0
    for g in range(n):
        lo = starts[g]
        hi = starts[g + 1]
        if hi - lo == 1:
            yi = y[lo]
            g_hi = 1.0 if yi == 1 else _sigmoid(theta[yi - 2] + xb[lo])
            g_lo = 0.0 if yi == J else _sigmoid(theta[yi - 1] + xb[lo])
            pi = g_hi - g_lo
            if pi <= 0.0:
                return -np.inf
            f += np.log(pi) + _log_sigmoid(-u[lo])
        else:
            total = 0.0
            for i in range(lo, hi):
                yi = y[i]
                g_hi = 1.0 if yi == 1 else _sigmoid(theta[yi - 2] + xb[i])
                g_lo = 0.0 if yi == J else _sigmoid(theta[yi - 1] + xb[i])
                total += (g_hi - g_lo) * _sigmoid(u[i])
            if total <= 0.0:
                return -np.inf
            f += np.log(total)
    return f


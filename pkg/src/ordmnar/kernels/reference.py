"""Pure-numpy evaluation kernels.

These are the reference implementations of the weighted log-likelihood,
score, and negative-Hessian evaluations for the two component models:

* descending cumulative-logit (proportional odds): logit P(Y > j) = theta_j
  + x'beta for j = 1..J-1, so theta must be strictly decreasing for every
  category probability to be positive;
* weighted binary logistic regression.

The jit backend in :mod:`ordmnar.kernels.jit` implements the same
signatures row-by-row under numba; agreement between the two is asserted in
the test suite. All arrays are float64; responses are int64 codes 1..J.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit, log_expit

__all__ = [
    "po_loglik",
    "po_derivs",
    "logit_loglik",
    "logit_derivs",
    "estep_weights",
    "obs_loglik",
]


def _po_parts(theta, beta, y, X):
    """Per-row pieces of the category probability pi_{i, y_i}.

    Returns (g_hi, g_lo, pi) where g_hi = sigma(eta_{y-1}) with g_0 = 1 and
    g_lo = sigma(eta_y) with g_J = 0.
    """
    J = theta.shape[0] + 1
    xb = X @ beta
    m1 = y > 1
    mJ = y < J
    g_hi = np.ones(y.shape[0])
    g_lo = np.zeros(y.shape[0])
    g_hi[m1] = expit(theta[y[m1] - 2] + xb[m1])
    g_lo[mJ] = expit(theta[y[mJ] - 1] + xb[mJ])
    return g_hi, g_lo, g_hi - g_lo


def po_loglik(theta, beta, y, X, w):
    """Weighted log-likelihood of the cumulative-logit model.

    Returns (value, feasible). Infeasible parameter points (some category
    probability <= 0, including by underflow) report value -inf.
    """
    _, _, pi = _po_parts(theta, beta, y, X)
    if np.any(pi <= 0.0):
        return -np.inf, False
    return float(np.dot(w, np.log(pi))), True


def po_derivs(theta, beta, y, X, w):
    """Weighted log-likelihood, score, and negative Hessian in (theta, beta).

    Returns (value, score, neg_hess, feasible); the derivative arrays are
    zero when infeasible.
    """
    J = theta.shape[0] + 1
    p = beta.shape[0]
    d = J - 1 + p
    g_hi, g_lo, pi = _po_parts(theta, beta, y, X)
    if np.any(pi <= 0.0):
        return -np.inf, np.zeros(d), np.zeros((d, d)), False

    f = float(np.dot(w, np.log(pi)))
    m1 = y > 1
    mJ = y < J
    a = np.where(m1, g_hi * (1.0 - g_hi), 0.0)
    b = np.where(mJ, g_lo * (1.0 - g_lo), 0.0)
    ap = a * (1.0 - 2.0 * g_hi)
    bp = b * (1.0 - 2.0 * g_lo)
    i1 = y - 2  # theta index for the upper cut, valid where m1
    i2 = y - 1  # theta index for the lower cut, valid where mJ

    score = np.zeros(d)
    np.add.at(score, i1[m1], (w * a / pi)[m1])
    np.add.at(score, i2[mJ], -(w * b / pi)[mJ])
    score[J - 1:] = X.T @ (w * (a - b) / pi)

    # Second derivatives of log pi in the two active linear predictors.
    pi2 = pi * pi
    h11 = (ap * pi - a * a) / pi2
    h22 = (-bp * pi - b * b) / pi2
    h12 = (a * b) / pi2

    nh = np.zeros((d, d))
    tt = nh[: J - 1, : J - 1]
    np.add.at(tt, (i1[m1], i1[m1]), -(w * h11)[m1])
    np.add.at(tt, (i2[mJ], i2[mJ]), -(w * h22)[mJ])
    both = m1 & mJ
    np.add.at(tt, (i1[both], i2[both]), -(w * h12)[both])
    np.add.at(tt, (i2[both], i1[both]), -(w * h12)[both])

    tb = np.zeros((J - 1, p))
    np.add.at(tb, i1[m1], -((w * (h11 + h12))[m1, None] * X[m1]))
    np.add.at(tb, i2[mJ], -((w * (h22 + h12))[mJ, None] * X[mJ]))
    nh[: J - 1, J - 1:] = tb
    nh[J - 1:, : J - 1] = tb.T

    c = w * (h11 + 2.0 * h12 + h22)
    nh[J - 1:, J - 1:] = -np.einsum("i,ij,ik->jk", c, X, X)
    return f, score, nh, True


def logit_loglik(alpha, Z, r, w):
    """Weighted log-likelihood of a binary logistic model."""
    u = Z @ alpha
    return float(np.dot(w, r * log_expit(u) + (1.0 - r) * log_expit(-u)))


def logit_derivs(alpha, Z, r, w):
    """Weighted log-likelihood, score, and negative Hessian in alpha."""
    u = Z @ alpha
    pr = expit(u)
    f = float(np.dot(w, r * log_expit(u) + (1.0 - r) * log_expit(-u)))
    score = Z.T @ (w * (r - pr))
    v = w * pr * (1.0 - pr)
    nh = Z.T @ (v[:, None] * Z)
    return f, score, nh


def estep_weights(theta, beta, alpha, y, X, Z, starts):
    """Posterior candidate weights: 1 for singleton (observed) groups,
    normalized pi_j * sigmoid(z_j'alpha) within each expanded group.

    Returns (weights, ok); ok is False when an observed row's category
    probability is non-positive or a group's denominator underflows.
    """
    _, _, pi = _po_parts(theta, beta, y, X)
    sizes = np.diff(starts)
    singleton = np.repeat(sizes == 1, sizes)
    if np.any(pi[singleton] <= 0.0):
        return np.ones(y.shape[0]), False
    t = np.where(singleton, 1.0, pi * expit(Z @ alpha))
    sums = np.add.reduceat(t, starts[:-1])
    if np.any(sums[sizes > 1] <= 0.0):
        return np.ones(y.shape[0]), False
    w = t / np.repeat(sums, sizes)
    w[singleton] = 1.0
    return w, True


def obs_loglik(theta, beta, alpha, y, X, Z, starts):
    """Observed-data log-likelihood: log pi + log(1 - p) over singleton
    groups plus log sum_j pi_j p_j over expanded groups; -inf when
    infeasible."""
    _, _, pi = _po_parts(theta, beta, y, X)
    sizes = np.diff(starts)
    singleton = np.repeat(sizes == 1, sizes)
    if np.any(pi[singleton] <= 0.0):
        return -np.inf
    u = Z @ alpha
    f = float(np.sum(np.log(pi[singleton]) + log_expit(-u[singleton])))
    t = np.where(singleton, 0.0, pi * expit(u))
    sums = np.add.reduceat(t, starts[:-1])[sizes > 1]
    if np.any(sums <= 0.0):
        return -np.inf
    return f + float(np.sum(np.log(sums)))

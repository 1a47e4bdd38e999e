"""Pure-numpy implementations of the numeric hot loops.

These are the fallback kernels used when the numba backend is disabled or
unavailable (``FEATRANK_BACKEND=numpy``).  Coordinate sweeps are inherently
sequential, so the loops over coordinates stay in Python with vectorized
per-coordinate work; results agree with the numba backend up to float
summation order.
"""

from __future__ import annotations

import numpy as np


def relieff_weights(X, Xn, y, n_classes, k, miss_coef):
    """Accumulate neighbor-based relevance weights over a full pass.

    X is the distance space, Xn the range-normalized feature space used for
    the per-feature discrepancy.  ``miss_coef[a, c]`` is the prior weight
    applied to misses of class c for an instance of class a.  Ties in
    distance break toward the smaller sample index.
    """
    n, p = X.shape
    w = np.zeros(p)
    members = [np.flatnonzero(y == c) for c in range(n_classes)]
    inv = 1.0 / (n * k)
    for i in range(n):
        d2 = ((X - X[i]) ** 2).sum(axis=1)
        yi = int(y[i])
        for c in range(n_classes):
            cand = members[c]
            if c == yi:
                cand = cand[cand != i]
            order = np.lexsort((cand, d2[cand]))
            near = cand[order[: min(k, cand.size)]]
            contrib = np.abs(Xn[near] - Xn[i]).sum(axis=0) * inv
            if c == yi:
                w -= contrib
            else:
                w += miss_coef[yi, c] * contrib
    return w


def cd_weighted_lasso(X, w, z, lam, intercept, beta, max_sweeps, tol):
    """Cyclic coordinate descent on the weighted lasso surrogate.

    Minimizes 0.5 * sum(w_i (z_i - b - x_i.beta)^2) + lam * l1(beta), with the
    intercept unpenalized.  Warm-started from (intercept, beta); stops when
    the largest coefficient move in a sweep drops below tol.
    """
    n, p = X.shape
    beta = beta.copy()
    intercept = float(intercept)
    r = z - intercept - X @ beta
    xw2 = w @ (X * X)
    sw = w.sum()
    sweeps = 0
    for _ in range(max_sweeps):
        sweeps += 1
        dmax = 0.0
        db = float(w @ r) / sw
        if db != 0.0:
            intercept += db
            r -= db
            dmax = abs(db)
        for j in range(p):
            if xw2[j] <= 0.0:
                continue
            rho = float((w * X[:, j]) @ r) + xw2[j] * beta[j]
            if rho > lam:
                bn = (rho - lam) / xw2[j]
            elif rho < -lam:
                bn = (rho + lam) / xw2[j]
            else:
                bn = 0.0
            d = bn - beta[j]
            if d != 0.0:
                r -= d * X[:, j]
                beta[j] = bn
                if abs(d) > dmax:
                    dmax = abs(d)
        if dmax < tol:
            break
    return intercept, beta, sweeps


def spike_slab_feature_pass(X, lx, phi, c, ea, eb, q, m1, v1, m0, v0,
                            inv_tau0_sq, inv_tau1_sq, half_log_tau_ratio,
                            logit_pi):
    """One coordinate pass over the two-component posterior factors.

    Updates eb, q, m1, v1, m0, v0 and the running linear predictor mean ea in
    place.  lx = X scaled by the per-observation bound curvatures, phi the
    curvature-weighted column squared norms, c the fixed X^T (y - 1/2).
    """
    n, p = X.shape
    for j in range(p):
        lea = float(lx[:, j] @ ea)
        g = c[j] - 2.0 * (lea - eb[j] * phi[j])
        v1j = 1.0 / (inv_tau1_sq + 2.0 * phi[j])
        v0j = 1.0 / (inv_tau0_sq + 2.0 * phi[j])
        m1j = g * v1j
        m0j = g * v0j
        logit = (logit_pi + half_log_tau_ratio
                 + 0.5 * (np.log(v1j) - np.log(v0j))
                 + 0.5 * g * g * (v1j - v0j))
        if logit >= 0.0:
            qj = 1.0 / (1.0 + np.exp(-logit))
        else:
            e = np.exp(logit)
            qj = e / (1.0 + e)
        ebn = qj * m1j + (1.0 - qj) * m0j
        d = ebn - eb[j]
        if d != 0.0:
            ea += d * X[:, j]
        eb[j] = ebn
        q[j] = qj
        m1[j] = m1j
        v1[j] = v1j
        m0[j] = m0j
        v0[j] = v0j

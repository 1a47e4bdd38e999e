"""Numba-compiled implementations of the numeric hot loops.

Same contracts as ``_numpy_impl``; see that module for the semantics. The
loops here are written out explicitly so numba can compile them to tight
machine code.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def relieff_weights(X, Xn, y, n_classes, k, miss_coef):
    n, p = X.shape
    w = np.zeros(p)
    best_d = np.empty((n_classes, k))
    best_i = np.empty((n_classes, k), np.int64)
    count = np.zeros(n_classes, np.int64)
    inv = 1.0 / (n * k)
    for i in range(n):
        for c in range(n_classes):
            count[c] = 0
        for t in range(n):
            if t == i:
                continue
            d = 0.0
            for j in range(p):
                diff = X[i, j] - X[t, j]
                d += diff * diff
            c = y[t]
            m = count[c]
            if m < k:
                pos = m
                while pos > 0 and (best_d[c, pos - 1] > d
                                   or (best_d[c, pos - 1] == d
                                       and best_i[c, pos - 1] > t)):
                    best_d[c, pos] = best_d[c, pos - 1]
                    best_i[c, pos] = best_i[c, pos - 1]
                    pos -= 1
                best_d[c, pos] = d
                best_i[c, pos] = t
                count[c] = m + 1
            elif (d < best_d[c, k - 1]
                  or (d == best_d[c, k - 1] and t < best_i[c, k - 1])):
                pos = k - 1
                while pos > 0 and (best_d[c, pos - 1] > d
                                   or (best_d[c, pos - 1] == d
                                       and best_i[c, pos - 1] > t)):
                    best_d[c, pos] = best_d[c, pos - 1]
                    best_i[c, pos] = best_i[c, pos - 1]
                    pos -= 1
                best_d[c, pos] = d
                best_i[c, pos] = t
        yi = y[i]
        for c in range(n_classes):
            m = count[c]
            if m > k:
                m = k
            if c == yi:
                for u in range(m):
                    h = best_i[c, u]
                    for j in range(p):
                        w[j] -= abs(Xn[i, j] - Xn[h, j]) * inv
            else:
                coef = miss_coef[yi, c]
                for u in range(m):
                    t2 = best_i[c, u]
                    for j in range(p):
                        w[j] += coef * abs(Xn[i, j] - Xn[t2, j]) * inv
    return w


@njit(cache=True)
def cd_weighted_lasso(X, w, z, lam, intercept, beta, max_sweeps, tol):
    n, p = X.shape
    beta = beta.copy()
    r = np.empty(n)
    for i in range(n):
        s = intercept
        for j in range(p):
            s += X[i, j] * beta[j]
        r[i] = z[i] - s
    xw2 = np.empty(p)
    for j in range(p):
        s = 0.0
        for i in range(n):
            s += w[i] * X[i, j] * X[i, j]
        xw2[j] = s
    sw = 0.0
    for i in range(n):
        sw += w[i]
    sweeps = 0
    for _ in range(max_sweeps):
        sweeps += 1
        dmax = 0.0
        num = 0.0
        for i in range(n):
            num += w[i] * r[i]
        db = num / sw
        if db != 0.0:
            intercept += db
            for i in range(n):
                r[i] -= db
            if abs(db) > dmax:
                dmax = abs(db)
        for j in range(p):
            if xw2[j] <= 0.0:
                continue
            rho = 0.0
            for i in range(n):
                rho += w[i] * X[i, j] * r[i]
            rho += xw2[j] * beta[j]
            if rho > lam:
                bn = (rho - lam) / xw2[j]
            elif rho < -lam:
                bn = (rho + lam) / xw2[j]
            else:
                bn = 0.0
            d = bn - beta[j]
            if d != 0.0:
                for i in range(n):
                    r[i] -= d * X[i, j]
                beta[j] = bn
                if abs(d) > dmax:
                    dmax = abs(d)
        if dmax < tol:
            break
    return intercept, beta, sweeps


@njit(cache=True)
def spike_slab_feature_pass(X, lx, phi, c, ea, eb, q, m1, v1, m0, v0,
                            inv_tau0_sq, inv_tau1_sq, half_log_tau_ratio,
                            logit_pi):
    n, p = X.shape
    for j in range(p):
        lea = 0.0
        for i in range(n):
            lea += lx[i, j] * ea[i]
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
            for i in range(n):
                ea[i] += d * X[i, j]
        eb[j] = ebn
        q[j] = qj
        m1[j] = m1j
        v1[j] = v1j
        m0[j] = m0j
        v0[j] = v0j

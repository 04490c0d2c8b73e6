"""Fused per-round kernel loops (numba); numpy versions in kernels.py are the reference."""
import math

import numba
import numpy as np

KIND_POLY = 0
KIND_GAUSS = 1


@numba.njit(cache=True)
def margin(P, sq, coef, n, x, xsq, kind, param, normalized):
    """sum_j coef_j k(P_j, x) over the first n stored rows."""
    d = x.shape[0]
    s = 0.0
    if kind == KIND_GAUSS:
        g = -0.5 / (param * param)
        for j in range(n):
            dot = 0.0
            for k in range(d):
                dot += P[j, k] * x[k]
            d2 = sq[j] + xsq - 2.0 * dot
            if d2 < 0.0:
                d2 = 0.0
            s += coef[j] * math.exp(d2 * g)
        return s
    p = int(param)
    for j in range(n):
        dot = 0.0
        for k in range(d):
            dot += P[j, k] * x[k]
        v = dot ** p
        if normalized:
            den = math.sqrt((sq[j] ** p) * (xsq ** p))
            v = v / den if den > 0.0 else 0.0
        s += coef[j] * v
    return s


def kind_code(k):
    return KIND_GAUSS if k.kind == "gaussian" else KIND_POLY


def warmup():
    P = np.zeros((1, 1))
    z = np.zeros(1)
    margin(P, z, z, 1, z, 0.0, KIND_GAUSS, 1.0, False)
    margin(P, z, z, 1, z, 0.0, KIND_POLY, 2.0, False)


@numba.njit(cache=True)
def bpas_scan(P, sq, coef, n, x, xsq, kind, param, normalized, y, kxx, C):
    """Fused BPAS candidate scan; returns (r, tau_r, margin) for the argmin-Q removal."""
    d = x.shape[0]
    krow = np.empty(n)
    m = 0.0
    p = int(param)
    for j in range(n):
        dot = 0.0
        for k in range(d):
            dot += P[j, k] * x[k]
        if kind == KIND_GAUSS:
            d2 = sq[j] + xsq - 2.0 * dot
            if d2 < 0.0:
                d2 = 0.0
            v = math.exp(-d2 / (2.0 * param * param))
        else:
            v = dot ** p
            if normalized:
                den = math.sqrt((sq[j] ** p) * (xsq ** p))
                v = v / den if den > 0.0 else 0.0
        krow[j] = v
        m += coef[j] * v
    best = 0
    best_q = np.inf
    best_tau = 0.0
    for j in range(n):
        if kind == KIND_GAUSS:
            ks = 1.0
        elif normalized:
            ks = 1.0 if sq[j] > 0.0 else 0.0
        else:
            ks = sq[j] ** p
        c = coef[j]
        loss_r = 1.0 - y * (m - c * krow[j])
        if loss_r < 0.0:
            loss_r = 0.0
        tau = min(C, loss_r / kxx)
        after = loss_r - tau * kxx
        if after < 0.0:
            after = 0.0
        q = 0.5 * (c * c * ks - 2.0 * c * tau * y * krow[j] + tau * tau * kxx) + C * after
        if q < best_q:
            best_q = q
            best = j
            best_tau = tau
    return best, best_tau, m

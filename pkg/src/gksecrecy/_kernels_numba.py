"""Numba-compiled evaluation kernels.

Scalar-loop twins of the pure-numpy lane with identical semantics and branch
thresholds, JIT-compiled with caching. Selection between lanes happens in
an accelerator shim at import time; this module must only be imported when
numba is installed and enabled.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

BACKEND_NAME = "numba"

_TAIL_EPS = 1e-17
_EXP_UNDERFLOW = 745.0


@njit(cache=True)
def _reg_lower(s, z):
    """Regularized lower incomplete gamma P(s, z) for integer s, scalar z >= 0."""
    if z <= 0.0:
        return 0.0
    if z < s + 1.0:
        lt = s * math.log(z) - z - math.lgamma(s + 1.0)
        if lt < -_EXP_UNDERFLOW:
            return 0.0
        term = math.exp(lt)
        acc = term
        i = s
        while True:
            i += 1
            term = term * z / i
            acc += term
            if term <= acc * _TAIL_EPS:
                break
        return acc
    t = math.exp(-z)
    q = 0.0
    for n in range(s):
        q += t
        t = t * z / (n + 1)
    return 1.0 - q


@njit(cache=True)
def _delta_q_right(s, a, b):
    """Q(s, a) - Q(s, b) for s + 1 <= a <= b."""
    if a >= _EXP_UNDERFLOW:
        return 0.0
    t = math.exp(-a)
    lr = math.log(b / a)
    d = b - a
    acc = 0.0
    for n in range(s):
        # n < s <= a forces n*lr - d <= 0, so every term is nonnegative.
        acc += t * (-math.expm1(n * lr - d))
        t = t * a / (n + 1)
    return acc


@njit(cache=True)
def _delta_p_series(s, a, b):
    """P(s, b) - P(s, a) for 0 < a <= b <= s + 1."""
    if b <= a:
        return 0.0
    lr = math.log(b / a)
    d = b - a
    lga = math.lgamma(s + 1.0)
    lt_a = s * math.log(a) - a - lga
    t_a = math.exp(lt_a) if lt_a > -_EXP_UNDERFLOW else 0.0
    lt_b = s * math.log(b) - b - lga
    t_b = math.exp(lt_b) if lt_b > -_EXP_UNDERFLOW else 0.0
    acc = 0.0
    i = s
    while i < s + 200:
        arg = i * lr - d
        if arg < 30.0:
            di = t_a * math.expm1(arg)
        else:
            di = t_b - t_a
        acc += di
        i += 1
        t_a = t_a * a / i
        t_b = t_b * b / i
        if i > s + 1 and abs(di) <= _TAIL_EPS * abs(acc):
            break
    return acc


@njit(cache=True)
def _delta_reg_lower(s, zlo, zhi):
    """P(s, zhi) - P(s, zlo) for zhi >= zlo >= 0 without cancellation."""
    if zhi <= zlo:
        return 0.0
    if zlo <= 0.0:
        return _reg_lower(s, zhi)
    boundary = s + 1.0
    if zlo >= boundary:
        return _delta_q_right(s, zlo, zhi)
    if zhi <= boundary:
        return _delta_p_series(s, zlo, zhi)
    return _delta_p_series(s, zlo, boundary) + _delta_q_right(s, boundary, zhi)


@njit(cache=True)
def mix_pdf(x, a, zeta, shape):
    """Mixture density sum_j a_j x^(shape-1) exp(-zeta_j x) on an array."""
    out = np.zeros(x.shape[0])
    for i in range(x.shape[0]):
        xp = x[i] ** (shape - 1)
        acc = 0.0
        for j in range(a.shape[0]):
            e = -zeta[j] * x[i]
            if e > -_EXP_UNDERFLOW:
                acc += a[j] * math.exp(e) * xp
        out[i] = acc
    return out


@njit(cache=True)
def mix_cdf(x, big_a, zeta, shape):
    """Mixture CDF sum_j A_j P(shape, zeta_j x) on an array."""
    out = np.zeros(x.shape[0])
    for i in range(x.shape[0]):
        acc = 0.0
        for j in range(big_a.shape[0]):
            acc += big_a[j] * _reg_lower(shape, zeta[j] * x[i])
        out[i] = acc
    return out


@njit(cache=True)
def mix_ccdf(x, big_a, zeta, shape):
    """Mixture CCDF as the direct sum sum_j sum_{n<shape} A_j (zeta_j x)^n e^(-zeta_j x)/n!."""
    out = np.zeros(x.shape[0])
    for i in range(x.shape[0]):
        acc = 0.0
        for j in range(big_a.shape[0]):
            z = zeta[j] * x[i]
            if z >= _EXP_UNDERFLOW:
                continue
            t = math.exp(-z)
            q = 0.0
            for n in range(shape):
                q += t
                t = t * z / (n + 1)
            acc += big_a[j] * q
        out[i] = acc
    return out


@njit(cache=True)
def sop_integrand(x, big_a_d, zeta_d, s_d, a_e, zeta_e, s_e, lam, mu):
    """Integrand [F_d(lam-1+lam x) - F_d(mu)] f_e(x) of the conditional outage integral."""
    out = np.zeros(x.shape[0])
    for i in range(x.shape[0]):
        y = lam - 1.0 + lam * x[i]
        bracket = 0.0
        for j in range(big_a_d.shape[0]):
            zlo = zeta_d[j] * mu
            zhi = zeta_d[j] * y
            if zhi < zlo:
                zhi = zlo
            bracket += big_a_d[j] * _delta_reg_lower(s_d, zlo, zhi)
        xp = x[i] ** (s_e - 1)
        pdf = 0.0
        for j in range(a_e.shape[0]):
            e = -zeta_e[j] * x[i]
            if e > -_EXP_UNDERFLOW:
                pdf += a_e[j] * math.exp(e) * xp
        out[i] = bracket * pdf
    return out


@njit(cache=True)
def asop_integrand(x, v, a_e, zeta_e, s_e, lam, mu):
    """Integrand [(lam-1+lam x)^v - mu^v] f_e(x) of the asymptotic outage integral."""
    out = np.zeros(x.shape[0])
    for i in range(x.shape[0]):
        y = lam - 1.0 + lam * x[i]
        xp = x[i] ** (s_e - 1)
        pdf = 0.0
        for j in range(a_e.shape[0]):
            e = -zeta_e[j] * x[i]
            if e > -_EXP_UNDERFLOW:
                pdf += a_e[j] * math.exp(e) * xp
        out[i] = (y**v - mu**v) * pdf
    return out


@njit(cache=True)
def count_events(gamma_d, gamma_e, lam, mu):
    """Return (accepted, leaked) counts for one Monte Carlo chunk."""
    accepted = 0
    leaked = 0
    for i in range(gamma_d.shape[0]):
        if gamma_d[i] > mu:
            accepted += 1
            if gamma_d[i] < lam - 1.0 + lam * gamma_e[i]:
                leaked += 1
    return accepted, leaked

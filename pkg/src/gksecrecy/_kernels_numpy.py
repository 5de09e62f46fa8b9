"""Pure-numpy evaluation kernels.

Reference implementations of the hot numerical paths: mixture pdf/cdf/ccdf
on arrays, the outage integrands consumed by the adaptive integrator, and
Monte Carlo event counting. The numba lane mirrors these semantics exactly;
agreement between the two is asserted in the test suite.

All incomplete-gamma work here is for integer shape and is arranged so that
every branch sums one-signed terms: differences of regularized gammas are
computed from tail series with expm1, never as a literal subtraction of two
near-equal probabilities. That keeps the integrand accurate at relative
scales down to ~1e-290, which the tiny high-SNR outage values require.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND_NAME = "numpy"

_TAIL_EPS = 1e-17
_EXP_UNDERFLOW = 745.0


def _reg_lower_vec(s, z):
    """Regularized lower incomplete gamma P(s, z) for integer s, z >= 0 array."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    small = z < s + 1.0
    zl = z[~small]
    if zl.size:
        # Right side: P = 1 - Q with Q the finite Poisson sum, Q < 0.6 here.
        t = np.exp(-zl)
        q = np.zeros_like(zl)
        for n in range(s):
            q += t
            t *= zl / (n + 1)
        out[~small] = 1.0 - q
    zs = z[small]
    if zs.size:
        # Left side: ascending Poisson tail starting at i = s, all terms positive.
        with np.errstate(divide="ignore"):
            lt = s * np.log(zs) - zs - math.lgamma(s + 1)
        term = np.exp(lt)
        acc = term.copy()
        i = s
        active = term > 0.0
        while np.any(active):
            i += 1
            term = term * zs / i
            acc += term
            active = term > acc * _TAIL_EPS
        out[small] = acc
    return out


def _delta_q_right_vec(s, a, b):
    """Q(s, a) - Q(s, b) for scalar a with s + 1 <= a <= b elementwise."""
    t = math.exp(-a) if a < _EXP_UNDERFLOW else 0.0
    if t == 0.0:
        return np.zeros_like(b)
    lr = np.log(b / a)
    d = b - a
    acc = np.zeros_like(b)
    for n in range(s):
        # n < s <= a forces n*lr - d <= 0, so every term is nonnegative.
        acc += t * (-np.expm1(n * lr - d))
        t *= a / (n + 1)
    return acc


def _delta_p_series_vec(s, a, b):
    """P(s, b) - P(s, a) for scalar a and array b with 0 < a <= b <= s + 1."""
    lr = np.log(b / a)
    d = b - a
    lga = math.lgamma(s + 1.0)
    lt_a = s * math.log(a) - a - lga
    t_a = math.exp(lt_a) if lt_a > -_EXP_UNDERFLOW else 0.0
    t_b = np.exp(s * np.log(b) - b - lga)
    acc = np.zeros_like(b)
    i = s
    while i < s + 200:
        arg = i * lr - d
        big = arg >= 30.0
        di = np.empty_like(b)
        di[~big] = t_a * np.expm1(arg[~big])
        di[big] = t_b[big] - t_a
        acc += di
        i += 1
        t_a *= a / i
        t_b = t_b * b / i
        if i > s + 1 and np.all(np.abs(di) <= _TAIL_EPS * np.abs(acc)):
            break
    return acc


def _delta_reg_lower_vec(s, zlo, zhi):
    """P(s, zhi) - P(s, zlo) for scalar zlo and array zhi, zhi >= zlo >= 0."""
    if zlo <= 0.0:
        return _reg_lower_vec(s, zhi)
    boundary = s + 1.0
    if zlo >= boundary:
        return _delta_q_right_vec(s, zlo, zhi)
    out = np.zeros_like(zhi)
    hi = zhi > boundary
    lo = ~hi
    if np.any(lo):
        out[lo] = _delta_p_series_vec(s, zlo, np.maximum(zhi[lo], zlo))
    if np.any(hi):
        head = float(_delta_p_series_vec(s, zlo, np.array([boundary]))[0])
        out[hi] = head + _delta_q_right_vec(s, boundary, zhi[hi])
    return out


def mix_pdf(x, a, zeta, shape):
    """Mixture density sum_j a_j x^(shape-1) exp(-zeta_j x) on an array."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    with np.errstate(under="ignore"):
        xp = x ** (shape - 1)
        for j in range(a.shape[0]):
            out += a[j] * np.exp(-zeta[j] * x) * xp
    return out


def mix_cdf(x, big_a, zeta, shape):
    """Mixture CDF sum_j A_j P(shape, zeta_j x) on an array."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for j in range(big_a.shape[0]):
        out += big_a[j] * _reg_lower_vec(shape, zeta[j] * x)
    return out


def mix_ccdf(x, big_a, zeta, shape):
    """Mixture CCDF as the direct sum sum_j sum_{n<shape} A_j (zeta_j x)^n e^(-zeta_j x)/n!."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for j in range(big_a.shape[0]):
        z = zeta[j] * x
        t = np.exp(-z)
        q = np.zeros_like(z)
        for n in range(shape):
            q += t
            t = t * z / (n + 1)
        out += big_a[j] * q
    return out


def sop_integrand(x, big_a_d, zeta_d, s_d, a_e, zeta_e, s_e, lam, mu):
    """Integrand [F_d(lam-1+lam x) - F_d(mu)] f_e(x) of the conditional outage integral.

    The constant subtraction term of the outage integral is folded into the
    bracket so the integrand vanishes at the lower limit instead of leaving
    a cancellation for the caller.
    """
    x = np.asarray(x, dtype=float)
    y = lam - 1.0 + lam * x
    bracket = np.zeros_like(x)
    for j in range(big_a_d.shape[0]):
        bracket += big_a_d[j] * _delta_reg_lower_vec(
            s_d, zeta_d[j] * mu, np.maximum(zeta_d[j] * y, zeta_d[j] * mu)
        )
    return bracket * mix_pdf(x, a_e, zeta_e, s_e)


def asop_integrand(x, v, a_e, zeta_e, s_e, lam, mu):
    """Integrand [(lam-1+lam x)^v - mu^v] f_e(x) of the asymptotic outage integral."""
    x = np.asarray(x, dtype=float)
    y = lam - 1.0 + lam * x
    return (y**v - mu**v) * mix_pdf(x, a_e, zeta_e, s_e)


def count_events(gamma_d, gamma_e, lam, mu):
    """Return (accepted, leaked) counts for one Monte Carlo chunk."""
    ok = gamma_d > mu
    leaked = ok & (gamma_d < lam - 1.0 + lam * gamma_e)
    return int(np.count_nonzero(ok)), int(np.count_nonzero(leaked))

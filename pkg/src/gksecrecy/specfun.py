"""Special functions and quadrature primitives used by the analytic core.

Everything here is pure and deterministic: Gauss-Laguerre rules, log-gamma,
the upper incomplete gamma function, and an adaptive integrator for
semi-infinite ranges.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exceptions import (
    ConvergenceError,
    EvaluationError,
    InvalidParameterError,
    NumericalError,
)

_MAX_LAGUERRE_ORDER = 64


@dataclass(frozen=True)
class GaussLaguerreRule:
    """Nodes and weights for integrating f(x) e^(-x) on [0, inf)."""

    order: int
    nodes: np.ndarray
    weights: np.ndarray


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances for the adaptive semi-infinite integrator.

    Convergence is declared when the accumulated error bound drops below
    max(rel_tol * |integral|, abs_tol), whichever is looser.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_refinements: int = 4000

    def __post_init__(self):
        if not (self.rel_tol > 0.0 and self.abs_tol > 0.0):
            raise InvalidParameterError("rel_tol and abs_tol must be positive")
        if self.max_refinements < 0:
            raise InvalidParameterError("max_refinements must be nonnegative")


def _laguerre_value(order, z):
    """Evaluate (L_order(z), L_{order-1}(z)) by the three-term recurrence."""
    p_curr = 1.0
    p_prev = 0.0
    for j in range(1, order + 1):
        p_curr, p_prev = ((2 * j - 1 - z) * p_curr - (j - 1) * p_prev) / j, p_curr
    return p_curr, p_prev


@lru_cache(maxsize=None)
def gauss_laguerre(order):
    """Return the Gauss-Laguerre rule of the given order.

    Nodes are the roots of the order-th Laguerre polynomial, found by Newton
    iteration from the classical initial guesses; weights use the identity
    w_j = x_j / ((n+1) L_{n+1}(x_j))^2.
    """
    if not isinstance(order, (int, np.integer)) or isinstance(order, bool):
        raise InvalidParameterError("order must be an integer")
    if not 1 <= order <= _MAX_LAGUERRE_ORDER:
        raise InvalidParameterError(
            f"order must lie in [1, {_MAX_LAGUERRE_ORDER}], got {order}"
        )
    n = int(order)
    nodes = np.empty(n)
    weights = np.empty(n)
    z = 0.0
    for i in range(n):
        if i == 0:
            z = 3.0 / (1.0 + 2.4 * n)
        elif i == 1:
            z += 15.0 / (1.0 + 2.5 * n)
        else:
            step = (1.0 + 2.55 * (i - 1)) / (1.9 * (i - 1))
            z += step * (z - nodes[i - 2])
        for _ in range(200):
            p_n, p_nm1 = _laguerre_value(n, z)
            # L_n'(z) = n (L_n(z) - L_{n-1}(z)) / z
            deriv = n * (p_n - p_nm1) / z
            dz = p_n / deriv
            z -= dz
            if abs(dz) <= 1e-14 * max(1.0, abs(z)):
                break
        else:
            raise NumericalError(f"Laguerre root {i} did not converge for order {n}")
        p_n, p_nm1 = _laguerre_value(n, z)
        p_np1 = ((2 * n + 1 - z) * p_n - n * p_nm1) / (n + 1)
        nodes[i] = z
        weights[i] = z / ((n + 1) * p_np1) ** 2
    if not (np.all(np.diff(nodes) > 0.0) and np.all(weights > 0.0)):
        raise NumericalError(f"Gauss-Laguerre rule of order {n} failed its invariants")
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return GaussLaguerreRule(order=n, nodes=nodes, weights=weights)


def ln_gamma(x):
    """Natural log of the gamma function for x > 0."""
    if not (x > 0.0 and math.isfinite(x)):
        raise InvalidParameterError(f"ln_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def _lower_reg_series(s, x):
    """Regularized lower incomplete gamma by its ascending series, x < s + 1."""
    ap = s
    summand = 1.0 / s
    total = summand
    for _ in range(10000):
        ap += 1.0
        summand *= x / ap
        total += summand
        if abs(summand) < abs(total) * 1e-17:
            return total * math.exp(-x + s * math.log(x) - math.lgamma(s))
    raise NumericalError(f"incomplete gamma series stalled at s={s}, x={x}")


def _upper_gamma_cf(s, x):
    """Non-regularized upper incomplete gamma by Lentz continued fraction, x >= s + 1."""
    tiny = 1e-300
    b = x + 1.0 - s
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 10000):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            return math.exp(-x + s * math.log(x)) * h
    raise NumericalError(f"incomplete gamma continued fraction stalled at s={s}, x={x}")


def upper_inc_gamma(s, x):
    """Upper incomplete gamma Gamma(s, x) for s > 0, x >= 0.

    Uses the ascending series below x = s + 1 and the continued fraction at
    and above it, the classical stability split.
    """
    if not (s > 0.0 and math.isfinite(s)):
        raise InvalidParameterError(f"upper_inc_gamma requires s > 0, got {s}")
    if not (x >= 0.0 and math.isfinite(x)):
        raise InvalidParameterError(f"upper_inc_gamma requires x >= 0, got {x}")
    if x == 0.0:
        return math.exp(math.lgamma(s))
    if x < s + 1.0:
        # P stays below ~0.7 on this side, so 1 - P loses no precision.
        return math.exp(math.lgamma(s)) * (1.0 - _lower_reg_series(s, x))
    return _upper_gamma_cf(s, x)


def ln_upper_gamma_int(s, x):
    """log Gamma(s, x) for integer s >= 1 and x >= 0, safe for extreme x.

    Gamma(s, x) = (s-1)! e^(-x) sum_{n<s} x^n / n!, a sum of positive
    terms, evaluated as a log-sum-exp so the result stays meaningful far
    past the underflow point of the linear value.
    """
    if not isinstance(s, (int, np.integer)) or s < 1:
        raise InvalidParameterError(f"ln_upper_gamma_int requires integer s >= 1, got {s!r}")
    if not (x >= 0.0 and math.isfinite(x)):
        raise InvalidParameterError(f"ln_upper_gamma_int requires x >= 0, got {x!r}")
    if x == 0.0:
        return math.lgamma(s)
    lx = math.log(x)
    ln_terms = [n * lx - math.lgamma(n + 1.0) for n in range(s)]
    peak = max(ln_terms)
    return (
        math.lgamma(s)
        - x
        + peak
        + math.log(math.fsum(math.exp(t - peak) for t in ln_terms))
    )


@lru_cache(maxsize=None)
def _legendre_pair():
    """Cached 7- and 15-point Gauss-Legendre rules on [-1, 1]."""
    x7, w7 = np.polynomial.legendre.leggauss(7)
    x15, w15 = np.polynomial.legendre.leggauss(15)
    for arr in (x7, w7, x15, w15):
        arr.setflags(write=False)
    return x7, w7, x15, w15


def _panel_points(a, b):
    """All 22 evaluation points of the embedded 7/15 pair on [a, b]."""
    x7, _, x15, _ = _legendre_pair()
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return np.concatenate((mid + half * x7, mid + half * x15))


def _panel_estimates(a, b, values):
    """Return (I15, error) for one panel given its 22 integrand values."""
    _, w7, _, w15 = _legendre_pair()
    half = 0.5 * (b - a)
    i7 = half * float(np.dot(w7, values[:7]))
    i15 = half * float(np.dot(w15, values[7:]))
    return i15, abs(i15 - i7)


def integrate_semi_infinite(f, lower, spec=None, scale=1.0):
    """Adaptive integral of f over [lower, inf).

    The range is mapped to u in [0, 1) by x = lower + scale * u / (1 - u) and
    integrated with an embedded 7/15-point Gauss-Legendre pair, splitting the
    worst panel until the accumulated error bound satisfies the spec. The
    integrand is called with numpy arrays when it supports that, otherwise
    pointwise.
    """
    if spec is None:
        spec = QuadratureSpec()
    elif not isinstance(spec, QuadratureSpec):
        raise InvalidParameterError(
            f"spec must be a QuadratureSpec, got {type(spec).__name__}"
        )
    if not (lower >= 0.0 and math.isfinite(lower)):
        raise InvalidParameterError(f"lower must be finite and >= 0, got {lower}")
    if not (scale > 0.0 and math.isfinite(scale)):
        raise InvalidParameterError(f"scale must be positive, got {scale}")

    vectorized = True

    def eval_batch(u):
        nonlocal vectorized
        x = lower + scale * u / (1.0 - u)
        jac = scale / (1.0 - u) ** 2
        if vectorized:
            try:
                y = np.asarray(f(x), dtype=float)
                if y.shape != x.shape:
                    raise ValueError
            except (TypeError, ValueError):
                vectorized = False
                y = np.array([float(f(xi)) for xi in x])
        else:
            y = np.array([float(f(xi)) for xi in x])
        if not np.all(np.isfinite(y)):
            bad = x[~np.isfinite(y)][0]
            raise EvaluationError(f"integrand is not finite at x={bad}")
        return y * jac

    # Two seed panels; the adaptive loop splits the worst panel each round.
    panels = []
    counter = 0
    for a, b in ((0.0, 0.5), (0.5, 1.0)):
        est, err = _panel_estimates(a, b, eval_batch(_panel_points(a, b)))
        heapq.heappush(panels, (-err, counter, a, b, est))
        counter += 1

    refinements = 0
    while True:
        total = math.fsum(p[4] for p in panels)
        total_err = math.fsum(-p[0] for p in panels)
        if total_err <= max(spec.rel_tol * abs(total), spec.abs_tol):
            return total
        if refinements >= spec.max_refinements:
            raise ConvergenceError(
                f"integral did not converge within {spec.max_refinements} refinements "
                f"(estimate {total!r}, error bound {total_err!r})",
                estimate=total,
                error_bound=total_err,
            )
        _, _, a, b, _ = heapq.heappop(panels)
        mid = 0.5 * (a + b)
        pts = np.concatenate((_panel_points(a, mid), _panel_points(mid, b)))
        vals = eval_batch(pts)
        for lo, hi, v in ((a, mid, vals[:22]), (mid, b, vals[22:])):
            est_i, err_i = _panel_estimates(lo, hi, v)
            heapq.heappush(panels, (-err_i, counter, lo, hi, est_i))
            counter += 1
        refinements += 1

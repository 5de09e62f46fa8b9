"""Benchmark the two kernel lanes against each other.

Times the hot evaluation paths (mixture CDF over a large batch, the outage
integrand over quadrature-sized batches, and Monte Carlo event counting)
on the compiled lane and the pure-numpy lane, and reports the speedup.

Run from the repository root:

    python3 benchmarks/bench_kernels.py
"""

from __future__ import annotations

import time

import numpy as np

from gksecrecy import ChannelParams, fit_mixed_gamma
from gksecrecy import _kernels_numpy

try:
    from gksecrecy import _kernels_numba
except ImportError:
    _kernels_numba = None


def _time(fn, *args, repeat=5):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    model_d = fit_mixed_gamma(ChannelParams.from_db(3.0, 2.0, 30.0))
    model_e = fit_mixed_gamma(ChannelParams.from_db(3.0, 2.0, 0.0))
    lam, mu = 2.0, 3.0

    rng = np.random.default_rng(0)
    x_big = np.sort(rng.gamma(2.0, 500.0, size=1_000_000))
    x_panel = np.linspace(1e-3, 40.0, 22 * 64)
    gamma_d = rng.gamma(3.0, 400.0, size=1_000_000)
    gamma_e = rng.gamma(3.0, 0.4, size=1_000_000)

    cases = [
        (
            "mix_cdf, 1e6 points",
            lambda k: k.mix_cdf(x_big, model_d.big_a, model_d.zeta, model_d.shape),
        ),
        (
            "sop_integrand, 64 panels",
            lambda k: k.sop_integrand(
                x_panel,
                model_d.big_a,
                model_d.zeta,
                model_d.shape,
                model_e.a,
                model_e.zeta,
                model_e.shape,
                lam,
                mu,
            ),
        ),
        (
            "count_events, 1e6 pairs",
            lambda k: k.count_events(gamma_d, gamma_e, lam, mu),
        ),
    ]

    lanes = [("numpy", _kernels_numpy)]
    if _kernels_numba is not None:
        # Warm the JIT cache outside the timed region.
        for _, fn in cases:
            fn(_kernels_numba)
        lanes.append(("numba", _kernels_numba))
    else:
        print("numba unavailable; timing the numpy lane only")

    print(f"{'case':<28} " + " ".join(f"{name:>12}" for name, _ in lanes) + "  speedup")
    for label, fn in cases:
        times = []
        results = []
        for _, lane in lanes:
            t, r = _time(fn, lane)
            times.append(t)
            results.append(np.asarray(r, dtype=float))
        if len(results) == 2:
            scale = np.maximum(np.abs(results[0]), 1e-300)
            worst = float(np.max(np.abs(results[0] - results[1]) / scale))
            if worst > 1e-11:
                raise AssertionError(f"{label}: lanes disagree by {worst:.3e}")
        cols = " ".join(f"{t * 1e3:>10.2f}ms" for t in times)
        speedup = f"{times[0] / times[-1]:>8.1f}x" if len(times) == 2 else ""
        print(f"{label:<28} {cols}  {speedup}")


if __name__ == "__main__":
    main()

"""Monte Carlo estimation of the secrecy outage probability.

Estimates the same conditional probability as the analytical module by
simulating SNR pairs, filtering on the transmission condition gamma_d > mu,
and counting secrecy failures gamma_d < lam - 1 + lam * gamma_e. Draws can
come from the exact composite law (product of two Gamma variates), which
validates the whole mixture pipeline end to end, or from the fitted mixture
itself, which isolates the outage algebra from the fitting error.

Reproducibility: the sample budget is split across ``workers`` logical
streams seeded by spawning one SeedSequence child per stream, so results
are bit-identical for a fixed (seed, workers) pair regardless of how the
streams are executed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._accel import kernels
from .channel import ChannelParams, fit_mixed_gamma, sample_exact, sample_surrogate
from .exceptions import EvaluationError, InvalidParameterError
from .secrecy import SecrecyConfig


def _check_inputs(d_params, e_params, mc, cfg=None):
    for name, value in (("d_params", d_params), ("e_params", e_params)):
        if not isinstance(value, ChannelParams):
            raise InvalidParameterError(
                f"{name} must be a ChannelParams, got {type(value).__name__}"
            )
    if not isinstance(mc, McConfig):
        raise InvalidParameterError(
            f"mc must be a McConfig, got {type(mc).__name__}"
        )
    if cfg is not None and not isinstance(cfg, SecrecyConfig):
        raise InvalidParameterError(
            f"cfg must be a SecrecyConfig, got {type(cfg).__name__}"
        )

_CHUNK = 2_000_000
_LAWS = ("exact_gk", "surrogate_mixture")

__all__ = ["McConfig", "McEstimate", "McGapPoint", "mc_sop", "mc_sop_conventional", "mc_gap_curve"]


@dataclass(frozen=True)
class McConfig:
    """Simulation controls.

    Attributes
    ----------
    samples : int
        Total number of SNR pairs to draw, >= 1000.
    seed : int
        Root seed of the reproducible stream tree.
    law : str
        "exact_gk" to draw from the exact composite law, or
        "surrogate_mixture" to draw from the fitted mixture.
    workers : int
        Number of logical substreams the budget is split across.
    """

    samples: int = 10_000_000
    seed: int = 0
    law: str = "exact_gk"
    workers: int = 1

    def __post_init__(self):
        if not isinstance(self.samples, int) or self.samples < 1000:
            raise InvalidParameterError(
                f"samples must be an integer >= 1000, got {self.samples!r}"
            )
        if not isinstance(self.seed, int) or self.seed < 0:
            raise InvalidParameterError(f"seed must be a nonnegative integer, got {self.seed!r}")
        if self.law not in _LAWS:
            raise InvalidParameterError(f"law must be one of {_LAWS}, got {self.law!r}")
        if not isinstance(self.workers, int) or self.workers < 1:
            raise InvalidParameterError(
                f"workers must be a positive integer, got {self.workers!r}"
            )


@dataclass(frozen=True)
class McEstimate:
    """Conditional outage estimate with its binomial standard error."""

    value: float
    stderr: float
    accepted: int
    total: int

    def __post_init__(self):
        if not (0.0 <= self.value <= 1.0):
            raise InvalidParameterError(f"estimate {self.value!r} outside [0, 1]")
        if not (self.stderr >= 0.0 and 0 <= self.accepted <= self.total):
            raise InvalidParameterError("inconsistent Monte Carlo tallies")


class McGapPoint(NamedTuple):
    """On-off versus conventional outage at one secrecy rate.

    Unpacks as the 4-tuple (rate_rs, proposed, conventional, gap).
    """

    rate_rs: float
    proposed: float
    conventional: float
    gap: float


def _partition(samples, workers):
    base, extra = divmod(samples, workers)
    return [base + (1 if w < extra else 0) for w in range(workers)]


def _stream_rngs(seed, workers):
    children = np.random.SeedSequence(seed).spawn(workers)
    return [np.random.Generator(np.random.PCG64(c)) for c in children]


def _make_drawer(d_params, e_params, mc, order):
    """Return draw(rng, n) -> (gamma_d, gamma_e) for the configured law."""
    if mc.law == "exact_gk":

        def draw(rng, n):
            return sample_exact(d_params, n, rng), sample_exact(e_params, n, rng)

    else:
        d_model = fit_mixed_gamma(d_params, order)
        e_model = fit_mixed_gamma(e_params, order)

        def draw(rng, n):
            return sample_surrogate(d_model, n, rng), sample_surrogate(e_model, n, rng)

    return draw


def mc_sop(d_params, e_params, cfg, mc, order=15):
    """Monte Carlo secrecy outage probability.

    Parameters
    ----------
    d_params, e_params : ChannelParams
        Main and eavesdropper links.
    cfg : SecrecyConfig
        ``rate_rs`` and ``mu`` define the outage event.
    mc : McConfig
        Simulation controls.
    order : int
        Mixture order used only when ``mc.law`` is "surrogate_mixture".

    Returns
    -------
    McEstimate

    Raises
    ------
    EvaluationError
        If no draw satisfies the transmission condition, in which case the
        conditional probability is not estimable from this run.
    """
    _check_inputs(d_params, e_params, mc, cfg)
    draw = _make_drawer(d_params, e_params, mc, order)
    rngs = _stream_rngs(mc.seed, mc.workers)
    lam, mu = cfg.lam, cfg.mu
    accepted = 0
    leaked = 0
    for rng, quota in zip(rngs, _partition(mc.samples, mc.workers)):
        remaining = quota
        while remaining > 0:
            n = min(remaining, _CHUNK)
            gamma_d, gamma_e = draw(rng, n)
            acc, leak = kernels.count_events(gamma_d, gamma_e, lam, mu)
            accepted += acc
            leaked += leak
            remaining -= n
    if accepted == 0:
        raise EvaluationError(
            f"conditioning event gamma_d > mu = {mu} is empty after "
            f"{mc.samples} draws; the conditional outage is not estimable"
        )
    value = leaked / accepted
    stderr = math.sqrt(value * (1.0 - value) / accepted)
    return McEstimate(value=value, stderr=stderr, accepted=accepted, total=mc.samples)


def mc_sop_conventional(d_params, e_params, rate_rs, mc, order=15):
    """Monte Carlo conventional outage: the same event with mu = 0."""
    cfg = SecrecyConfig(rate_rs=rate_rs, mu=0.0)
    return mc_sop(d_params, e_params, cfg, mc, order=order)


def mc_gap_curve(d_params, e_params, mu, rs_grid, mc, order=15):
    """On-off versus conventional outage over a grid of secrecy rates.

    All rates are evaluated on the same draws (common random numbers), so
    the per-rate gaps are positively correlated and their ordering is far
    less noisy than independent runs would give.

    Parameters
    ----------
    mu : float
        Transmission threshold of the on-off (proposed) definition; the
        conventional definition always uses mu = 0.
    rs_grid : sequence of float
        Strictly increasing secrecy rates.

    Returns
    -------
    list of McGapPoint
        One (rate_rs, proposed, conventional, gap) tuple per rate.
    """
    _check_inputs(d_params, e_params, mc)
    rates = [float(r) for r in rs_grid]
    if not rates:
        raise InvalidParameterError("rs_grid must not be empty")
    for r in rates:
        if not (math.isfinite(r) and r >= 0.0):
            raise InvalidParameterError(f"rates must be finite and >= 0, got {r!r}")
    if any(b <= a for a, b in zip(rates, rates[1:])):
        raise InvalidParameterError("rs_grid must be strictly increasing")
    if not (isinstance(mu, (int, float)) and math.isfinite(mu) and mu >= 0.0):
        raise InvalidParameterError(f"mu must be finite and >= 0, got {mu!r}")
    mu = float(mu)
    draw = _make_drawer(d_params, e_params, mc, order)
    rngs = _stream_rngs(mc.seed, mc.workers)
    lams = [2.0**r for r in rates]
    acc_onoff = 0
    total = 0
    leak_onoff = [0] * len(rates)
    leak_conv = [0] * len(rates)
    for rng, quota in zip(rngs, _partition(mc.samples, mc.workers)):
        remaining = quota
        while remaining > 0:
            n = min(remaining, _CHUNK)
            gamma_d, gamma_e = draw(rng, n)
            total += n
            for i, lam in enumerate(lams):
                acc, leak = kernels.count_events(gamma_d, gamma_e, lam, mu)
                if i == 0:
                    # The acceptance count does not depend on the rate.
                    acc_onoff += acc
                leak_onoff[i] += leak
                _, conv_leak = kernels.count_events(gamma_d, gamma_e, lam, 0.0)
                leak_conv[i] += conv_leak
            remaining -= n
    if acc_onoff == 0:
        raise EvaluationError(
            f"conditioning event gamma_d > mu = {mu} is empty after "
            f"{mc.samples} draws; the conditional outage is not estimable"
        )
    points = []
    for i, r in enumerate(rates):
        onoff = leak_onoff[i] / acc_onoff
        conv = leak_conv[i] / total
        points.append(
            McGapPoint(rate_rs=r, proposed=onoff, conventional=conv, gap=abs(onoff - conv))
        )
    return points

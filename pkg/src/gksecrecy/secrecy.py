"""Secrecy outage probability of a wiretap link under composite fading.

An on-off transmission scheme sends only when the main-channel SNR exceeds a
threshold mu. Conditioned on transmission, secrecy outage occurs when the
secrecy capacity falls below a target rate R_s, which happens exactly when
gamma_d < lam - 1 + lam * gamma_e with lam = 2^R_s. All estimators here
compute that conditional probability:

    SOP = E[ F_d(lam - 1 + lam x) - F_d(mu) ; x > c ] / (1 - F_d(mu)),
    c   = max(0, (mu + 1) / lam - 1),

with the expectation over the eavesdropper SNR density f_e.

Three method families are provided. The closed form expands both fitted
mixtures into finite incomplete-gamma sums; it switches between a direct
evaluation with exact (fsum) accumulation and a cancellation-free tail
series, chosen by the size of lam * zeta_d relative to zeta_e. Quadrature
integrates the bracketed integrand directly with an adaptive rule, sharing
no algebra with the closed form beyond the mixture itself. The asymptotic
family replaces F_d by its leading lower-tail power law and reports the
high-SNR limit, in which the transmission probability divisor is 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._accel import kernels
from .channel import ChannelParams, MixedGammaModel
from .exceptions import (
    EvaluationError,
    InternalConsistencyError,
    InvalidParameterError,
    NonIntegerOrderError,
    NumericalError,
    UnsupportedCaseError,
)
from .specfun import QuadratureSpec, integrate_semi_infinite, ln_upper_gamma_int

_DENOM_FLOOR = 1e-300
_SERIES_TAIL_EPS = 1e-17
_SERIES_EXTRA_TERMS = 600
_SERIES_RHO_MAX = 8.0
_SERIES_MU_ZETA_MAX = 60.0
_RESCUE_COND_MAX = 2.5e4
_RESCUE_GAIN_MIN = 100.0
_VALUE_TOL = 1e-9
_INTEGER_TOL = 1e-9

_METHOD_NAMES = ("closed_form", "quadrature", "monte_carlo", "asymptotic")

_DEFAULT_QUAD_SPEC = QuadratureSpec(rel_tol=1e-11, abs_tol=1e-300, max_refinements=4000)

__all__ = [
    "SecrecyConfig",
    "SopEstimate",
    "AsymptoteReport",
    "sop_closed_form",
    "sop_quadrature",
    "sop_conventional",
    "asop_closed_form",
    "asop_quadrature",
    "asymptote_report",
]


@dataclass(frozen=True)
class SecrecyConfig:
    """Secrecy operating point of the wiretap system.

    Attributes
    ----------
    rate_rs : float
        Target secrecy rate R_s in bit/s/Hz, >= 0.
    mu : float
        On-off transmission SNR threshold, >= 0. mu = 0 recovers the
        conventional (always-transmit) outage probability.
    """

    rate_rs: float
    mu: float = 0.0

    def __post_init__(self):
        for name in ("rate_rs", "mu"):
            val = getattr(self, name)
            if not (isinstance(val, (int, float)) and math.isfinite(val) and val >= 0):
                raise InvalidParameterError(
                    f"{name} must be finite and >= 0, got {val!r}"
                )
            object.__setattr__(self, name, float(val))

    @property
    def lam(self):
        """Capacity-ratio threshold lambda = 2^rate_rs."""
        return 2.0**self.rate_rs

    @property
    def lower_cut(self):
        """Lower integration limit c = max(0, (mu + 1)/lam - 1)."""
        return max(0.0, (self.mu + 1.0) / self.lam - 1.0)


@dataclass(frozen=True)
class SopEstimate:
    """A secrecy outage probability value with provenance.

    ``value`` lies in [0, 1] for every method except "asymptotic", whose
    power-law extrapolation legitimately exceeds 1 at low SNR. Tiny
    excursions from rounding are clamped; larger ones raise. ``stderr``
    accompanies Monte Carlo estimates only. ``branch`` records which
    internal evaluation path produced a closed-form value.
    """

    value: float
    method: str
    stderr: float | None = None
    branch: str | None = None

    def __post_init__(self):
        if self.method not in _METHOD_NAMES:
            raise InvalidParameterError(
                f"method must be one of {_METHOD_NAMES}, got {self.method!r}"
            )
        if (self.stderr is not None) != (self.method == "monte_carlo"):
            raise InvalidParameterError(
                "stderr must be present exactly when method is monte_carlo"
            )
        val = float(self.value)
        if not math.isfinite(val):
            raise InternalConsistencyError(f"non-finite outage estimate {val!r}")
        upper = math.inf if self.method == "asymptotic" else 1.0
        if val < -_VALUE_TOL or val > upper + _VALUE_TOL:
            raise InternalConsistencyError(
                f"outage estimate {val!r} outside [0, {upper}] beyond tolerance"
            )
        object.__setattr__(self, "value", min(max(val, 0.0), upper))


@dataclass(frozen=True)
class AsymptoteReport:
    """High-SNR law SOP ~ coefficient * gamma_bar_d^(-diversity_order).

    The secrecy array gain is the SNR scaling coefficient^(-1/order), i.e.
    the horizontal shift of the asymptote on a log-log plot.
    """

    diversity_order: float
    coefficient: float
    array_gain: float

    def __post_init__(self):
        if not (math.isfinite(self.coefficient) and self.coefficient > 0):
            raise InternalConsistencyError(
                f"asymptote coefficient must be positive, got {self.coefficient!r}"
            )
        if not (math.isfinite(self.diversity_order) and self.diversity_order > 0):
            raise InternalConsistencyError(
                f"diversity order must be positive, got {self.diversity_order!r}"
            )
        expected = self.coefficient ** (-1.0 / self.diversity_order)
        if abs(self.array_gain - expected) > 1e-12 * abs(expected):
            raise InternalConsistencyError("array gain inconsistent with coefficient")

    def evaluate(self, gamma_bar):
        """Asymptotic SOP at average main-link SNR ``gamma_bar`` (linear)."""
        return self.coefficient * gamma_bar ** (-self.diversity_order)


def _check_model(model, name):
    if not isinstance(model, MixedGammaModel):
        raise InvalidParameterError(
            f"{name} must be a MixedGammaModel, got {type(model).__name__}"
        )


def _check_cfg(cfg):
    if not isinstance(cfg, SecrecyConfig):
        raise InvalidParameterError(
            f"cfg must be a SecrecyConfig, got {type(cfg).__name__}"
        )


def _check_params(params, name):
    if not isinstance(params, ChannelParams):
        raise InvalidParameterError(
            f"{name} must be ChannelParams, got {type(params).__name__}"
        )


def _ccdf_scalar(model, x):
    arr = np.array([x], dtype=float)
    return float(kernels.mix_ccdf(arr, model.big_a, model.zeta, model.shape)[0])


def _denominator(d_model, mu):
    ccdf = _ccdf_scalar(d_model, mu)
    if ccdf < _DENOM_FLOOR:
        raise NumericalError(
            f"transmission probability CCDF_d(mu={mu}) = {ccdf!r} underflows; "
            "the conditional outage is not resolvable at this threshold"
        )
    return ccdf


def _ln_gamma_matrix(s_e, x, n_cols):
    """Rows: mixture components; column f holds ln Gamma(s_e + f, x_j).

    Built by the ascending recurrence Gamma(s+1, x) = s Gamma(s, x) +
    x^s e^(-x), which adds positive terms only.
    """
    with np.errstate(divide="ignore"):
        ln_x = np.log(x)
    out = np.empty((x.shape[0], n_cols))
    out[:, 0] = [ln_upper_gamma_int(s_e, float(xi)) for xi in x]
    for f in range(1, n_cols):
        s = s_e + f - 1.0
        out[:, f] = np.logaddexp(math.log(s) + out[:, f - 1], s * ln_x - x)
    return out


def _ln_m_matrix(e_model, lam_zeta_d, c, n_cols):
    """ln M_f per f column: M_f = sum_je a_je Gamma(s_e+f, zz_je c) / zz_je^(s_e+f)."""
    zz = e_model.zeta + lam_zeta_d
    ln_zz = np.log(zz)
    ln_gam = _ln_gamma_matrix(e_model.shape, zz * c, n_cols)
    f_arr = e_model.shape + np.arange(n_cols)
    ln_terms = np.log(e_model.a)[:, None] + ln_gam - f_arr[None, :] * ln_zz[:, None]
    return ln_terms


def _logsumexp(values, axis=None):
    peak = np.max(values, axis=axis, keepdims=True)
    safe = np.where(np.isfinite(peak), peak, 0.0)
    with np.errstate(divide="ignore"):
        out = np.log(np.sum(np.exp(values - safe), axis=axis))
    return out + np.squeeze(safe, axis=axis)


def _closed_naive(cfg, d_model, e_model, denom):
    """Direct finite-sum evaluation with exact accumulation.

    Expanding the CDF of the main link through its complement turns the
    outage into CCDF_e(c) - T / CCDF_d(mu) where T collects one term per
    (j_d, n_d, j_e, f). All of T's terms share one sign, and the final
    subtraction is folded into a single exact (fsum) accumulation.
    """
    lam, c = cfg.lam, cfg.lower_cut
    s_d = d_model.shape
    lam_m1 = lam - 1.0
    ln_lam = math.log(lam)
    ln_lam_m1 = math.log(lam_m1) if lam_m1 > 0 else -math.inf
    ccdf_e_c = _ccdf_scalar(e_model, c)
    terms = [ccdf_e_c * denom]
    ln_big_a_d = np.log(d_model.big_a)
    ln_zeta_d = np.log(d_model.zeta)
    for j_d in range(d_model.order):
        zeta = d_model.zeta[j_d]
        ln_m = _ln_m_matrix(e_model, lam * zeta, c, s_d)
        for n_d in range(s_d):
            if lam_m1 > 0:
                f_arr = np.arange(n_d + 1)
            else:
                f_arr = np.arange(n_d, n_d + 1)
            base = (
                ln_big_a_d[j_d]
                + n_d * ln_zeta_d[j_d]
                - zeta * lam_m1
                - math.lgamma(n_d + 1)
            )
            ln_choose = (
                math.lgamma(n_d + 1)
                - np.array([math.lgamma(f + 1) + math.lgamma(n_d - f + 1) for f in f_arr])
            )
            ln_t = (
                base
                + ln_choose
                + f_arr * ln_lam
                + (0.0 if lam_m1 <= 0 else (n_d - f_arr) * ln_lam_m1)
                + ln_m[:, f_arr]
            )
            t = np.exp(ln_t)
            if not np.all(np.isfinite(t)):
                j_e, fi = np.argwhere(~np.isfinite(t))[0]
                raise EvaluationError(
                    "non-finite closed-form term at "
                    f"(j_d={j_d}, n_d={n_d}, j_e={int(j_e)}, f={int(f_arr[fi])})"
                )
            terms.extend((-t).ravel().tolist())
    total = math.fsum(terms)
    # fsum makes the alternating accumulation exact, so the only error left
    # is the rounding of each term itself; its size relative to the result
    # is the condition number of the subtraction.
    magnitude = 2.0 * terms[0] - total
    cond = magnitude / max(abs(total), _DENOM_FLOOR)
    return total / denom, cond


def _closed_series(cfg, d_model, e_model, denom):
    """Cancellation-free tail series for the high-SNR regime.

    Groups the transmission-conditioning correction with the CDF expansion
    index by index, which makes every grouped term provably nonnegative and
    removes the subtraction that dominates the error of the direct form
    when the outage is many orders below the correction.
    """
    lam, mu, c = cfg.lam, cfg.mu, cfg.lower_cut
    s_d = d_model.shape
    lam_m1 = lam - 1.0
    ln_lam = math.log(lam)
    ln_lam_m1 = math.log(lam_m1) if lam_m1 > 0 else -math.inf
    ccdf_e_c = _ccdf_scalar(e_model, c) if mu > 0 else 0.0
    ln_ccdf_e_c = math.log(ccdf_e_c) if ccdf_e_c > 0 else -math.inf
    zeta_e_min = float(np.min(e_model.zeta))
    total = 0.0
    total_abs = 0.0
    for j_d in range(d_model.order):
        zeta = d_model.zeta[j_d]
        ln_zeta = math.log(zeta)
        mu_zeta = mu * zeta
        ln_mu_zeta = math.log(mu_zeta) if mu_zeta > 0 else -math.inf
        # The term peak sits past the Poisson mode of the correction plus the
        # geometric growth span s_e * rho contributed by the e-side moments.
        mode = mu_zeta + lam * zeta * c
        rho_j = lam * zeta / zeta_e_min
        i_floor = s_d + int(mode + e_model.shape * rho_j + 4.0 * math.sqrt(mode + 1.0) + 10.0)
        i_cap = i_floor + _SERIES_EXTRA_TERMS
        n_cols = i_cap + 1
        ln_m = _logsumexp(_ln_m_matrix(e_model, lam * zeta, c, n_cols), axis=0)
        ln_fact = np.array([math.lgamma(v + 1.0) for v in range(n_cols + 1)])
        acc = 0.0
        acc_abs = 0.0
        i = s_d
        while True:
            if lam_m1 > 0:
                f_arr = np.arange(i + 1)
                ln_y_f = (
                    i * ln_zeta
                    - zeta * lam_m1
                    + f_arr * ln_lam
                    + (i - f_arr) * ln_lam_m1
                    - ln_fact[f_arr]
                    - ln_fact[i - f_arr]
                    + ln_m[: i + 1]
                )
                ln_y = float(_logsumexp(ln_y_f, axis=0))
            else:
                ln_y = i * ln_zeta + i * ln_lam - math.lgamma(i + 1) + ln_m[i]
            y_i = math.exp(ln_y)
            if mu_zeta > 0:
                mu_i = math.exp(
                    i * ln_mu_zeta - mu_zeta - math.lgamma(i + 1) + ln_ccdf_e_c
                )
            else:
                mu_i = 0.0
            if not (math.isfinite(y_i) and math.isfinite(mu_i)):
                raise EvaluationError(
                    f"non-finite series term at (j_d={j_d}, i={i})"
                )
            acc += y_i - mu_i
            acc_abs += abs(y_i - mu_i)
            i += 1
            if i >= i_floor and y_i + mu_i <= _SERIES_TAIL_EPS * max(acc, 0.0):
                break
            if i > i_cap:
                raise NumericalError(
                    f"tail series did not converge within {i_cap} terms "
                    f"(j_d={j_d}); parameters sit outside the series regime"
                )
        total += d_model.big_a[j_d] * acc
        total_abs += abs(d_model.big_a[j_d]) * acc_abs
    cond = total_abs / max(abs(total), _DENOM_FLOOR)
    return total / denom, cond


def _series_applicable(cfg, d_model, e_model):
    # rho bounds the geometric term ratio rho/(1+rho) so the tail budget
    # suffices; the mu*zeta bound keeps the Poisson mode of the correction
    # inside the indexed window.
    rho = cfg.lam * float(np.max(d_model.zeta)) / float(np.min(e_model.zeta))
    mu_zeta = cfg.mu * float(np.max(d_model.zeta))
    return rho <= _SERIES_RHO_MAX and mu_zeta <= _SERIES_MU_ZETA_MAX


def sop_closed_form(d_model, e_model, cfg):
    """Secrecy outage probability from the mixed-Gamma closed form.

    Parameters
    ----------
    d_model, e_model : MixedGammaModel
        Fitted mixtures for the main link and the eavesdropper link.
    cfg : SecrecyConfig
        Secrecy rate and transmission threshold.

    Returns
    -------
    SopEstimate
        ``branch`` records which evaluation path produced the value:
        "naive" for the direct finite sum, "series" when cancellation made
        the direct form unreliable and the grouped tail series took over
        (typically deep in the high-SNR regime).
    """
    _check_model(d_model, "d_model")
    _check_model(e_model, "e_model")
    _check_cfg(cfg)
    denom = _denominator(d_model, cfg.mu)
    value, cond = _closed_naive(cfg, d_model, e_model, denom)
    branch = "naive"
    # A large condition number means the direct form lost most of its digits
    # to cancellation. The grouped tail series reorders the same sum so the
    # subtraction happens inside well-scaled per-index terms; rerun through
    # it when it converges and its own measured conditioning is decisively
    # better.
    if cond > _RESCUE_COND_MAX and _series_applicable(cfg, d_model, e_model):
        try:
            s_value, s_cond = _closed_series(cfg, d_model, e_model, denom)
        except NumericalError:
            pass
        else:
            if s_cond * _RESCUE_GAIN_MIN < cond:
                value, branch = s_value, "series"
    return SopEstimate(value=value, method="closed_form", branch=branch)


def sop_conventional(d_model, e_model, rate_rs):
    """Conventional outage probability: the same closed form with mu = 0."""
    return sop_closed_form(d_model, e_model, SecrecyConfig(rate_rs=rate_rs, mu=0.0))


def sop_quadrature(d_model, e_model, cfg, spec=None):
    """Secrecy outage probability by adaptive numerical integration.

    Integrates [F_d(lam - 1 + lam x) - F_d(mu)] f_e(x) over [c, inf); the
    subtracted conditioning constant is folded into the integrand, whose
    bracket is evaluated as a one-signed incomplete-gamma difference. This
    path shares no binomial-expansion algebra with the closed form.
    """
    _check_model(d_model, "d_model")
    _check_model(e_model, "e_model")
    _check_cfg(cfg)
    if spec is None:
        spec = _DEFAULT_QUAD_SPEC
    denom = _denominator(d_model, cfg.mu)
    lam, mu, c = cfg.lam, cfg.mu, cfg.lower_cut

    def integrand(x):
        return kernels.sop_integrand(
            x,
            d_model.big_a,
            d_model.zeta,
            d_model.shape,
            e_model.a,
            e_model.zeta,
            e_model.shape,
            lam,
            mu,
        )

    scale = e_model.params.gamma_bar
    value = integrate_semi_infinite(integrand, c, spec=spec, scale=scale) / denom
    return SopEstimate(value=value, method="quadrature")


def _ln_leading_coefficient(d_params, v):
    """ln D with F_d(x) ~ D x^v as x -> 0 for the exact composite law."""
    k, m, gbar = d_params.k, d_params.m, d_params.gamma_bar
    if abs(k - m) <= _INTEGER_TOL:
        raise UnsupportedCaseError(
            "high-SNR expansion needs k != m on the main link; the leading "
            "coefficient involves Gamma(|k - m|), which has a pole at k = m"
        )
    ln_d = (
        math.lgamma(abs(k - m))
        - math.lgamma(k)
        - math.lgamma(m)
        - math.log(v)
        + v * math.log(k * m / gbar)
    )
    return ln_d


def asop_closed_form(d_params, e_model, cfg):
    """Asymptotic (high-SNR) secrecy outage probability, closed form.

    Replaces the main-link CDF by its leading lower-tail power law and the
    transmission probability by its limit 1, leaving a pure power law
    C * gamma_bar_d^(-v) with v = min(k_d, m_d). Requires k_d != m_d and an
    integer v; non-integer orders have no finite binomial expansion and
    must use :func:`asop_quadrature`. The result is not clamped to [0, 1]:
    the asymptote legitimately exceeds 1 at low SNR.
    """
    _check_params(d_params, "d_params")
    _check_model(e_model, "e_model")
    _check_cfg(cfg)
    v_real = min(d_params.k, d_params.m)
    v = round(v_real)
    if abs(v_real - v) > _INTEGER_TOL or v < 1:
        raise NonIntegerOrderError(
            f"closed-form asymptote needs an integer diversity order, got "
            f"min(k, m) = {v_real}; use the quadrature asymptote instead"
        )
    ln_d = _ln_leading_coefficient(d_params, float(v))
    lam, mu, c = cfg.lam, cfg.mu, cfg.lower_cut
    lam_m1 = lam - 1.0
    ln_lam = math.log(lam)
    ln_lam_m1 = math.log(lam_m1) if lam_m1 > 0 else -math.inf
    ln_m = _ln_m_matrix(e_model, 0.0, c, v + 1)
    terms = []
    for f in range(v + 1):
        if lam_m1 <= 0 and f != v:
            continue
        ln_choose = (
            math.lgamma(v + 1) - math.lgamma(f + 1) - math.lgamma(v - f + 1)
        )
        ln_t = (
            ln_d
            + ln_choose
            + f * ln_lam
            + (0.0 if lam_m1 <= 0 else (v - f) * ln_lam_m1)
            + ln_m[:, f]
        )
        t = np.exp(ln_t)
        if not np.all(np.isfinite(t)):
            j_e = int(np.argwhere(~np.isfinite(t))[0][0])
            raise EvaluationError(
                f"non-finite asymptote term at (j_e={j_e}, f={f})"
            )
        terms.extend(t.tolist())
    total = math.fsum(terms)
    if mu > 0:
        corr = math.exp(ln_d + v * math.log(mu)) * _ccdf_scalar(e_model, c)
    else:
        corr = 0.0
    return SopEstimate(value=total - corr, method="asymptotic")


def asop_quadrature(d_params, e_model, cfg, spec=None):
    """Asymptotic secrecy outage probability by numerical integration.

    Valid for any real diversity order v = min(k_d, m_d) > 0 with
    k_d != m_d. The conditioning correction is folded into the integrand
    bracket, which is the same algebraic rewrite used by the exact
    quadrature path.
    """
    _check_params(d_params, "d_params")
    _check_model(e_model, "e_model")
    _check_cfg(cfg)
    if spec is None:
        spec = _DEFAULT_QUAD_SPEC
    v = float(min(d_params.k, d_params.m))
    ln_d = _ln_leading_coefficient(d_params, v)
    lam, mu, c = cfg.lam, cfg.mu, cfg.lower_cut

    def integrand(x):
        return kernels.asop_integrand(
            x, v, e_model.a, e_model.zeta, e_model.shape, lam, mu
        )

    # The leading coefficient carries the whole gamma_bar_d dependence;
    # scaling after integration keeps the quadrature (and its stopping
    # rule) identical across SNR, so the result is an exact power law.
    scale = e_model.params.gamma_bar
    moment = integrate_semi_infinite(integrand, c, spec=spec, scale=scale)
    return SopEstimate(value=math.exp(ln_d) * moment, method="asymptotic")


def asymptote_report(d_params, e_model, cfg, reference_snrs_db=(50.0, 60.0)):
    """Diversity order, coefficient and array gain of the high-SNR law.

    The coefficient C of SOP ~ C * gamma_bar_d^(-v) is scale-free by
    construction; it is nevertheless extracted at two reference SNRs and
    must agree to 1e-10 relative, which guards against any accidental SNR
    dependence leaking into the expansion.
    """
    _check_params(d_params, "d_params")
    _check_model(e_model, "e_model")
    _check_cfg(cfg)
    if len(reference_snrs_db) != 2 or reference_snrs_db[0] == reference_snrs_db[1]:
        raise InvalidParameterError("need two distinct reference SNRs in dB")
    v = float(min(d_params.k, d_params.m))
    integer_v = abs(v - round(v)) <= _INTEGER_TOL
    coefs = []
    for snr_db in reference_snrs_db:
        params = ChannelParams.from_db(d_params.k, d_params.m, snr_db)
        if integer_v:
            est = asop_closed_form(params, e_model, cfg)
        else:
            est = asop_quadrature(params, e_model, cfg)
        coefs.append(est.value * params.gamma_bar**v)
    c1, c2 = coefs
    if abs(c1 - c2) > 1e-10 * max(abs(c1), abs(c2)):
        raise InternalConsistencyError(
            f"asymptote coefficient drifts between reference SNRs: {c1!r} vs {c2!r}"
        )
    coefficient = 0.5 * (c1 + c2)
    return AsymptoteReport(
        diversity_order=v,
        coefficient=coefficient,
        array_gain=coefficient ** (-1.0 / v),
    )

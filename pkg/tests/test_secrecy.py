"""Secrecy outage probability: closed form, quadrature, and asymptotics."""

import math

import numpy as np
import pytest

from gksecrecy.channel import ChannelParams, fit_mixed_gamma
from gksecrecy.exceptions import (
    InternalConsistencyError,
    InvalidParameterError,
    NonIntegerOrderError,
    NumericalError,
    UnsupportedCaseError,
)
from gksecrecy.secrecy import (
    AsymptoteReport,
    SecrecyConfig,
    SopEstimate,
    asop_closed_form,
    asop_quadrature,
    asymptote_report,
    sop_closed_form,
    sop_conventional,
    sop_quadrature,
)
from gksecrecy.specfun import QuadratureSpec


def _model(k, m, gamma_bar_db, order=15):
    return fit_mixed_gamma(ChannelParams.from_db(k, m, gamma_bar_db), order=order)


def test_config_fields_and_computed_thresholds():
    cfg = SecrecyConfig(rate_rs=1.0, mu=3.0)
    assert cfg.rate_rs == 1.0
    assert cfg.mu == 3.0
    assert cfg.lam == 2.0
    assert cfg.lower_cut == 1.0
    assert SecrecyConfig(rate_rs=0.0).mu == 0.0
    assert SecrecyConfig(rate_rs=0.0).lam == 1.0
    np.testing.assert_allclose(SecrecyConfig(rate_rs=2.5).lam, 2.0**2.5, rtol=0.0)


def test_config_lower_cut_clamps():
    # mu < lam - 1 drives the raw limit negative; the cut clamps at zero.
    assert SecrecyConfig(rate_rs=3.0, mu=0.5).lower_cut == 0.0
    assert SecrecyConfig(rate_rs=0.0, mu=2.0).lower_cut == 2.0


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(rate_rs=-0.5),
        dict(rate_rs=math.nan),
        dict(rate_rs=math.inf),
        dict(rate_rs=1.0, mu=-1.0),
        dict(rate_rs=1.0, mu=math.nan),
    ],
)
def test_config_validation(kwargs):
    with pytest.raises(InvalidParameterError):
        SecrecyConfig(**kwargs)


def test_estimate_invariants():
    est = SopEstimate(value=0.25, method="closed_form")
    assert est.stderr is None
    with pytest.raises(InvalidParameterError):
        SopEstimate(value=0.25, method="bogus")
    with pytest.raises(InvalidParameterError):
        SopEstimate(value=0.25, method="closed_form", stderr=0.01)
    with pytest.raises(InvalidParameterError):
        SopEstimate(value=0.25, method="monte_carlo")
    SopEstimate(value=0.25, method="monte_carlo", stderr=0.01)


def test_estimate_clamps_roundoff_only():
    assert SopEstimate(value=1.0 + 5e-10, method="closed_form").value == 1.0
    assert SopEstimate(value=-5e-10, method="closed_form").value == 0.0
    with pytest.raises(InternalConsistencyError):
        SopEstimate(value=1.0 + 1e-6, method="closed_form")
    with pytest.raises(InternalConsistencyError):
        SopEstimate(value=-1e-6, method="closed_form")
    # The asymptote is a power law, legitimately above 1 at low SNR.
    assert SopEstimate(value=4.2, method="asymptotic").value == 4.2


def test_closed_vs_quadrature_across_branches():
    # Points chosen to cover lam=1, mu=0, a positive lower cut, and the
    # clamped cut with mu > 0.
    cases = [
        (0.0, 0.0, 0.0),
        (0.0, 1.0, 0.0),
        (10.0, 1.0, 3.0),
        (20.0, 2.0, 0.5),
        (30.0, 0.5, 6.0),
        (0.0, 3.0, 0.5),
    ]
    e_model = _model(3.0, 2, 0.0)
    for db, rs, mu in cases:
        d_model = _model(3.0, 2, db)
        cfg = SecrecyConfig(rate_rs=rs, mu=mu)
        closed = sop_closed_form(d_model, e_model, cfg)
        quad = sop_quadrature(d_model, e_model, cfg)
        assert closed.method == "closed_form"
        assert quad.method == "quadrature"
        assert abs(closed.value - quad.value) <= 1e-8 * max(closed.value, 1e-12)


def test_clamped_branch_agreement():
    # mu < lam - 1 exercises the clamped lower limit in both paths.
    d_model = _model(3.0, 2, 15.0)
    e_model = _model(2.0, 1, 0.0)
    cfg = SecrecyConfig(rate_rs=3.0, mu=1.0)
    assert cfg.lower_cut == 0.0
    closed = sop_closed_form(d_model, e_model, cfg)
    quad = sop_quadrature(d_model, e_model, cfg)
    assert abs(closed.value - quad.value) <= 1e-8 * max(closed.value, 1e-12)


def test_identical_channels_half():
    # R_s=0, mu=0 reduces the outage event to gamma_e > gamma_d, probability
    # 1/2 for i.i.d. continuous variates.
    for k, m in ((3.0, 2), (2.5, 1), (5.0, 4)):
        model = _model(k, m, 7.0)
        cfg = SecrecyConfig(rate_rs=0.0, mu=0.0)
        assert abs(sop_closed_form(model, model, cfg).value - 0.5) <= 1e-9
        assert abs(sop_quadrature(model, model, cfg).value - 0.5) <= 1e-8


def test_conventional_is_bitwise_mu_zero():
    d_model = _model(3.0, 2, 10.0)
    e_model = _model(3.0, 2, 1.0)
    conv = sop_conventional(d_model, e_model, 1.0)
    full = sop_closed_form(d_model, e_model, SecrecyConfig(rate_rs=1.0, mu=0.0))
    assert conv.value == full.value
    assert conv.method == full.method == "closed_form"


def test_branch_selection():
    e_model = _model(3.0, 2, 0.0)
    cfg = SecrecyConfig(rate_rs=1.0, mu=3.0)
    low = sop_closed_form(_model(3.0, 2, 0.0), e_model, cfg)
    high = sop_closed_form(_model(3.0, 2, 60.0), e_model, cfg)
    assert low.branch == "naive"
    assert high.branch == "series"
    # The series branch still matches quadrature where both are viable.
    quad = sop_quadrature(_model(3.0, 2, 60.0), e_model, cfg)
    assert abs(high.value - quad.value) <= 1e-8 * max(high.value, 1e-12)


def test_monotonicity():
    e_model = _model(3.0, 2, 0.0)
    cfg = SecrecyConfig(rate_rs=1.0, mu=3.0)
    in_d = [
        sop_closed_form(_model(3.0, 2, db), e_model, cfg).value
        for db in np.linspace(0.0, 40.0, 9)
    ]
    assert all(a >= b for a, b in zip(in_d, in_d[1:]))

    d_model = _model(3.0, 2, 10.0)
    in_e = [
        sop_closed_form(d_model, _model(3.0, 2, db), cfg).value
        for db in np.linspace(-5.0, 10.0, 7)
    ]
    assert all(a <= b for a, b in zip(in_e, in_e[1:]))

    in_rs = [
        sop_closed_form(d_model, e_model, SecrecyConfig(rate_rs=rs, mu=3.0)).value
        for rs in np.linspace(0.0, 4.0, 9)
    ]
    assert all(a <= b for a, b in zip(in_rs, in_rs[1:]))


def test_continuity_at_conventional_limit():
    d_model = _model(3.0, 2, 10.0)
    e_model = _model(3.0, 2, 0.0)
    a = sop_closed_form(d_model, e_model, SecrecyConfig(rate_rs=1.0, mu=0.0))
    b = sop_closed_form(d_model, e_model, SecrecyConfig(rate_rs=1.0, mu=1e-12))
    assert abs(a.value - b.value) <= 1e-9
    qa = sop_quadrature(d_model, e_model, SecrecyConfig(rate_rs=1.0, mu=0.0))
    qb = sop_quadrature(d_model, e_model, SecrecyConfig(rate_rs=1.0, mu=1e-12))
    assert abs(qa.value - qb.value) <= 1e-9


def test_noiseless_main_channel_limit():
    d_model = fit_mixed_gamma(ChannelParams(k=3.0, m=2, gamma_bar=1e12), order=15)
    e_model = _model(3.0, 2, 0.0)
    est = sop_closed_form(d_model, e_model, SecrecyConfig(rate_rs=1.0, mu=3.0))
    assert 0.0 <= est.value <= 1e-6


def test_denominator_guard():
    model = _model(3.0, 2, 0.0)
    cfg = SecrecyConfig(rate_rs=1.0, mu=6000.0)
    with pytest.raises(NumericalError):
        sop_closed_form(model, model, cfg)
    with pytest.raises(NumericalError):
        sop_quadrature(model, model, cfg)


def test_type_validation():
    model = _model(3.0, 2, 0.0)
    cfg = SecrecyConfig(rate_rs=1.0, mu=3.0)
    with pytest.raises(InvalidParameterError):
        sop_closed_form(model.params, model, cfg)
    with pytest.raises(InvalidParameterError):
        sop_closed_form(model, model, (1.0, 3.0))
    with pytest.raises(InvalidParameterError):
        sop_quadrature(model, model, cfg, spec=(1e-9,))
    with pytest.raises(InvalidParameterError):
        asop_closed_form(model, model, cfg)


def test_asop_rejects_equal_orders():
    e_model = _model(3.0, 2, 0.0)
    cfg = SecrecyConfig(rate_rs=1.0, mu=3.0)
    params = ChannelParams(k=3.0, m=3, gamma_bar=1e5)
    with pytest.raises(UnsupportedCaseError):
        asop_closed_form(params, e_model, cfg)
    with pytest.raises(UnsupportedCaseError):
        asop_quadrature(params, e_model, cfg)
    with pytest.raises(UnsupportedCaseError):
        asymptote_report(params, e_model, cfg)


def test_asop_noninteger_order_redirects():
    e_model = _model(3.0, 2, 0.0)
    cfg = SecrecyConfig(rate_rs=1.0, mu=3.0)
    params = ChannelParams(k=2.5, m=4, gamma_bar=1e5)
    with pytest.raises(NonIntegerOrderError):
        asop_closed_form(params, e_model, cfg)
    est = asop_quadrature(params, e_model, cfg)
    assert est.method == "asymptotic"
    assert est.value > 0.0


def test_asop_decade_power_law():
    e_model = _model(3.0, 2, 0.0)
    cfg = SecrecyConfig(rate_rs=1.0, mu=3.0)
    for k, m, v in ((3.0, 2, 2.0), (3.0, 4, 3.0), (3.0, 1, 1.0)):
        lo = asop_closed_form(ChannelParams(k=k, m=m, gamma_bar=1e5), e_model, cfg)
        hi = asop_closed_form(ChannelParams(k=k, m=m, gamma_bar=1e6), e_model, cfg)
        slope = math.log10(hi.value) - math.log10(lo.value)
        np.testing.assert_allclose(slope, -v, atol=1e-12)


def test_asop_quadrature_doubling_power_law():
    e_model = _model(3.0, 2, 0.0)
    cfg = SecrecyConfig(rate_rs=1.0, mu=3.0)
    for k, m, v in ((3.0, 2, 2.0), (2.5, 4, 2.5)):
        one = asop_quadrature(ChannelParams(k=k, m=m, gamma_bar=2e5), e_model, cfg)
        two = asop_quadrature(ChannelParams(k=k, m=m, gamma_bar=4e5), e_model, cfg)
        np.testing.assert_allclose(one.value / two.value, 2.0**v, rtol=1e-10)


def test_asop_noninteger_decade_slope():
    e_model = _model(3.0, 2, 0.0)
    cfg = SecrecyConfig(rate_rs=1.0, mu=3.0)
    lo = asop_quadrature(ChannelParams(k=2.5, m=4, gamma_bar=1e5), e_model, cfg)
    hi = asop_quadrature(ChannelParams(k=2.5, m=4, gamma_bar=1e6), e_model, cfg)
    slope = math.log10(hi.value) - math.log10(lo.value)
    np.testing.assert_allclose(slope, -2.5, atol=1e-10)


def test_asop_closed_matches_quadrature():
    e_model = _model(3.0, 2, 0.0)
    for k, m in ((3.0, 2), (3.0, 1), (3.0, 4), (5.0, 2)):
        for rs, mu in ((1.0, 3.0), (0.5, 0.0), (2.0, 0.5)):
            cfg = SecrecyConfig(rate_rs=rs, mu=mu)
            params = ChannelParams(k=k, m=m, gamma_bar=1e6)
            closed = asop_closed_form(params, e_model, cfg)
            quad = asop_quadrature(params, e_model, cfg)
            assert abs(closed.value - quad.value) <= 1e-8 * max(closed.value, 1e-300)


def test_asop_tracks_exact_sop_at_high_snr():
    e_model = _model(3.0, 2, 0.0)
    cfg = SecrecyConfig(rate_rs=1.0, mu=3.0)
    for m in (1, 2, 4, 5):
        if m == 3:
            continue
        params = ChannelParams.from_db(3.0, m, 60.0)
        exact = sop_closed_form(fit_mixed_gamma(params, order=15), e_model, cfg)
        asop = asop_closed_form(params, e_model, cfg)
        assert 0.95 <= asop.value / exact.value <= 1.05


def test_exact_sop_decade_slope_matches_diversity():
    e_model = _model(3.0, 2, 0.0)
    cfg = SecrecyConfig(rate_rs=1.0, mu=3.0)
    for m, v in ((1, 1.0), (2, 2.0), (4, 3.0), (5, 3.0)):
        lo = sop_closed_form(_model(3.0, m, 50.0), e_model, cfg)
        hi = sop_closed_form(_model(3.0, m, 60.0), e_model, cfg)
        slope = math.log10(hi.value) - math.log10(lo.value)
        np.testing.assert_allclose(slope, -v, rtol=0.02)


def test_surrogate_slope_follows_fitted_shape():
    # With non-integer k below m the fit falls back to component shape m,
    # so the surrogate's lower tail (and hence its SOP slope) follows the
    # shape, not min(k, m); the true non-integer slope lives in the
    # asymptotic quadrature path.
    e_model = _model(3.0, 2, 0.0)
    cfg = SecrecyConfig(rate_rs=1.0, mu=3.0)
    assert fit_mixed_gamma(ChannelParams(k=2.5, m=4, gamma_bar=1.0)).shape == 4
    lo = sop_quadrature(_model(2.5, 4, 50.0), e_model, cfg)
    hi = sop_quadrature(_model(2.5, 4, 60.0), e_model, cfg)
    slope = math.log10(hi.value) - math.log10(lo.value)
    np.testing.assert_allclose(slope, -4.0, rtol=0.02)


def test_asymptote_report_fields():
    e_model = _model(3.0, 2, 0.0)
    cfg = SecrecyConfig(rate_rs=1.0, mu=3.0)
    report = asymptote_report(ChannelParams(k=3.0, m=2, gamma_bar=1e5), e_model, cfg)
    assert isinstance(report, AsymptoteReport)
    assert report.diversity_order == 2.0
    assert report.coefficient > 0.0
    np.testing.assert_allclose(
        report.array_gain, report.coefficient ** (-1.0 / 2.0), rtol=1e-12
    )
    # The coefficient reproduces the asymptote at any SNR.
    for gbar in (1e4, 1e6, 1e8):
        est = asop_closed_form(ChannelParams(k=3.0, m=2, gamma_bar=gbar), e_model, cfg)
        np.testing.assert_allclose(report.evaluate(gbar), est.value, rtol=1e-10)


def test_asymptote_report_diversity_orders():
    e_model = _model(3.0, 2, 0.0)
    cfg = SecrecyConfig(rate_rs=1.0, mu=3.0)
    cases = {(3.0, 1): 1.0, (3.0, 5): 3.0, (3.0, 4): 3.0, (2.0, 5): 2.0}
    for (k, m), v in cases.items():
        report = asymptote_report(ChannelParams(k=k, m=m, gamma_bar=1.0), e_model, cfg)
        assert report.diversity_order == v


def test_asymptote_report_noninteger_order():
    e_model = _model(3.0, 2, 0.0)
    cfg = SecrecyConfig(rate_rs=1.0, mu=3.0)
    report = asymptote_report(ChannelParams(k=2.5, m=4, gamma_bar=1.0), e_model, cfg)
    assert report.diversity_order == 2.5
    est = asop_quadrature(ChannelParams(k=2.5, m=4, gamma_bar=1e6), e_model, cfg)
    np.testing.assert_allclose(report.evaluate(1e6), est.value, rtol=1e-9)


def test_asymptote_report_invariant_enforced():
    with pytest.raises(InternalConsistencyError):
        AsymptoteReport(diversity_order=2.0, coefficient=4.0, array_gain=1.0)


def test_quadrature_spec_passthrough():
    d_model = _model(3.0, 2, 20.0)
    e_model = _model(3.0, 2, 0.0)
    cfg = SecrecyConfig(rate_rs=1.0, mu=3.0)
    loose = sop_quadrature(d_model, e_model, cfg, spec=QuadratureSpec(rel_tol=1e-6))
    tight = sop_quadrature(d_model, e_model, cfg, spec=QuadratureSpec(rel_tol=1e-12))
    np.testing.assert_allclose(loose.value, tight.value, rtol=1e-5)


def test_random_grid_equivalence():
    rng = np.random.default_rng(2026)
    e_base = {}
    for _ in range(25):
        k = float(rng.choice([2.0, 3.0, 5.0]))
        m = int(rng.choice([1, 2, 4]))
        gd = float(10.0 ** rng.uniform(0.0, 4.0))
        ge = float(rng.uniform(0.5, 4.0))
        rs = float(rng.uniform(0.5, 3.0))
        mu = float(rng.uniform(0.0, 6.0))
        d_model = fit_mixed_gamma(ChannelParams(k=k, m=m, gamma_bar=gd), order=15)
        key = (k, m, ge)
        if key not in e_base:
            e_base[key] = fit_mixed_gamma(ChannelParams(k=k, m=m, gamma_bar=ge), order=15)
        cfg = SecrecyConfig(rate_rs=rs, mu=mu)
        closed = sop_closed_form(d_model, e_base[key], cfg)
        quad = sop_quadrature(d_model, e_base[key], cfg)
        assert abs(closed.value - quad.value) <= 1e-8 * max(closed.value, 1e-12)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])

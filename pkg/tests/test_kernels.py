"""Agreement between the numba kernel lane and the pure-numpy reference lane."""

import numpy as np
import pytest

from gksecrecy import _kernels_numpy as knp
from gksecrecy.channel import ChannelParams, fit_mixed_gamma

try:
    from gksecrecy import _kernels_numba as knb

    HAVE_NUMBA = True
except ImportError:
    knb = None
    HAVE_NUMBA = False

needs_numba = pytest.mark.skipif(not HAVE_NUMBA, reason="numba lane unavailable")


def _models():
    d = fit_mixed_gamma(ChannelParams(k=3.0, m=2, gamma_bar=100.0), order=15)
    e = fit_mixed_gamma(ChannelParams(k=2.5, m=1, gamma_bar=1.0), order=15)
    return d, e


def _grid():
    rng = np.random.default_rng(7)
    x = np.concatenate(([0.0, 1e-12, 1e-6], rng.uniform(0.01, 50.0, 200), [500.0, 5000.0]))
    return np.sort(x)


@needs_numba
def test_backend_names():
    assert knp.BACKEND_NAME == "numpy"
    assert knb.BACKEND_NAME == "numba"


@needs_numba
def test_mix_pdf_agreement():
    d, e = _models()
    x = _grid()
    for model in (d, e):
        ref = knp.mix_pdf(x, model.a, model.zeta, model.shape)
        got = knb.mix_pdf(x, model.a, model.zeta, model.shape)
        np.testing.assert_allclose(got, ref, rtol=1e-12, atol=1e-300)


@needs_numba
def test_mix_cdf_agreement():
    d, e = _models()
    x = _grid()
    for model in (d, e):
        ref = knp.mix_cdf(x, model.big_a, model.zeta, model.shape)
        got = knb.mix_cdf(x, model.big_a, model.zeta, model.shape)
        np.testing.assert_allclose(got, ref, rtol=1e-12, atol=1e-300)


@needs_numba
def test_mix_ccdf_agreement():
    d, e = _models()
    x = _grid()
    for model in (d, e):
        ref = knp.mix_ccdf(x, model.big_a, model.zeta, model.shape)
        got = knb.mix_ccdf(x, model.big_a, model.zeta, model.shape)
        np.testing.assert_allclose(got, ref, rtol=1e-12, atol=1e-300)


@needs_numba
def test_sop_integrand_agreement():
    d, e = _models()
    x = _grid()
    for lam, mu in ((2.0, 0.0), (2.0, 3.0), (1.0, 0.0), (16.0, 6.0)):
        ref = knp.sop_integrand(
            x, d.big_a, d.zeta, d.shape, e.a, e.zeta, e.shape, lam, mu
        )
        got = knb.sop_integrand(
            x, d.big_a, d.zeta, d.shape, e.a, e.zeta, e.shape, lam, mu
        )
        np.testing.assert_allclose(got, ref, rtol=1e-11, atol=1e-300)


@needs_numba
def test_asop_integrand_agreement():
    _, e = _models()
    x = _grid()
    for v, lam, mu in ((1.0, 2.0, 0.0), (2.0, 2.0, 3.0), (2.5, 4.0, 1.0)):
        ref = knp.asop_integrand(x, v, e.a, e.zeta, e.shape, lam, mu)
        got = knb.asop_integrand(x, v, e.a, e.zeta, e.shape, lam, mu)
        np.testing.assert_allclose(got, ref, rtol=1e-12, atol=1e-300)


@needs_numba
def test_count_events_agreement():
    rng = np.random.default_rng(11)
    gamma_d = rng.gamma(2.0, 5.0, 100_000)
    gamma_e = rng.gamma(2.0, 1.0, 100_000)
    for lam, mu in ((2.0, 0.0), (2.0, 3.0), (1.0, 0.0)):
        acc_ref, leak_ref = knp.count_events(gamma_d, gamma_e, lam, mu)
        acc_got, leak_got = knb.count_events(gamma_d, gamma_e, lam, mu)
        assert (acc_got, leak_got) == (acc_ref, leak_ref)
        assert 0 <= leak_ref <= acc_ref <= gamma_d.size


@needs_numba
def test_deep_tail_sop_integrand_agreement():
    # Exercise the one-signed incomplete-gamma differences at extreme scale
    # by pushing the destination SNR to 80 dB.
    d = fit_mixed_gamma(ChannelParams(k=3.0, m=2, gamma_bar=1e8), order=15)
    e = fit_mixed_gamma(ChannelParams(k=3.0, m=2, gamma_bar=1.0), order=15)
    x = np.geomspace(1e-4, 100.0, 300)
    ref = knp.sop_integrand(x, d.big_a, d.zeta, d.shape, e.a, e.zeta, e.shape, 2.0, 3.0)
    got = knb.sop_integrand(x, d.big_a, d.zeta, d.shape, e.a, e.zeta, e.shape, 2.0, 3.0)
    assert np.all(ref >= 0.0)
    np.testing.assert_allclose(got, ref, rtol=1e-11, atol=1e-320)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])

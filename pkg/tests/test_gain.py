import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twinbeam.dispersion import G_THRESHOLD, Timescales, linearized_mismatch
from twinbeam.errors import AboveThreshold, ConfigError, InvalidCoeffs, NearThresholdWarning
from twinbeam.gain import (
    BogoliubovCoeffs,
    TwinBeamModel,
    copro_coefficients,
    mopo_coefficients,
    squeeze_params,
)


def counter_mm():
    return linearized_mismatch(Timescales(tau_gvs=1.0, tau_gvm=0.0, tau_gvd=0.0), "counter")


def co_mm():
    return linearized_mismatch(Timescales(tau_gvs=1.0, tau_gvm=0.0, tau_gvd=1.0), "co")


def counter_v2(g, d):
    # |v|^2 = g^2 sin^2(gam)/gam^2 / (cos^2 gam + d^2 sin^2(gam)/gam^2)
    gam = np.hypot(g, d)
    s2 = (np.sin(gam) / gam) ** 2
    return g * g * s2 / (np.cos(gam) ** 2 + d * d * s2)


@pytest.mark.parametrize("g, expected", [(1.0, 2.4255), (0.5, 0.29844), (1.4, 33.615)])
def test_counter_peak_gain_is_tan_squared(g, expected):
    c = mopo_coefficients(0.0, g, counter_mm())
    assert abs(c.v_s) ** 2 == pytest.approx(np.tan(g) ** 2, abs=0, rel=1e-13)
    assert abs(c.v_s) ** 2 == pytest.approx(expected, abs=0, rel=1e-4)


@pytest.mark.parametrize("g, x", [(0.8, np.pi), (0.3, 1.7), (1.2, 0.4), (1.5, 7.0)])
def test_counter_offset_gain_matches_closed_form(g, x):
    c = mopo_coefficients(x, g, counter_mm())
    assert abs(c.v_s) ** 2 == pytest.approx(counter_v2(g, x), abs=0, rel=1e-12)
    assert abs(c.u_s) ** 2 == pytest.approx(1 + counter_v2(g, x), abs=0, rel=1e-12)


def test_counter_zero_gain_is_identity_up_to_phase():
    w = np.linspace(-5, 5, 101)
    c = mopo_coefficients(w, 0.0, counter_mm())
    assert np.all(c.v_s == 0) and np.all(c.v_i == 0)
    np.testing.assert_allclose(np.abs(c.u_s), 1.0, rtol=1e-14)
    np.testing.assert_allclose(np.abs(c.u_i), 1.0, rtol=1e-14)


@pytest.mark.parametrize("g, expected", [(1.0, 1.3811), (2.0, 13.154)])
def test_co_peak_gain_is_sinh_squared(g, expected):
    c = copro_coefficients(0.0, g, co_mm())
    assert abs(c.v_s) ** 2 == pytest.approx(np.sinh(g) ** 2, abs=0, rel=1e-13)
    assert abs(c.v_s) ** 2 == pytest.approx(expected, abs=0, rel=1e-4)


def test_co_trigonometric_branch():
    g, d = 0.5, 2.0
    # normalized co model: d = W^2 with unit tau_gvd
    c = copro_coefficients(np.sqrt(d), g, co_mm())
    x = np.sqrt(d * d - g * g)
    assert abs(c.v_s) ** 2 == pytest.approx(g * g * (np.sin(x) / x) ** 2, abs=0, rel=1e-12)


def test_co_continuous_through_branch_point():
    g = 1.0
    w0 = np.sqrt(g)  # d = g, Gamma = 0
    dw = 1e-9
    c = copro_coefficients(np.array([w0 - dw, w0, w0 + dw]), g, co_mm())
    assert np.max(np.abs(np.diff(c.u_s))) < 1e-8
    assert np.max(np.abs(np.diff(c.v_s))) < 1e-8
    assert abs(c.v_s[1]) == pytest.approx(g, abs=0, rel=1e-12)  # S -> 1 at Gamma = 0


@pytest.mark.parametrize("geometry", ["counter", "co"])
def test_amplitude_identity(geometry):
    m = TwinBeamModel.normalized(1.2, geometry)
    c = m(np.linspace(-8, 8, 401))
    lhs = (np.abs(c.u_s) - np.abs(c.v_s)) * (np.abs(c.u_s) + np.abs(c.v_s))
    np.testing.assert_allclose(lhs, 1.0, rtol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 1.569), st.floats(-50.0, 50.0), st.floats(0.0, 2 * np.pi), st.floats(-0.5, 0.5))
def test_counter_unitarity_property(g, w, phi_p, tgvm):
    ts = Timescales(tau_gvs=1.0, tau_gvm=tgvm, tau_gvd=0.01)
    c = mopo_coefficients(np.array([w]), g, linearized_mismatch(ts, "counter"), phi_p)
    assert c.unitarity_residual() < 1e-12


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 6.0), st.floats(-20.0, 20.0), st.floats(0.0, 2 * np.pi), st.floats(-2.0, 2.0))
def test_co_unitarity_property(g, w, phi_p, tgvm):
    ts = Timescales(tau_gvs=1.0, tau_gvm=tgvm, tau_gvd=1.0)
    c = copro_coefficients(np.array([w]), g, linearized_mismatch(ts, "co"), phi_p)
    assert c.unitarity_residual() < 1e-12


def fwhm(model):
    w = np.linspace(0, 4, 40001)
    p = np.abs(model(w).v_s) ** 2
    return 2 * w[np.argmax(p < 0.5 * p[0])]


def test_counter_bandwidth_narrows_with_gain():
    widths = [fwhm(TwinBeamModel.normalized(g, "counter")) for g in (0.2, 0.6, 1.0, 1.3, 1.5)]
    assert all(a > b for a, b in zip(widths, widths[1:]))


def test_squeeze_params_at_degeneracy():
    g, phi_p = 0.9, 1.0
    c = mopo_coefficients(0.0, g, counter_mm(), phi_p)
    sp = squeeze_params(c)
    assert sp.r == pytest.approx(np.arcsinh(np.tan(g)), abs=0, rel=1e-13)
    unit = squeeze_params(mopo_coefficients(0.0, 1.0, counter_mm()))
    assert unit.r == pytest.approx(1.22619, abs=0, rel=1e-5)
    assert np.cosh(sp.r) == pytest.approx(1 / np.cos(g), abs=0, rel=1e-13)
    assert sp.theta == pytest.approx(phi_p / 2, abs=0, rel=1e-12)
    wrapped = squeeze_params(mopo_coefficients(0.0, g, counter_mm(), 4.0))
    assert wrapped.theta == pytest.approx(2.0, abs=0, rel=1e-12)
    assert 0 <= wrapped.theta < np.pi


def test_squeeze_params_degenerate_flag():
    c = mopo_coefficients(np.array([0.0, 1.0]), 0.0, counter_mm())
    sp = squeeze_params(c)
    assert np.all(sp.degenerate) and np.all(sp.theta == 0) and np.all(sp.r == 0)


def test_invalid_coeffs(rng):
    z = lambda: rng.normal(size=5) + 1j * rng.normal(size=5)
    c = BogoliubovCoeffs(np.arange(5.0), z(), z(), z(), z())
    with pytest.raises(InvalidCoeffs):
        squeeze_params(c)


def test_threshold_contract():
    with pytest.raises(AboveThreshold):
        mopo_coefficients(0.0, G_THRESHOLD, counter_mm())
    with pytest.raises(AboveThreshold):
        TwinBeamModel.normalized(1.6, "counter")
    with pytest.raises(ConfigError):
        copro_coefficients(0.0, -1.0, co_mm())
    TwinBeamModel.normalized(3.0, "co")


def test_near_threshold_warning():
    with pytest.warns(NearThresholdWarning):
        mopo_coefficients(0.0, G_THRESHOLD - 5e-4, counter_mm())
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        mopo_coefficients(0.0, G_THRESHOLD - 5e-3, counter_mm())
        TwinBeamModel.normalized(G_THRESHOLD - 5e-4)(0.0)  # the provider stays silent


def test_model_feature_scales():
    m = TwinBeamModel.normalized(1.5)
    eps = G_THRESHOLD - 1.5
    assert m.epsilon == pytest.approx(eps)
    assert m.breakpoints() == pytest.approx([-1.5 * np.sin(eps), 1.5 * np.sin(eps)])
    assert TwinBeamModel.normalized(0.0).breakpoints() == []
    assert m.with_gain(0.3).gain == 0.3


@pytest.mark.parametrize("g", [0.1, 0.5, 1.0, 1.4, 1.5])
def test_counter_unitarity_wide_grid(g):
    c = TwinBeamModel.normalized(g)(np.linspace(-30, 30, 10_000))
    assert c.unitarity_residual() < 1e-10


@pytest.mark.parametrize("geometry", ["counter", "co"])
def test_squeezing_from_amplitudes(geometry):
    c = TwinBeamModel.normalized(1.3, geometry)(np.linspace(-5, 5, 201))
    sp = squeeze_params(c)
    np.testing.assert_allclose(np.exp(-2 * sp.r), (np.abs(c.u_s) - np.abs(c.v_i)) ** 2, rtol=1e-10)
    np.testing.assert_allclose(np.exp(-2 * sp.r) * np.exp(2 * sp.r), 1.0, rtol=1e-12)


def test_counter_gain_spectrum_is_even():
    w = np.linspace(0, 6, 301)
    m = TwinBeamModel.normalized(1.2)
    np.testing.assert_allclose(np.abs(m(w).v_s), np.abs(m(-w).v_s), rtol=1e-13)

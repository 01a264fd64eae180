import numpy as np
import pytest

from twinbeam.dispersion import G_THRESHOLD, Timescales
from twinbeam.errors import ConfigError, NoCrossing
from twinbeam.gain import TwinBeamModel, squeeze_params
from twinbeam.spectra import (
    PhaseChoice,
    SpectrumSeries,
    default_grid,
    fixed_angle_identity,
    intensity_spectrum,
    reference_phase_sum,
    squeezing_bandwidth,
    squeezing_spectrum,
)


def test_default_grids():
    counter = default_grid(TwinBeamModel.normalized(1.0, "counter"))
    co = default_grid(TwinBeamModel.normalized(1.0, "co"))
    assert counter.size == 2049 and counter[0] == -6 and counter[-1] == 6
    assert co.size == 4097 and co[0] == -3 and co[-1] == 3
    assert counter[1024] == 0 and co[2048] == 0


def test_intensity_peak_and_normalisation():
    model = TwinBeamModel.normalized(1.4)
    spec = intensity_spectrum(default_grid(model), model)
    assert spec["intensity"].max() == pytest.approx(np.tan(1.4) ** 2, abs=0, rel=1e-12)
    assert spec["intensity"].max() == pytest.approx(33.615, abs=0, rel=1e-4)
    assert spec["intensity_normalized"][1024] == 1.0


@pytest.mark.parametrize("geometry, power", [("counter", 1), ("co", 2)])
def test_weak_gain_shape_is_sinc_squared(geometry, power):
    # counter: d = W tau_gvs;  co: d = (W tau_gvd)^2
    model = TwinBeamModel.normalized(0.01, geometry)
    x = np.linspace(-3, 3, 301)
    spec = intensity_spectrum(x, model)
    d = x**power
    np.testing.assert_allclose(spec["intensity_normalized"], np.sinc(d / np.pi) ** 2, atol=1e-4)


@pytest.mark.parametrize("g", [0.3, 1.0, 1.5])
def test_optimal_sigma_at_degeneracy(g):
    model = TwinBeamModel.normalized(g)
    spec = squeezing_spectrum(np.array([0.0]), model)
    # e^{-2r} with sinh r = tan g
    assert spec["sigma"][0] == pytest.approx(((1 - np.sin(g)) / np.cos(g)) ** 2, abs=0, rel=1e-11)


def test_optimal_sigma_unit_gain_value():
    spec = squeezing_spectrum(np.array([0.0]), TwinBeamModel.normalized(1.0))
    assert spec["sigma"][0] == pytest.approx(0.0860883, abs=0, rel=1e-6)


def test_near_threshold_sigma_is_tan_squared_half_eps():
    eps = 0.1
    spec = squeezing_spectrum(np.array([0.0]), TwinBeamModel.normalized(G_THRESHOLD - eps))
    assert spec["sigma"][0] == pytest.approx(np.tan(eps / 2) ** 2, abs=0, rel=1e-9)
    assert spec["sigma"][0] == pytest.approx(2.5042e-3, abs=0, rel=1e-4)


@pytest.mark.parametrize("geometry, g", [("counter", 0.7), ("counter", 1.4), ("co", 1.0), ("co", 2.5)])
def test_optimal_spectrum_is_minimum_uncertainty(geometry, g):
    model = TwinBeamModel.normalized(g, geometry)
    grid = default_grid(model, 401)
    spec = squeezing_spectrum(grid, model)
    r = spec["r"]
    np.testing.assert_allclose(spec["sigma"], np.exp(-2 * r), rtol=1e-9, atol=1e-14)
    np.testing.assert_allclose(spec["sigma"] * spec["sigma_anti"], 1.0, rtol=1e-9)
    np.testing.assert_allclose(spec["sigma"], spec["sigma"][::-1], rtol=1e-12)


def test_fixed_angle_is_never_better_than_optimal():
    ts = Timescales(tau_gvs=1.0, tau_gvm=0.2, tau_gvd=0.01)
    model = TwinBeamModel.linearized(1.2, ts, "counter", pump_phase=0.4)
    grid = default_grid(model, 801)
    opt = squeezing_spectrum(grid, model)["sigma"]
    fixed = squeezing_spectrum(grid, model, PhaseChoice("fixed"))["sigma"]
    assert np.all(opt <= fixed * (1 + 1e-12))
    assert np.all(fixed > 0) and np.all(opt > 0)


def test_fixed_spectrum_matches_angle_identity():
    model = TwinBeamModel.normalized(1.0)
    grid = default_grid(model, 241)
    fixed = squeezing_spectrum(grid, model, PhaseChoice("fixed"))["sigma"]
    sp = squeeze_params(model(grid))
    theta0 = 0.5 * reference_phase_sum(model)
    ident = fixed_angle_identity(sp.r, sp.theta, theta0)
    np.testing.assert_allclose(fixed, ident["sigma"], rtol=1e-9, atol=1e-12)
    np.testing.assert_allclose(ident["squeezed_part"] + ident["excess_part"], ident["sigma"])


@pytest.mark.parametrize("r, dtheta, expected", [
    (1.0, np.pi / 4, 3.7622),
    (0.5, 0.3, np.exp(-1.0) + 2 * np.sinh(1.0) * np.sin(0.3) ** 2),
    (0.8, 0.0, np.exp(-1.6)),
])
def test_angle_identity_examples(r, dtheta, expected):
    out = fixed_angle_identity(r, 0.2 + dtheta, 0.2)
    assert out["sigma"] == pytest.approx(expected, abs=0, rel=1e-4)


def test_angle_identity_synthetic_quadrature(rng):
    # direct quadrature variance |cosh r - sinh r e^{2i(theta - theta0)}|^2 as oracle
    r = rng.uniform(0, 2, 30)
    theta, theta0 = rng.uniform(0, np.pi, 30), rng.uniform(0, np.pi, 30)
    direct = np.abs(np.cosh(r) - np.sinh(r) * np.exp(2j * (theta - theta0))) ** 2
    np.testing.assert_allclose(fixed_angle_identity(r, theta, theta0)["sigma"], direct, rtol=1e-12)


def test_delay_reduces_squeezing_by_cosine():
    g, delay = 1.0, 0.3
    model = TwinBeamModel.normalized(g)
    grid = np.linspace(-3, 3, 121)
    spec = squeezing_spectrum(grid, model, PhaseChoice("optimal", delay=delay))
    r = spec["r"]
    expected = np.cosh(2 * r) - np.sinh(2 * r) * np.abs(np.cos(grid * delay))
    np.testing.assert_allclose(spec["sigma"], expected, rtol=1e-9, atol=1e-13)


def test_coupling_zero_flags_undefined_angle():
    g = 1.0
    x0 = np.sqrt(np.pi**2 - g * g)  # gamma = pi, sinc(gamma) = 0
    model = TwinBeamModel.normalized(g)
    spec = squeezing_spectrum(np.array([-x0, 0.0, 1.0, x0]), model)
    assert spec.flags["angle_undefined"].tolist() == [True, False, False, True]
    assert spec["sigma"][3] == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("g", [0.5, 1.0, 1.5])
def test_counter_bandwidth_closed_form(g):
    bw = squeezing_bandwidth(TwinBeamModel.normalized(g))
    assert bw.closed_form == pytest.approx(np.sqrt(np.pi**2 - g * g), abs=0, rel=1e-14)
    assert bw.omega == pytest.approx(bw.closed_form, abs=0, rel=1e-7)


def test_bandwidth_examples():
    assert squeezing_bandwidth(TwinBeamModel.normalized(1.0)).omega == pytest.approx(2.97819, abs=0, rel=2e-6)
    # the threshold limit of the closed form
    assert np.sqrt(np.pi**2 - G_THRESHOLD**2) == pytest.approx(2.7207, abs=0, rel=1e-4)


def test_bandwidth_no_crossing():
    with pytest.raises(NoCrossing):
        squeezing_bandwidth(TwinBeamModel.normalized(0.0))
    with pytest.raises(ConfigError):
        squeezing_bandwidth(TwinBeamModel.normalized(1.0), PhaseChoice("optimal"))


def test_co_bandwidth_has_no_closed_form():
    bw = squeezing_bandwidth(TwinBeamModel.normalized(1.0, "co"))
    assert bw.closed_form is None
    assert 0 < bw.omega_normalized < 3


def test_spectrum_series_validation():
    with pytest.raises(ConfigError):
        SpectrumSeries(np.array([0.0, 0.0]), np.array([0.0, 0.0]), {})
    with pytest.raises(ConfigError):
        SpectrumSeries(np.array([0.0, 1.0]), np.array([0.0, 1.0]), {"sigma": np.array([1.0, -0.1])})
    with pytest.raises(ConfigError):
        SpectrumSeries(np.array([0.0, 1.0]), np.array([0.0, 1.0]), {"x": np.zeros(3)})
    with pytest.raises(ConfigError):
        PhaseChoice("best")


def test_zero_gain_is_shot_noise():
    model = TwinBeamModel.normalized(0.0)
    for mode in ("optimal", "fixed"):
        spec = squeezing_spectrum(np.linspace(-3, 3, 31), model, PhaseChoice(mode))
        np.testing.assert_allclose(spec["sigma"], 1.0, rtol=1e-14)

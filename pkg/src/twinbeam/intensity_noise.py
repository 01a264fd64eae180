"""Intensity-difference noise of the twin beams.

Shot noise of the difference I_s - I_i is SN = <I_s> + <I_i>. Its
fluctuation spectrum is the convolution

    V(W) = int dW'/2pi |u_s(W') conj(v_i(-W-W')) - u_s(W+W') conj(v_i(-W'))|^2,

and the variance of the photon-number difference counted in a window T_d is
T_d^2 int dW/2pi sinc^2(T_d W/2) V(W). The same variance follows in the time
domain from the Gaussian factorisation of the intensity correlation into
field correlations; both routes are implemented.

Integration domains are truncated at ``cutoff`` times the natural bandwidth
(Omega_gvs for counter-propagation). Shot noise is integrated over the same
range, so V/SN tends to 1 far from the carrier.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.integrate import trapezoid
from scipy.interpolate import CubicSpline

from .errors import ConfigError
from .gain import TwinBeamModel
from .numerics import fourier_series, integrate, sinc
from .spectra import SpectrumSeries

__all__ = [
    "DEFAULT_CUTOFF",
    "CORRELATION_CUTOFF",
    "mean_intensity",
    "shot_noise",
    "vminus_spectrum",
    "vminus_spontaneous",
    "vminus_near_threshold",
    "lorentzian_phi2",
    "photon_number_variance",
    "variance_curve",
    "variance_spontaneous",
    "default_detection_times",
    "FieldCorrelations",
    "field_correlations",
    "CorrelationDifference",
    "intensity_correlation_difference",
    "photon_number_variance_time_domain",
    "NoiseReport",
    "noise_report",
]

# spectral cutoffs in units of the natural bandwidth
DEFAULT_CUTOFF = 300.0
CORRELATION_CUTOFF = 1000.0
REL_TOL = 1e-6
ABS_FLOOR = 1e-14  # absolute tolerance floor, relative to shot noise


def _seeds(model: TwinBeamModel, shift: float = 0.0) -> list[float]:
    pts = model.breakpoints()
    return pts + [p - shift for p in pts]


def mean_intensity(model: TwinBeamModel, cutoff: float = DEFAULT_CUTOFF, rel_tol: float = REL_TOL) -> float:
    """Photon flux <I_s> = <I_i> = int dW/2pi |v_s(W)|^2 (photons/s)."""
    if model.gain == 0:
        return 0.0
    b = model.bandwidth
    lim = cutoff * b

    def f(w):
        return np.abs(model(w).v_s) ** 2

    res = integrate(f, -lim, lim, rel_tol, _seeds(model), n_initial=int(np.ceil(2 * cutoff)))
    return float(res.value) / (2 * np.pi)


def shot_noise(model: TwinBeamModel, cutoff: float = DEFAULT_CUTOFF, rel_tol: float = REL_TOL) -> float:
    """SN = <I_s> + <I_i>."""
    return 2.0 * mean_intensity(model, cutoff, rel_tol)


def _vminus_point(model, omega, cutoff, rel_tol, abs_tol):
    b = model.bandwidth
    lim = cutoff * b
    lo = -lim - max(omega, 0.0)
    hi = lim - min(omega, 0.0)

    def f(w):
        c1 = model(w)
        c2 = model(w + omega)
        return np.abs(c1.u_s * np.conj(c2.v_i) - c2.u_s * np.conj(c1.v_i)) ** 2

    n_init = int(np.ceil((hi - lo) / b))
    res = integrate(f, lo, hi, rel_tol, _seeds(model, omega), abs_tol=abs_tol, n_initial=n_init)
    return float(res.value) / (2 * np.pi)


def vminus_spontaneous(x):
    """Low-gain limit of V/SN: 1 - sinc(x), x = W/Omega_gvs."""
    return 1.0 - sinc(x)


def vminus_near_threshold(x, g):
    """Near-threshold V/SN with G = sqrt(g^2 + x^2):
    (G - g sin G)/(G + g sin G)."""
    x = np.asarray(x, dtype=float)
    big = np.sqrt(g * g + x * x)
    return (big - g * np.sin(big)) / (big + g * np.sin(big))


def lorentzian_phi2(x, g):
    """Pole approximation of |phi(W)|^2 near threshold:
    (g^2 + x^2)/(g^2 sin^2(eps) + x^2), eps = pi/2 - g."""
    x = np.asarray(x, dtype=float)
    eps = np.pi / 2 - g
    return (g * g + x * x) / (g * g * np.sin(eps) ** 2 + x * x)


def vminus_spectrum(grid, model: TwinBeamModel, cutoff: float = DEFAULT_CUTOFF,
                    rel_tol: float = REL_TOL) -> SpectrumSeries:
    """Intensity-difference noise spectrum on ``grid`` (rad/s).

    Series: ``vminus`` (photons/s), ``vminus_normalized`` (V/SN) and, for
    counter-propagation, the analytic overlays ``spontaneous`` and
    ``near_threshold``. ``attrs["shot_noise"]`` holds SN.
    """
    omega = np.asarray(grid, dtype=float)
    sn = shot_noise(model, cutoff, rel_tol)
    values = np.zeros_like(omega)
    if sn > 0:
        abs_tol = ABS_FLOOR * sn
        for j, w in enumerate(omega):
            values[j] = _vminus_point(model, float(w), cutoff, rel_tol, abs_tol)
    norm = values / sn if sn > 0 else np.ones_like(values)
    x = omega / model.bandwidth
    series = {"vminus": values, "vminus_normalized": norm}
    if model.geometry == "counter":
        series["spontaneous"] = vminus_spontaneous(x)
        series["near_threshold"] = vminus_near_threshold(x, model.gain)
    attrs = {"shot_noise": sn, "cutoff": cutoff, "gain": model.gain}
    return SpectrumSeries(omega, x, series, attrs=attrs)


def variance_spontaneous(t_d, tau_gvs: float):
    """Low-gain variance ratio: 1 - T/(2 tau) for T <= tau, tau/(2T) beyond."""
    t = np.asarray(t_d, dtype=float)
    if np.any(t <= 0):
        raise ConfigError("detection time must be positive")
    return np.where(t <= tau_gvs, 1.0 - t / (2.0 * tau_gvs), tau_gvs / (2.0 * np.maximum(t, tau_gvs)))[()]


def default_detection_times(tau_gvs: float, n: int = 40) -> np.ndarray:
    """Logarithmic grid from 0.05 to 50 tau_gvs."""
    return np.geomspace(0.05, 50.0, n) * tau_gvs


def _deficit_nodes(model: TwinBeamModel, omega_max: float) -> np.ndarray:
    """Positive offsets resolving the near-threshold core, the sinc
    oscillations and the slowly decaying tail of 1 - V/SN."""
    b = model.bandwidth
    w = min(model.feature_width, b)
    parts = [
        np.linspace(0.0, 10.0 * w, 101),
        np.linspace(0.0, 2.0 * b, 201),
        np.linspace(2.0 * b, 12.0 * b, 201),
        np.arange(12.0 * b, min(60.0 * b, omega_max), 0.25 * b),
        np.arange(60.0 * b, omega_max, 0.5 * b),
        [omega_max],
    ]
    nodes = np.unique(np.concatenate([np.asarray(p, dtype=float) for p in parts]))
    nodes = nodes[nodes <= omega_max]
    # drop near-duplicates from overlapping pieces
    keep = np.concatenate([[True], np.diff(nodes) > 1e-9 * b])
    return nodes[keep]


def _window_cut(model: TwinBeamModel, t_d: float) -> float:
    return max(30.0 * model.bandwidth, 20.0 / t_d)


def variance_curve(t_grid, model: TwinBeamModel, cutoff: float = DEFAULT_CUTOFF,
                   rel_tol: float = REL_TOL) -> np.ndarray:
    """Photon-number-difference variance over shot noise for each window T_d.

    With the deficit d(W) = 1 - V(W)/SN, the flat shot-noise part of the
    window integral is done exactly and

        ratio = 1 - (T_d/pi) int_0^cut sinc^2(T_d W/2) d(W) dW,

    cut = max(30 Omega_gvs, 20/T_d). The deficit is tabulated once on
    :func:`_deficit_nodes` and interpolated by a cubic spline with zero
    slope at W = 0 (V is even).
    """
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if np.any(t_grid <= 0):
        raise ConfigError("detection times must be positive")
    if model.gain == 0:
        return np.ones_like(t_grid)
    omega_max = max(_window_cut(model, t) for t in t_grid)
    nodes = _deficit_nodes(model, omega_max)
    vm = vminus_spectrum(nodes, model, cutoff, rel_tol)
    deficit = CubicSpline(nodes, 1.0 - vm["vminus_normalized"], bc_type=((1, 0.0), "not-a-knot"))
    out = np.empty_like(t_grid)
    for j, t in enumerate(t_grid):
        cut = _window_cut(model, t)

        def f(w, t=t):
            return sinc(0.5 * t * w) ** 2 * deficit(w)

        n_init = int(np.ceil(cut * t / np.pi)) + int(np.ceil(cut / model.bandwidth))
        res = integrate(f, 0.0, cut, rel_tol, nodes[nodes < 12 * model.bandwidth],
                        abs_tol=1e-12 * cut, n_initial=n_init)
        out[j] = 1.0 - t / np.pi * float(res.value)
    return out


def photon_number_variance(t_d: float, model: TwinBeamModel, cutoff: float = DEFAULT_CUTOFF,
                           rel_tol: float = REL_TOL) -> float:
    """Variance of N_s - N_i in a window ``t_d`` (s) over its shot-noise value."""
    return float(variance_curve([t_d], model, cutoff, rel_tol)[0])


class FieldCorrelations(NamedTuple):
    """Second-order field moments versus time difference.

    ``self_corr`` is <A_s^dagger(t) A_s(t + tau)> and ``cross_corr`` is
    <A_s(t) A_i(t + tau)>, both in photons/s.
    """

    tau: np.ndarray
    self_corr: np.ndarray
    cross_corr: np.ndarray


def _l1_scale(f, lim, model):
    res = integrate(lambda w: np.abs(f(w)), -lim, lim, 1e-3, _seeds(model),
                    n_initial=int(np.ceil(2 * lim / model.bandwidth)))
    return float(res.value) / (2 * np.pi)


def field_correlations(tau_grid, model: TwinBeamModel, cutoff: float = CORRELATION_CUTOFF,
                       rel_tol: float = REL_TOL) -> FieldCorrelations:
    """Fourier transforms self(tau) = int dW/2pi e^{iW tau} |v_s(W)|^2 and
    cross(tau) = int dW/2pi e^{-iW tau} u_s(W) v_i(-W)."""
    tau = np.atleast_1d(np.asarray(tau_grid, dtype=float))
    lim = cutoff * model.bandwidth
    if model.gain == 0:
        zero = np.zeros(tau.shape, dtype=complex)
        return FieldCorrelations(tau, zero, zero.copy())

    def spec_self(w):
        return np.abs(model(w).v_s) ** 2

    def spec_cross(w):
        c = model(w)
        return c.u_s * c.v_i

    seeds = _seeds(model)
    n_init = int(np.ceil(2 * cutoff))
    out = []
    for spec, sign in ((spec_self, +1), (spec_cross, -1)):
        floor = rel_tol * _l1_scale(spec, lim, model)
        out.append(fourier_series(spec, tau, lim, rel_tol, seeds, sign=sign,
                                  abs_tol=floor * 2 * np.pi, n_initial=n_init))
    return FieldCorrelations(tau, out[0], out[1])


class CorrelationDifference(NamedTuple):
    """<dI(t) dI(t + tau)> for I = I_s - I_i: ``delta_weight`` multiplies
    delta(tau) and ``smooth`` is the regular part (photons^2/s^2)."""

    tau: np.ndarray
    smooth: np.ndarray
    delta_weight: float


def intensity_correlation_difference(tau_grid, model: TwinBeamModel, cutoff: float = CORRELATION_CUTOFF,
                                     rel_tol: float = REL_TOL) -> CorrelationDifference:
    """Gaussian factorisation G_ss + G_ii - G_si(tau) - G_si(-tau).

    The self terms give delta(tau) <I> + |self(tau)|^2 each; the cross terms
    give |cross(+-tau)|^2. The delta weight equals the shot noise over the
    same spectral range.
    """
    tau = np.atleast_1d(np.asarray(tau_grid, dtype=float))
    both = np.concatenate([tau, -tau])
    fc = field_correlations(both, model, cutoff, rel_tol)
    n = len(tau)
    self_sq = np.abs(fc.self_corr[:n]) ** 2
    cross_sq = np.abs(fc.cross_corr[:n]) ** 2 + np.abs(fc.cross_corr[n:]) ** 2
    sn = shot_noise(model, cutoff, rel_tol)
    return CorrelationDifference(tau, 2.0 * self_sq - cross_sq, sn)


def photon_number_variance_time_domain(t_grid, model: TwinBeamModel, cutoff: float = CORRELATION_CUTOFF,
                                       rel_tol: float = REL_TOL, step: float = 0.005) -> np.ndarray:
    """Variance ratio from the time-domain double integral,

        ratio = 1 + (1/(SN T)) int_{-T}^{T} (T - |s|) smooth(s) ds,

    with the smooth correlation tabulated on a grid of spacing
    ``step * tau_gvs`` (trapezoid rule; the correlation is even in s).
    """
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if np.any(t_grid <= 0):
        raise ConfigError("detection times must be positive")
    if model.gain == 0:
        return np.ones_like(t_grid)
    h = step / model.bandwidth
    pieces = [np.linspace(0.0, t, int(np.ceil(t / h)) + 1) for t in t_grid]
    nodes = np.unique(np.concatenate(pieces))
    corr = intensity_correlation_difference(nodes, model, cutoff, rel_tol)
    out = np.empty_like(t_grid)
    for j, t in enumerate(t_grid):
        m = nodes <= t
        s = nodes[m]
        integral = 2.0 * trapezoid((t - s) * corr.smooth[m], s)
        out[j] = 1.0 + integral / (corr.delta_weight * t)
    return out


@dataclass(frozen=True)
class NoiseReport:
    """Intensity-difference noise summary for one gain."""

    vminus: SpectrumSeries
    shot_noise: float
    variance_curve: list  # (T_d in s, ratio)
    regime_tags: dict


def noise_report(model: TwinBeamModel, grid=None, t_grid=None, cutoff: float = DEFAULT_CUTOFF,
                 rel_tol: float = REL_TOL) -> NoiseReport:
    """V/SN spectrum (default +-6 bandwidths, 241 points) and variance curve
    (default 0.05 to 50 tau_gvs, 40 points)."""
    b = model.bandwidth
    grid = np.linspace(-6.0, 6.0, 241) * b if grid is None else np.asarray(grid, dtype=float)
    t_grid = default_detection_times(1.0 / b) if t_grid is None else np.asarray(t_grid, dtype=float)
    spec = vminus_spectrum(grid, model, cutoff, rel_tol)
    ratios = variance_curve(t_grid, model, cutoff, rel_tol)
    counter = model.geometry == "counter"
    tags = {
        "spontaneous_ok": bool(counter and model.gain <= 0.3),
        "near_threshold_ok": bool(counter and model.epsilon <= 0.2),
    }
    return NoiseReport(spec, spec.attrs["shot_noise"], list(zip(t_grid.tolist(), ratios.tolist())), tags)

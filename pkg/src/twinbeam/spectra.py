"""Intensity and quadrature-squeezing spectra of the twin beams.

Squeezing spectra are normalised to shot noise (= 1). For a phase sum
phi = phi_s + phi_i of the two local oscillators and an optional detection
delay d of one beam,

    F(W) = |u_s(W) - conj(v_i(-W)) exp(i (phi + W d))|^2,
    Sigma(W) = [F(W) + F(-W)] / 2.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import ConfigError, NoCrossing
from .gain import TwinBeamModel
from .numerics import find_root

__all__ = [
    "SpectrumSeries",
    "PhaseChoice",
    "BandwidthResult",
    "default_grid",
    "intensity_spectrum",
    "squeezing_spectrum",
    "fixed_angle_identity",
    "squeezing_bandwidth",
    "reference_phase_sum",
]

DEFAULT_SPAN = {"counter": 6.0, "co": 3.0}
# odd counts put W = 0 on the grid
DEFAULT_POINTS = {"counter": 2049, "co": 4097}


@dataclass(frozen=True)
class SpectrumSeries:
    """Frequency grid with named real series on it.

    Attributes
    ----------
    omega : ndarray
        Offsets in rad/s, strictly increasing.
    omega_normalized : ndarray
        ``omega`` divided by the natural bandwidth of the geometry.
    series : dict
        Name to array of the same length as ``omega``.
    flags : dict
        Name to boolean mask marking special points (same length).
    attrs : dict
        Scalar metadata (for example the shot-noise level).
    """

    omega: np.ndarray
    omega_normalized: np.ndarray
    series: dict
    flags: dict = field(default_factory=dict)
    attrs: dict = field(default_factory=dict)

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=float)
        if omega.ndim != 1 or omega.size == 0:
            raise ConfigError("frequency grid must be a non-empty 1-D array")
        if omega.size > 1 and not np.all(np.diff(omega) > 0):
            raise ConfigError("frequency grid must be strictly increasing")
        for name, values in list(self.series.items()) + list(self.flags.items()):
            if np.shape(values) != omega.shape:
                raise ConfigError(f"series {name!r} has shape {np.shape(values)}, grid has {omega.shape}")
        for name, values in self.series.items():
            if name.startswith("sigma") and np.any(np.asarray(values) < 0):
                raise ConfigError(f"squeezing series {name!r} has negative values")

    def __getitem__(self, name):
        return self.series[name]

    def __len__(self):
        return len(self.omega)


@dataclass(frozen=True)
class PhaseChoice:
    """Local-oscillator phase setting.

    ``mode`` is ``"optimal"`` (phase sum re-optimised at every offset) or
    ``"fixed"``. In fixed mode ``phi_sum`` defaults to the optimum at W = 0,
    computed from the coefficients. ``delay`` (s) retards one beam before
    detection.
    """

    mode: str = "optimal"
    phi_sum: Optional[float] = None
    delay: float = 0.0

    def __post_init__(self):
        if self.mode not in ("optimal", "fixed"):
            raise ConfigError(f"phase mode must be 'optimal' or 'fixed', got {self.mode!r}")


def default_grid(model: TwinBeamModel, n_points: int | None = None, span: float | None = None) -> np.ndarray:
    """Symmetric uniform grid: +-6 Omega_gvs (counter) or +-3 Omega_gvd (co)."""
    geo = model.geometry
    span = DEFAULT_SPAN[geo] if span is None else span
    n_points = DEFAULT_POINTS[geo] if n_points is None else n_points
    return np.linspace(-span, span, n_points) * model.bandwidth


def _normalized(model, omega):
    return np.asarray(omega, dtype=float) / model.bandwidth


def intensity_spectrum(grid, model: TwinBeamModel) -> SpectrumSeries:
    """Photon-flux spectral density |v_s(W)|^2, raw and peak-normalised."""
    omega = np.asarray(grid, dtype=float)
    vs2 = np.abs(model(omega).v_s) ** 2
    peak = vs2.max()
    norm = vs2 / peak if peak > 0 else np.zeros_like(vs2)
    return SpectrumSeries(omega, _normalized(model, omega),
                          {"intensity": vs2, "intensity_normalized": norm})


def reference_phase_sum(model: TwinBeamModel) -> float:
    """Optimal phase sum at W = 0, arg(u_s(0) v_i(0))."""
    c0 = model(np.array([0.0]))
    return float(np.angle(c0.u_s * c0.v_i)[0])


def _f(u, v, phase):
    return np.abs(u - np.conj(v) * np.exp(1j * phase)) ** 2


def squeezing_spectrum(grid, model: TwinBeamModel, phase: PhaseChoice = PhaseChoice()) -> SpectrumSeries:
    """Symmetrised quadrature noise spectrum Sigma(W) of the twin beams.

    Series: ``sigma`` (at the chosen phase), ``sigma_anti`` (phase sum
    shifted by pi, the conjugate quadrature), ``r`` and ``phi_sum``.

    In optimal mode the phase sum minimises the symmetrised Sigma,
    phi = arg(P_+ + P_-) with P_+ = u_s(W) v_i(-W) e^{-iWd} and
    P_- = u_s(-W) v_i(W) e^{iWd}. Points where P_+ + P_- vanishes (zeros
    of the coupling, where every angle gives shot noise) are flagged in
    ``flags["angle_undefined"]``.
    """
    omega = np.asarray(grid, dtype=float)
    cp = model(omega)
    cm = model(-omega)
    d = phase.delay
    p_plus = cp.u_s * cp.v_i * np.exp(-1j * omega * d)
    p_minus = cm.u_s * cm.v_i * np.exp(1j * omega * d)
    total = p_plus + p_minus
    scale = np.abs(cp.u_s) ** 2 + np.abs(cm.u_s) ** 2
    undefined = np.abs(total) <= 1e-12 * scale
    if phase.mode == "optimal":
        phi = np.angle(total)
    else:
        phi0 = reference_phase_sum(model) if phase.phi_sum is None else float(phase.phi_sum)
        phi = np.full_like(omega, phi0)
        undefined = np.zeros_like(undefined)

    def sigma_at(ph):
        return 0.5 * (_f(cp.u_s, cp.v_i, ph + omega * d) + _f(cm.u_s, cm.v_i, ph - omega * d))

    series = {
        "sigma": sigma_at(phi),
        "sigma_anti": sigma_at(phi + np.pi),
        "r": np.arcsinh(np.abs(cp.v_s)),
        "phi_sum": phi,
    }
    return SpectrumSeries(omega, _normalized(model, omega), series, {"angle_undefined": undefined})


def fixed_angle_identity(r, theta, theta0) -> dict:
    """Sigma = e^{-2r} + 2 sinh(2r) sin^2(theta - theta0), split into its
    squeezed and excess parts."""
    r = np.asarray(r, dtype=float)
    squeezed = np.exp(-2.0 * r)
    excess = 2.0 * np.sinh(2.0 * r) * np.sin(np.asarray(theta) - np.asarray(theta0)) ** 2
    return {"sigma": squeezed + excess, "squeezed_part": squeezed, "excess_part": excess}


class BandwidthResult(NamedTuple):
    omega: float  # rad/s
    omega_normalized: float
    closed_form: Optional[float]  # rad/s, counter-propagation with linear mismatch only
    grid_step: float  # rad/s


def squeezing_bandwidth(model: TwinBeamModel, phase: PhaseChoice | None = None, *,
                        span: float | None = None, n_points: int | None = None) -> BandwidthResult:
    """First positive offset where the fixed-angle Sigma rises through 1.

    The spectrum is sampled on ``[0, span]`` (in units of the natural
    bandwidth; default spans as in :func:`default_grid`) and the crossing is
    refined by bisection between the bracketing grid points.

    Raises
    ------
    NoCrossing
        If Sigma is not below 1 at W = 0 or never returns to 1 on the grid.
    """
    phase = PhaseChoice("fixed") if phase is None else phase
    if phase.mode != "fixed":
        raise ConfigError("squeezing bandwidth is defined for a fixed phase")
    if phase.phi_sum is None:
        phase = PhaseChoice("fixed", reference_phase_sum(model), phase.delay)
    geo = model.geometry
    span = DEFAULT_SPAN[geo] if span is None else span
    n_points = (DEFAULT_POINTS[geo] + 1) // 2 if n_points is None else n_points
    omega = np.linspace(0.0, span, n_points) * model.bandwidth
    excess = squeezing_spectrum(omega, model, phase)["sigma"] - 1.0
    if not excess[0] < 0:
        raise NoCrossing("no squeezing at W = 0; the spectrum never drops below shot noise")
    above = np.nonzero(excess >= 0)[0]
    if above.size == 0:
        raise NoCrossing(f"Sigma stays below shot noise up to {span} times the bandwidth")
    k = int(above[0])

    def f(w):
        return float(squeezing_spectrum(np.array([w]), model, phase)["sigma"][0] - 1.0)

    root = find_root(f, (omega[k - 1], omega[k]))
    closed = None
    if geo == "counter" and model.mismatch.mode == "linearized":
        closed = model.bandwidth * float(np.sqrt(np.pi**2 - model.gain**2))
    return BandwidthResult(root, root / model.bandwidth, closed, float(omega[1] - omega[0]))

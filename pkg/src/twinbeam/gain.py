"""Bogoliubov input-output coefficients of the poled slab.

All functions are vectorised over the frequency offset ``omega``. A
:class:`BogoliubovCoeffs` evaluated at ``omega`` holds ``u_s(omega)``,
``v_s(omega)`` and the conjugate-frequency idler coefficients
``u_i(-omega)``, ``v_i(-omega)``, so that the two unitarity conditions read

    |u_s|^2 - |v_s|^2 = 1,   |u_i|^2 - |v_i|^2 = 1,   u_s v_i = u_i v_s

element-wise.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Union

import numpy as np

from .dispersion import (
    G_THRESHOLD,
    InteractionConfig,
    MismatchFunctions,
    Media,
    Timescales,
    linearized_mismatch,
    mismatch_functions,
)
from .errors import AboveThreshold, ConfigError, InvalidCoeffs, NearThresholdWarning
from .numerics import sinc

__all__ = [
    "BogoliubovCoeffs",
    "SqueezeParams",
    "mopo_coefficients",
    "copro_coefficients",
    "squeeze_params",
    "TwinBeamModel",
    "NEAR_THRESHOLD_MARGIN",
    "UNITARITY_LIMIT",
]

NEAR_THRESHOLD_MARGIN = 1e-3
UNITARITY_LIMIT = 1e-8


@dataclass(frozen=True)
class BogoliubovCoeffs:
    """Coefficients u_s(W), v_s(W), u_i(-W), v_i(-W) on a grid of offsets W."""

    omega: np.ndarray
    u_s: np.ndarray
    v_s: np.ndarray
    u_i: np.ndarray
    v_i: np.ndarray

    def unitarity_residual(self, elementwise: bool = False):
        """Largest violation of the unitarity conditions.

        Each residual is scaled by ``max(1, |u_s|^2)`` so that the check keeps
        its meaning near threshold where ``|u_s|^2`` reaches ``1/sin^2(eps)``.
        """
        scale = np.maximum(1.0, np.abs(self.u_s) ** 2)
        r1 = np.abs(np.abs(self.u_s) ** 2 - np.abs(self.v_s) ** 2 - 1.0)
        r2 = np.abs(np.abs(self.u_i) ** 2 - np.abs(self.v_i) ** 2 - 1.0)
        r3 = np.abs(self.u_s * self.v_i - self.u_i * self.v_s)
        res = np.maximum(np.maximum(r1, r2), r3) / scale
        if elementwise:
            return res
        return float(np.max(res)) if np.size(res) else 0.0


@dataclass(frozen=True)
class SqueezeParams:
    """Squeeze parameter r >= 0 and angle theta in [0, pi).

    ``degenerate`` marks points where v_s = 0 and theta is undefined
    (returned as 0).
    """

    r: np.ndarray
    theta: np.ndarray
    degenerate: np.ndarray


def _gain_and_phase(config, pump_phase):
    if isinstance(config, InteractionConfig):
        return float(config.gain), float(config.pump_phase)
    return float(config), float(pump_phase)


def _check_counter_gain(g: float) -> None:
    if g < 0:
        raise ConfigError("gain must be non-negative")
    if g >= G_THRESHOLD:
        raise AboveThreshold(f"g = {g} is not below the oscillation threshold pi/2")
    if G_THRESHOLD - g < NEAR_THRESHOLD_MARGIN:
        warnings.warn(
            f"g = {g} lies within {NEAR_THRESHOLD_MARGIN} of threshold; "
            "spectral features narrow as sin(pi/2 - g) and quadrature loses accuracy",
            NearThresholdWarning,
            stacklevel=3,
        )


def mopo_coefficients(omega, config: Union[InteractionConfig, float], mismatch: MismatchFunctions,
                      pump_phase: float = 0.0) -> BogoliubovCoeffs:
    """Counter-propagating (mirrorless OPO) coefficients.

    Parameters
    ----------
    omega : array_like
        Frequency offsets (rad/s).
    config : InteractionConfig or float
        Interaction supplying gain and pump phase, or the gain itself.
    mismatch : MismatchFunctions
        Counter-geometry mismatch functions.
    pump_phase : float
        Pump phase when ``config`` is a bare gain.

    Notes
    -----
    With d = D l/2 and gamma = sqrt(g^2 + d^2),
    phi = 1/(cos gamma - i d sinc gamma) and

        u_s = e^{i k_s l} e^{i beta} phi,   v_s = e^{i(k_s - k_i) l} g e^{i phi_p} sinc(gamma) phi,
        u_i = e^{i k_i l} e^{i beta} phi*,  v_i = g e^{i phi_p} sinc(gamma) phi*.
    """
    g, phi_p = _gain_and_phase(config, pump_phase)
    _check_counter_gain(g)
    omega = np.asarray(omega, dtype=float)
    d = np.asarray(mismatch.half_mismatch(omega), dtype=float)
    beta = np.asarray(mismatch.beta(omega), dtype=float)
    gamma = np.sqrt(g * g + d * d)
    sg = sinc(gamma)
    phi = 1.0 / (np.cos(gamma) - 1j * d * sg)
    phic = np.conj(phi)
    prop = np.exp(1j * beta)
    pump = g * np.exp(1j * phi_p) * sg
    return BogoliubovCoeffs(
        omega=omega,
        u_s=np.exp(1j * mismatch.ks_lc) * prop * phi,
        v_s=np.exp(1j * (mismatch.ks_lc - mismatch.ki_lc)) * pump * phi,
        u_i=np.exp(1j * mismatch.ki_lc) * prop * phic,
        v_i=pump * phic,
    )


def _cosh_sinhc(gamma_sq):
    """cosh(G) and sinh(G)/G for G = sqrt(gamma_sq), continued analytically
    to cos(x), sin(x)/x with x = sqrt(-gamma_sq) on the trigonometric side."""
    shape = np.shape(gamma_sq)
    gamma_sq = np.atleast_1d(np.asarray(gamma_sq, dtype=float))
    hyp = gamma_sq >= 0
    big = np.sqrt(np.abs(gamma_sq))
    c = np.cos(big)
    s = np.atleast_1d(sinc(big))
    if np.any(hyp):
        bh = big[hyp]
        c[hyp] = np.cosh(bh)
        small = bh < 1e-8
        s[hyp] = np.where(small, 1.0 + gamma_sq[hyp] / 6.0, np.sinh(bh) / np.where(small, 1.0, bh))
    return c.reshape(shape), s.reshape(shape)


def copro_coefficients(omega, config: Union[InteractionConfig, float], mismatch: MismatchFunctions,
                       pump_phase: float = 0.0) -> BogoliubovCoeffs:
    """Co-propagating single-pass amplifier coefficients.

    With d = Delta l/2, Gamma^2 = g^2 - d^2, C = cosh Gamma and
    S = sinh(Gamma)/Gamma (cos and sinc of sqrt(-Gamma^2) when Gamma^2 < 0):

        u_s = e^{i p_s} (C + i d S),  v_s = e^{i p_s} g e^{i phi_p} S,
        u_i = e^{i p_i} (C + i d S),  v_i = e^{i p_i} g e^{i phi_p} S,

    where p_s = (k_s - k_i) l/2 + skew + (k_p - k_G) l/2 and
    p_i = (k_i - k_s) l/2 - skew + (k_p - k_G) l/2. The phases are split
    symmetrically so p_s + p_i = (k_p - k_G) l and the phase sum
    arg(u_s v_i) at W = 0 equals (k_p - k_G) l + phi_p.
    """
    g, phi_p = _gain_and_phase(config, pump_phase)
    if g < 0:
        raise ConfigError("gain must be non-negative")
    omega = np.asarray(omega, dtype=float)
    d = np.asarray(mismatch.half_mismatch(omega), dtype=float)
    skew = np.asarray(mismatch.skew(omega), dtype=float)
    c, s = _cosh_sinhc(g * g - d * d)
    common = 0.5 * mismatch.kpg_lc
    half_diff = 0.5 * (mismatch.ks_lc - mismatch.ki_lc)
    ph_s = np.exp(1j * (common + half_diff + skew))
    ph_i = np.exp(1j * (common - half_diff - skew))
    u = c + 1j * d * s
    v = g * np.exp(1j * phi_p) * s
    return BogoliubovCoeffs(omega=omega, u_s=ph_s * u, v_s=ph_s * v, u_i=ph_i * u, v_i=ph_i * v)


def squeeze_params(c: BogoliubovCoeffs, limit: float = UNITARITY_LIMIT) -> SqueezeParams:
    """Squeeze parameter and angle: r = arcsinh|v_s|, theta = arg(u_s v_i)/2 mod pi."""
    res = c.unitarity_residual()
    if not res <= limit:
        raise InvalidCoeffs(f"unitarity residual {res:.3e} exceeds {limit:.1e}")
    mag = np.abs(c.v_s)
    degenerate = mag == 0
    theta = np.mod(0.5 * np.angle(c.u_s * c.v_i), np.pi)
    theta = np.where(degenerate, 0.0, theta)
    # mod can return pi itself for tiny negative inputs
    theta = np.where(theta >= np.pi, 0.0, theta)
    return SqueezeParams(r=np.arcsinh(mag)[()], theta=theta[()], degenerate=degenerate[()])


@dataclass(frozen=True)
class TwinBeamModel:
    """Coefficient provider: gain, mismatch functions and pump phase.

    Calling the model on an array of offsets returns the
    :class:`BogoliubovCoeffs` for its geometry.
    """

    gain: float
    mismatch: MismatchFunctions
    pump_phase: float = 0.0

    def __post_init__(self):
        if self.geometry == "counter":
            if self.gain < 0 or self.gain >= G_THRESHOLD:
                raise AboveThreshold(f"g = {self.gain} outside [0, pi/2) for counter-propagation")
        elif self.gain < 0:
            raise ConfigError("gain must be non-negative")

    @property
    def geometry(self) -> str:
        return self.mismatch.geometry

    @property
    def timescales(self) -> Timescales:
        return self.mismatch.timescales

    @property
    def bandwidth(self) -> float:
        """Omega_gvs for counter-propagation, Omega_gvd for co-propagation."""
        return self.mismatch.bandwidth

    @property
    def epsilon(self) -> float:
        """Distance pi/2 - g from threshold."""
        return G_THRESHOLD - self.gain

    @property
    def feature_width(self) -> float:
        """Smallest spectral feature scale (rad/s).

        Counter-propagation narrows to the Lorentzian half width
        g sin(eps) Omega_gvs near threshold; the floor keeps the scale
        finite at small gain where the sinc envelope width Omega_gvs rules.
        """
        if self.geometry == "counter":
            return self.bandwidth * max(self.gain * np.sin(self.epsilon), 0.05)
        return self.bandwidth

    def breakpoints(self) -> list[float]:
        """Lorentzian pole positions +-g sin(eps) Omega_gvs (counter only)."""
        if self.geometry != "counter" or self.gain == 0:
            return []
        w = self.gain * np.sin(self.epsilon) * self.bandwidth
        return [-w, w]

    def __call__(self, omega) -> BogoliubovCoeffs:
        fn = mopo_coefficients if self.geometry == "counter" else copro_coefficients
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NearThresholdWarning)
            return fn(omega, self.gain, self.mismatch, self.pump_phase)

    def with_gain(self, gain: float) -> "TwinBeamModel":
        return replace(self, gain=float(gain))

    def warn_if_near_threshold(self) -> bool:
        near = self.geometry == "counter" and self.epsilon < NEAR_THRESHOLD_MARGIN
        if near:
            warnings.warn(
                f"g = {self.gain} lies within {NEAR_THRESHOLD_MARGIN} of threshold",
                NearThresholdWarning,
                stacklevel=2,
            )
        return near

    @classmethod
    def from_config(cls, config: InteractionConfig, material: Media, mode: str = "linearized",
                    *, include_beta: bool = True) -> "TwinBeamModel":
        mm = mismatch_functions(config, material, mode, include_beta=include_beta)
        model = cls(gain=config.gain, mismatch=mm, pump_phase=config.pump_phase)
        model.warn_if_near_threshold()
        return model

    @classmethod
    def linearized(cls, gain: float, ts: Timescales, geometry: str = "counter", *,
                   pump_phase: float = 0.0, include_beta: bool = True) -> "TwinBeamModel":
        """Model on the Taylor-truncated mismatch with zero carrier phases."""
        return cls(gain=float(gain), mismatch=linearized_mismatch(ts, geometry, include_beta=include_beta),
                   pump_phase=pump_phase)

    @classmethod
    def normalized(cls, gain: float, geometry: str = "counter", *, tau_gvm: float = 0.0,
                   tau_gvd: float | None = None, include_beta: bool = True) -> "TwinBeamModel":
        """Dimensionless model measuring offsets in units of the natural
        bandwidth of the geometry.

        The counter-propagating model has unit tau_gvs and, by default,
        tau_gvd = 0 (in a centimetre slab tau_gvd/tau_gvs is of order 1e-4);
        the co-propagating model has unit tau_gvd.
        """
        if tau_gvd is None:
            tau_gvd = 0.0 if geometry == "counter" else 1.0
        ts = Timescales(tau_gvs=1.0, tau_gvm=tau_gvm, tau_gvd=tau_gvd)
        return cls.linearized(gain, ts, geometry, include_beta=include_beta)

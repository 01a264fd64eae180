"""Two-mode squeezed-state algebra at a single frequency pair.

A pair of conjugate frequency modes leaving the slab from vacuum is in the
two-mode squeezed state sum_N c_N |N>_s |N>_i with squeeze parameter r and
angle theta taken from the Bogoliubov coefficients.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .gain import BogoliubovCoeffs, squeeze_params

__all__ = [
    "TwoModeSqueezeState",
    "PairStatistics",
    "CpmResiduals",
    "default_fock_cutoff",
    "fock_coefficients",
    "truncation_bound",
    "pair_statistics",
    "mode_transforms",
    "cpm_decomposition_check",
    "quadrature_variance",
]


def default_fock_cutoff(r: float) -> int:
    """ceil(10 (1 + sinh^2 r)): ten times the mean occupation plus one."""
    return int(math.ceil(10.0 * (1.0 + math.sinh(r) ** 2)))


@dataclass(frozen=True)
class TwoModeSqueezeState:
    """Two-mode squeezed vacuum with xi = r exp(2 i theta), truncated at n_max pairs."""

    r: float
    theta: float = 0.0
    n_max: int | None = None

    def __post_init__(self):
        if not self.r >= 0:
            raise ValueError("squeeze parameter r must be non-negative")
        if self.n_max is None:
            object.__setattr__(self, "n_max", default_fock_cutoff(self.r))
        if int(self.n_max) != self.n_max or self.n_max < 0:
            raise ValueError("n_max must be a non-negative integer")
        object.__setattr__(self, "n_max", int(self.n_max))

    @classmethod
    def from_coeffs(cls, c: BogoliubovCoeffs, n_max: int | None = None) -> "TwoModeSqueezeState":
        sp = squeeze_params(c)
        return cls(float(sp.r), float(sp.theta), n_max)


def fock_coefficients(state: TwoModeSqueezeState) -> np.ndarray:
    """c_N = tanh^N(r) exp(2 i N theta) / cosh(r) for N = 0..n_max."""
    n = np.arange(state.n_max + 1)
    t = math.tanh(state.r)
    return (t**n) * np.exp(2j * n * state.theta) / math.cosh(state.r)


def truncation_bound(state: TwoModeSqueezeState) -> float:
    """Exact norm missing from the truncated expansion, tanh^{2(n_max+1)} r."""
    return math.tanh(state.r) ** (2 * (state.n_max + 1))


class PairStatistics(NamedTuple):
    mean_n: float
    variance_n: float
    g2: float
    difference_variance: float


def pair_statistics(state: TwoModeSqueezeState) -> PairStatistics:
    """Photon statistics of either beam and of the number difference.

    Each marginal is thermal: <n> = sinh^2 r, Var(n) = <n>(1 + <n>),
    g2 = 2. The state is an eigenstate of N_s - N_i with eigenvalue 0, so
    the difference variance is exactly zero. ``g2`` is reported as nan for
    the vacuum (r = 0) where it is 0/0.
    """
    mean = math.sinh(state.r) ** 2
    var = mean * (1.0 + mean)
    g2 = 2.0 if mean > 0 else float("nan")
    return PairStatistics(mean, var, g2, 0.0)


def mode_transforms(r: float, theta: float) -> dict:
    """Single-mode squeeze transforms c = mu B + nu B^dagger of the sum and
    difference modes.

    The sum mode has (cosh r, e^{2i theta} sinh r); the difference mode has
    (cosh r, -e^{2i theta} sinh r), which is the sum-mode transform at
    theta + pi/2.
    """
    nu = np.exp(2j * theta) * np.sinh(r)
    return {"plus": (np.cosh(r), nu), "minus": (np.cosh(r), -nu)}


class CpmResiduals(NamedTuple):
    plus: float
    minus: float

    @property
    def max(self) -> float:
        return max(self.plus, self.minus)


def cpm_decomposition_check(c: BogoliubovCoeffs) -> CpmResiduals:
    """Largest deviation between the sum/difference output modes and their
    single-mode squeeze reconstructions.

    In the basis (a_s, a_i, a_s^dagger, a_i^dagger) the outputs
    c_pm = (b_s +- b_i)/sqrt(2) have rows [u_s, +-u_i, +-v_i, v_s]/sqrt(2).
    The reconstruction is mu B_pm + nu B_pm^dagger with
    B_pm = (e^{i arg u_s} a_s +- e^{i arg u_i} a_i)/sqrt(2) and (mu, nu) from
    :func:`mode_transforms` at the extracted (r, theta).

    Raises
    ------
    InvalidCoeffs
        If the coefficients violate unitarity.
    """
    sp = squeeze_params(c)
    r = np.asarray(sp.r, dtype=float)
    two_theta = np.angle(c.u_s * c.v_i)  # exact phase sum, not reduced mod pi
    ph_s = np.exp(1j * np.angle(c.u_s))
    ph_i = np.exp(1j * np.angle(c.u_i))
    ch, sh = np.cosh(r), np.sinh(r)
    nu = np.exp(1j * two_theta) * sh
    root2 = math.sqrt(2.0)
    out = []
    for sign in (+1.0, -1.0):
        raw = np.stack([c.u_s, sign * c.u_i, sign * c.v_i, c.v_s]) / root2
        mu_k, nu_k = ch, sign * nu
        # mu_k B_pm + nu_k B_pm^dagger expanded in the input basis
        rebuilt = np.stack([
            mu_k * ph_s,
            sign * mu_k * ph_i,
            nu_k * np.conj(ph_s),
            sign * nu_k * np.conj(ph_i),
        ]) / root2
        out.append(float(np.max(np.abs(raw - rebuilt))))
    return CpmResiduals(*out)


def quadrature_variance(mu, nu, phi):
    """Variance of X_phi = e^{-i phi} c + e^{i phi} c^dagger for
    c = mu B + nu B^dagger with B in vacuum (shot noise = 1):
    |mu + conj(nu) e^{2 i phi}|^2."""
    return np.abs(mu + np.conj(nu) * np.exp(2j * np.asarray(phi))) ** 2

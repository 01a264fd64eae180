"""Material dispersion, quasi-phase matching and the slab timescales.

Wavelengths and lengths are in metres, angular frequencies in rad/s,
wavenumbers in rad/m. Frequency offsets ``omega`` are measured from the
signal carrier; the frequency-conjugate idler sits at ``omega_i - omega``.
"""
from __future__ import annotations

import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, NamedTuple, Sequence, Union

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

from .errors import ConfigError, NoSolution, OutOfRange, AboveThreshold
from .numerics import derivative

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

__all__ = [
    "SPEED_OF_LIGHT",
    "G_THRESHOLD",
    "MATERIAL_PATH_ENV",
    "MaterialDispersion",
    "load_material",
    "available_materials",
    "InteractionConfig",
    "Timescales",
    "GroupDerivatives",
    "MismatchFunctions",
    "wavenumber",
    "group_derivatives",
    "qpm_poling_period",
    "timescales",
    "mismatch_functions",
    "linearized_mismatch",
]

G_THRESHOLD = np.pi / 2
MATERIAL_PATH_ENV = "TWINBEAM_MATERIAL_PATH"
DEFAULT_MATERIAL = "ln_congruent_e"
_DATA_DIR = Path(__file__).parent / "data"

# relative finite-difference steps in omega for k' and k''
K1_REL_STEP = 1e-6
K2_REL_STEP = 1e-4


def _sellmeier_ad(lam_um, coeffs):
    a, b, c, d = coeffs
    return np.sqrt(a + b / (lam_um**2 - c) - d * lam_um**2)


def _sellmeier_bc(lam_um, coeffs):
    l2 = lam_um**2
    n2 = 1.0
    for b, c in zip(coeffs[0::2], coeffs[1::2]):
        n2 = n2 + b * l2 / (l2 - c)
    return np.sqrt(n2)


def _constant(lam_um, coeffs):
    return np.full(np.shape(lam_um), float(coeffs[0]))[()]


def _omega_polynomial(lam_um, coeffs):
    w = 2 * np.pi * SPEED_OF_LIGHT / (lam_um * 1e-6) * 1e-15  # rad/fs
    return np.polynomial.polynomial.polyval(w, coeffs)


# form_id -> (index function of wavelength in um, allowed coefficient counts)
FORMS: dict[str, tuple[Callable, Callable[[int], bool]]] = {
    "sellmeier_ad": (_sellmeier_ad, lambda n: n == 4),
    "sellmeier_bc": (_sellmeier_bc, lambda n: n >= 2 and n % 2 == 0),
    "constant": (_constant, lambda n: n == 1),
    "omega_polynomial": (_omega_polynomial, lambda n: n >= 1),
}


@dataclass(frozen=True)
class MaterialDispersion:
    """Refractive index of one polarization as a closed-form dispersion law.

    ``form_id`` selects the functional form (see ``FORMS``):

    * ``sellmeier_ad``: n^2 = A + B/(lam^2 - C) - D lam^2, lam in um
    * ``sellmeier_bc``: n^2 = 1 + sum B_i lam^2/(lam^2 - C_i), lam in um,
      coefficients ordered [B1, C1, B2, C2, ...]
    * ``constant``: n = c0
    * ``omega_polynomial``: n = sum c_j w^j with w in rad/fs
    """

    name: str
    form_id: str
    coefficients: tuple
    valid_range: tuple  # (min, max) wavelength in m

    def __post_init__(self):
        if self.form_id not in FORMS:
            raise ConfigError(f"unknown dispersion form {self.form_id!r}; known: {sorted(FORMS)}")
        object.__setattr__(self, "coefficients", tuple(float(v) for v in self.coefficients))
        if not FORMS[self.form_id][1](len(self.coefficients)):
            raise ConfigError(
                f"form {self.form_id!r} does not accept {len(self.coefficients)} coefficients"
            )
        lo, hi = (float(v) for v in self.valid_range)
        if not 0 < lo < hi:
            raise ConfigError(f"invalid valid_range {self.valid_range}")
        object.__setattr__(self, "valid_range", (lo, hi))

    def check_range(self, wavelength):
        lam = np.asarray(wavelength, dtype=float)
        lo, hi = self.valid_range
        if np.any(lam < lo) or np.any(lam > hi) or not np.all(np.isfinite(lam)):
            bad = lam[(lam < lo) | (lam > hi) | ~np.isfinite(lam)] if lam.ndim else lam
            raise OutOfRange(
                f"{self.name}: wavelength {np.ravel(bad)[0] * 1e9:.4f} nm outside "
                f"[{lo * 1e9:.1f}, {hi * 1e9:.1f}] nm"
            )

    def index(self, wavelength):
        """Refractive index at vacuum wavelength(s) in metres."""
        self.check_range(wavelength)
        return FORMS[self.form_id][0](np.asarray(wavelength, dtype=float) * 1e6, self.coefficients)

    def index_at(self, omega):
        """Refractive index at angular frequency (rad/s)."""
        return self.index(2 * np.pi * SPEED_OF_LIGHT / np.asarray(omega, dtype=float))

    @classmethod
    def from_mapping(cls, data: dict) -> "MaterialDispersion":
        try:
            lo, hi = data["valid_range_nm"]
            return cls(
                name=str(data["name"]),
                form_id=str(data["form_id"]),
                coefficients=tuple(data["coefficients"]),
                valid_range=(float(lo) * 1e-9, float(hi) * 1e-9),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"malformed material description: {exc}") from exc

    def to_mapping(self) -> dict:
        return {
            "format_version": 1,
            "name": self.name,
            "form_id": self.form_id,
            "coefficients": list(self.coefficients),
            "valid_range_nm": [self.valid_range[0] * 1e9, self.valid_range[1] * 1e9],
        }


def _search_dirs() -> list[Path]:
    dirs = [Path(p) for p in os.environ.get(MATERIAL_PATH_ENV, "").split(os.pathsep) if p]
    return dirs + [_DATA_DIR]


def available_materials() -> list[str]:
    names = set()
    for d in _search_dirs():
        if d.is_dir():
            names.update(p.stem for p in d.glob("*.toml"))
    return sorted(names)


def load_material(ref: Union[str, os.PathLike] = DEFAULT_MATERIAL) -> MaterialDispersion:
    """Load a material file by path or by name.

    Names are resolved against the directories in ``$TWINBEAM_MATERIAL_PATH``
    (``os.pathsep`` separated) and then the bundled data directory.
    """
    path = Path(ref)
    if not path.is_file():
        for d in _search_dirs():
            cand = d / f"{ref}.toml"
            if cand.is_file():
                path = cand
                break
        else:
            raise ConfigError(f"material {str(ref)!r} not found (searched {[str(d) for d in _search_dirs()]})")
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot read material file {path}: {exc}") from exc
    if data.get("format_version", 1) != 1:
        raise ConfigError(f"{path}: unsupported format_version {data['format_version']}")
    return MaterialDispersion.from_mapping(data)


Media = Union[MaterialDispersion, Sequence[MaterialDispersion]]


def _media(material: Media) -> tuple[MaterialDispersion, MaterialDispersion, MaterialDispersion]:
    """(pump, signal, idler) materials; a single material serves all three."""
    if isinstance(material, MaterialDispersion):
        return material, material, material
    pump, signal, idler = material
    return pump, signal, idler


@dataclass(frozen=True)
class InteractionConfig:
    """Three-wave interaction in a poled slab.

    Give ``lambda_p`` and ``lambda_s``; ``lambda_i`` is derived from energy
    conservation (or checked to 1e-12 relative when supplied). A derived
    idler wavelength within 1e-12 of the signal is snapped to it, so the
    degenerate case is exactly degenerate.
    """

    lambda_p: float
    lambda_s: float
    crystal_length: float
    gain: float = 0.0
    lambda_i: float | None = None
    poling_period: float | None = None
    poling_order: int = 1
    pump_phase: float = 0.0
    geometry: str = "counter"

    def __post_init__(self):
        if self.geometry not in ("counter", "co"):
            raise ConfigError(f"geometry must be 'counter' or 'co', got {self.geometry!r}")
        if not (self.lambda_p > 0 and self.lambda_s > self.lambda_p):
            raise ConfigError("need 0 < lambda_p < lambda_s")
        derived = 1.0 / (1.0 / self.lambda_p - 1.0 / self.lambda_s)
        if abs(derived - self.lambda_s) <= 1e-12 * self.lambda_s:
            derived = self.lambda_s
        if self.lambda_i is None:
            object.__setattr__(self, "lambda_i", derived)
        elif abs(1 / self.lambda_p - 1 / self.lambda_s - 1 / self.lambda_i) > 1e-12 / self.lambda_p:
            raise ConfigError("energy conservation 1/lambda_p = 1/lambda_s + 1/lambda_i violated")
        if self.crystal_length <= 0:
            raise ConfigError("crystal_length must be positive")
        if self.gain < 0:
            raise ConfigError("gain must be non-negative")
        if int(self.poling_order) != self.poling_order or self.poling_order < 1 or self.poling_order % 2 == 0:
            raise ConfigError("poling_order must be an odd positive integer")
        if self.poling_period is not None and self.poling_period <= 0:
            raise ConfigError("poling_period must be positive")
        if self.geometry == "counter" and self.gain >= G_THRESHOLD:
            raise AboveThreshold(f"g = {self.gain} is not below the threshold pi/2")

    @property
    def omega_s(self) -> float:
        return 2 * np.pi * SPEED_OF_LIGHT / self.lambda_s

    @property
    def omega_i(self) -> float:
        return 2 * np.pi * SPEED_OF_LIGHT / self.lambda_i

    @property
    def omega_p(self) -> float:
        return 2 * np.pi * SPEED_OF_LIGHT / self.lambda_p

    def replace(self, **changes) -> "InteractionConfig":
        from dataclasses import replace
        if "lambda_p" in changes or "lambda_s" in changes:
            changes.setdefault("lambda_i", None)
        return replace(self, **changes)


def wavenumber(material: MaterialDispersion, omega):
    """k = n(omega) omega / c in rad/m."""
    omega = np.asarray(omega, dtype=float)
    return material.index_at(omega) * omega / SPEED_OF_LIGHT


class GroupDerivatives(NamedTuple):
    k1: float  # dk/domega, s/m
    k2: float  # d2k/domega2, s^2/m
    k1_rel_error: float
    k2_rel_error: float


def group_derivatives(material: MaterialDispersion, omega: float) -> GroupDerivatives:
    """First and second frequency derivatives of k by Richardson-extrapolated
    central differences."""
    lam = 2 * np.pi * SPEED_OF_LIGHT / omega
    margin = 5 * K2_REL_STEP
    lo, hi = material.valid_range
    if not (lo * (1 + margin) <= lam <= hi * (1 - margin)):
        raise OutOfRange(
            f"{material.name}: {lam * 1e9:.4f} nm too close to the edge of the valid range"
        )
    k = lambda w: float(wavenumber(material, w))
    k1, e1 = derivative(k, omega, 1, K1_REL_STEP)
    k2, e2 = derivative(k, omega, 2, K2_REL_STEP)
    return GroupDerivatives(k1, k2, e1, e2)


def qpm_poling_period(config: InteractionConfig, material: Media) -> float:
    """Poling period that zeroes the phase mismatch at the carrier frequencies.

    counter: k_s - k_i - k_p + k_G = 0; co: k_s + k_i - k_p + k_G = 0,
    with k_G = 2 pi m / Lambda.
    """
    m_p, m_s, m_i = _media(material)
    kp = float(wavenumber(m_p, config.omega_p))
    ks = float(wavenumber(m_s, config.omega_s))
    ki = float(wavenumber(m_i, config.omega_i))
    if config.geometry == "counter":
        k_grating = kp - ks + ki
    else:
        k_grating = kp - ks - ki
    if not k_grating > 0:
        raise NoSolution(
            f"{config.geometry}-propagating phase matching needs k_G = {k_grating:.6e} rad/m > 0"
        )
    return 2 * np.pi * config.poling_order / k_grating


@dataclass(frozen=True)
class Timescales:
    """Characteristic slab times (s) and their inverse bandwidths (rad/s).

    tau_gvs = (l/2)(k1_s + k1_i), tau_gvm = (l/2)(k1_s - k1_i),
    tau_gvd = sqrt(|(l/4)(k2_s + k2_i)|). ``gvd_sign`` is -1 when the
    summed group-velocity dispersion is anomalous.
    """

    tau_gvs: float
    tau_gvm: float
    tau_gvd: float
    gvd_sign: int = 1
    k1_s: float = float("nan")
    k1_i: float = float("nan")
    k2_s: float = float("nan")
    k2_i: float = float("nan")

    @property
    def gvd_coefficient(self) -> float:
        """Signed tau_gvd^2 = (l/4)(k2_s + k2_i)."""
        return self.gvd_sign * self.tau_gvd**2

    @property
    def omega_gvs(self) -> float:
        return 1.0 / self.tau_gvs

    @property
    def omega_gvm(self) -> float:
        return np.inf if self.tau_gvm == 0 else 1.0 / self.tau_gvm

    @property
    def omega_gvd(self) -> float:
        return np.inf if self.tau_gvd == 0 else 1.0 / self.tau_gvd

    def as_dict(self) -> dict:
        return {
            "tau_gvs_s": self.tau_gvs,
            "tau_gvm_s": self.tau_gvm,
            "tau_gvd_s": self.tau_gvd,
            "omega_gvs_rad_s": self.omega_gvs,
            "omega_gvm_rad_s": self.omega_gvm,
            "omega_gvd_rad_s": self.omega_gvd,
            "gvd_sign": self.gvd_sign,
        }


def timescales(config: InteractionConfig, material: Media) -> Timescales:
    _, m_s, m_i = _media(material)
    ds = group_derivatives(m_s, config.omega_s)
    di = group_derivatives(m_i, config.omega_i)
    length = config.crystal_length
    gvd_sq = 0.25 * length * (ds.k2 + di.k2)
    return Timescales(
        tau_gvs=0.5 * length * (ds.k1 + di.k1),
        tau_gvm=0.5 * length * (ds.k1 - di.k1),
        tau_gvd=float(np.sqrt(abs(gvd_sq))),
        gvd_sign=1 if gvd_sq >= 0 else -1,
        k1_s=ds.k1, k1_i=di.k1, k2_s=ds.k2, k2_i=di.k2,
    )


def _zero(omega):
    return np.zeros(np.shape(omega))


@dataclass(frozen=True)
class MismatchFunctions:
    """Phase-mismatch and propagation-phase functions of the offset omega.

    ``mismatch(omega)`` is D (counter) or Delta (co) in rad/m;
    ``beta(omega) = [k_s(W) + k_i(-W) - k_s - k_i] l/2`` and
    ``skew(omega) = [k_s(W) - k_i(-W) - k_s + k_i] l/2`` in rad. The constant
    carrier phases k_s l, k_i l and (k_p - k_G) l are carried alongside.
    """

    geometry: str
    mode: str
    crystal_length: float
    mismatch: Callable
    beta: Callable
    skew: Callable
    timescales: Timescales
    ks_lc: float = 0.0
    ki_lc: float = 0.0
    kpg_lc: float = 0.0

    def half_mismatch(self, omega):
        """Dimensionless D l/2 (counter) or Delta l/2 (co)."""
        return self.mismatch(omega) * (0.5 * self.crystal_length)

    @property
    def residual(self) -> float:
        """Mismatch at omega = 0 in rad/m."""
        return float(self.mismatch(np.array(0.0)))

    @property
    def bandwidth(self) -> float:
        """Natural frequency scale: Omega_gvs (counter) or Omega_gvd (co)."""
        ts = self.timescales
        return ts.omega_gvs if self.geometry == "counter" else ts.omega_gvd


def linearized_mismatch(
    ts: Timescales,
    geometry: str = "counter",
    crystal_length: float = 1.0,
    *,
    residual: float = 0.0,
    include_beta: bool = True,
    ks_lc: float = 0.0,
    ki_lc: float = 0.0,
    kpg_lc: float = 0.0,
) -> MismatchFunctions:
    """Taylor-truncated mismatch functions built from the timescales.

    counter: D l/2 = D0 l/2 + tau_gvs W;  co: Delta l/2 = Delta0 l/2 + tau_gvm W
    + tau_gvd^2 W^2;  beta = tau_gvm W + tau_gvd^2 W^2 (tau_gvd^2 carries the
    sign of the group-velocity dispersion; beta is zero if
    ``include_beta`` is false);  skew = tau_gvs W.
    """
    if geometry not in ("counter", "co"):
        raise ConfigError(f"unknown geometry {geometry!r}")
    half = 0.5 * crystal_length
    tgvs, tgvm, tgvd2 = ts.tau_gvs, ts.tau_gvm, ts.gvd_coefficient

    def quad_phase(w):
        w = np.asarray(w, dtype=float)
        return tgvm * w + tgvd2 * w * w

    if geometry == "counter":
        def mismatch(w):
            return residual + tgvs * np.asarray(w, dtype=float) / half
    else:
        def mismatch(w):
            return residual + quad_phase(w) / half

    def skew(w):
        return tgvs * np.asarray(w, dtype=float)

    return MismatchFunctions(
        geometry=geometry,
        mode="linearized",
        crystal_length=crystal_length,
        mismatch=mismatch,
        beta=quad_phase if include_beta else _zero,
        skew=skew,
        timescales=ts,
        ks_lc=ks_lc,
        ki_lc=ki_lc,
        kpg_lc=kpg_lc,
    )


def mismatch_functions(
    config: InteractionConfig,
    material: Media,
    mode: str = "exact",
    *,
    include_beta: bool = True,
) -> MismatchFunctions:
    """Mismatch functions for ``config``; the poling period is solved for QPM
    when ``config.poling_period`` is None."""
    if mode not in ("exact", "linearized"):
        raise ConfigError(f"mismatch mode must be 'exact' or 'linearized', got {mode!r}")
    m_p, m_s, m_i = _media(material)
    period = config.poling_period or qpm_poling_period(config, material)
    k_grating = 2 * np.pi * config.poling_order / period
    kp = float(wavenumber(m_p, config.omega_p))
    ks = float(wavenumber(m_s, config.omega_s))
    ki = float(wavenumber(m_i, config.omega_i))
    length = config.crystal_length
    ts = timescales(config, material)
    sign = -1.0 if config.geometry == "counter" else 1.0
    residual = ks + sign * ki - kp + k_grating
    phases = dict(ks_lc=ks * length, ki_lc=ki * length, kpg_lc=(kp - k_grating) * length)

    if mode == "linearized":
        return linearized_mismatch(
            ts, config.geometry, length, residual=residual, include_beta=include_beta, **phases
        )

    ws, wi = config.omega_s, config.omega_i

    def k_sig(w):
        return wavenumber(m_s, ws + np.asarray(w, dtype=float))

    def k_idl(w):
        return wavenumber(m_i, wi - np.asarray(w, dtype=float))

    def mismatch(w):
        return (k_sig(w) - ks) + sign * (k_idl(w) - ki) + residual

    def beta(w):
        return ((k_sig(w) - ks) + (k_idl(w) - ki)) * (0.5 * length)

    def skew(w):
        return ((k_sig(w) - ks) - (k_idl(w) - ki)) * (0.5 * length)

    return MismatchFunctions(
        geometry=config.geometry,
        mode="exact",
        crystal_length=length,
        mismatch=mismatch,
        beta=beta if include_beta else _zero,
        skew=skew,
        timescales=ts,
        **phases,
    )

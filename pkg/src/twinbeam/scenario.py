"""Scenario files: flat TOML tables of run parameters with SI unit suffixes."""
from __future__ import annotations

import dataclasses
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional

from .dispersion import G_THRESHOLD, InteractionConfig, MaterialDispersion, load_material
from .errors import ConfigError
from .gain import TwinBeamModel

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

__all__ = ["Scenario", "load_scenario", "parse_assignment"]


@dataclass(frozen=True)
class Scenario:
    """Run parameters. Field names are the keys accepted in scenario files.

    ``explicit`` records which keys were set by the user (file or command
    line) so that commands can tell a default from a deliberate choice.
    """

    material: str = "ln_congruent_e"
    geometry: str = "counter"
    lambda_p_nm: float = 771.0
    lambda_s_nm: float = 1542.0
    crystal_length_m: float = 0.01
    gains: Optional[list] = None
    pump_phase_rad: float = 0.0
    poling_order: int = 1
    poling_period_nm: Optional[float] = None
    mismatch_mode: str = "linearized"
    include_beta: bool = True
    phase_mode: Optional[str] = None
    phi_sum_rad: Optional[float] = None
    delay_s: float = 0.0
    grid_span: Optional[float] = None
    grid_points: Optional[int] = None
    cutoff: float = 300.0
    output_dir: str = "twinbeam_out"
    explicit: frozenset = field(default=frozenset(), compare=False)

    def __post_init__(self):
        if self.geometry not in ("counter", "co"):
            raise ConfigError(f"geometry must be 'counter' or 'co', got {self.geometry!r}")
        if self.mismatch_mode not in ("exact", "linearized"):
            raise ConfigError(f"mismatch_mode must be 'exact' or 'linearized', got {self.mismatch_mode!r}")
        if self.phase_mode not in (None, "optimal", "fixed"):
            raise ConfigError(f"phase_mode must be 'optimal' or 'fixed', got {self.phase_mode!r}")
        if self.gains is not None:
            gains = [float(g) for g in self.gains]
            if any(g < 0 for g in gains):
                raise ConfigError("gains must be non-negative")
            if self.geometry == "counter" and any(g >= G_THRESHOLD for g in gains):
                raise ConfigError("counter-propagating gains must lie below pi/2")
            object.__setattr__(self, "gains", gains)
        if self.cutoff <= 0:
            raise ConfigError("cutoff must be positive")
        if self.grid_points is not None and self.grid_points < 2:
            raise ConfigError("grid_points must be at least 2")

    @classmethod
    def keys(cls) -> list[str]:
        return [f.name for f in dataclasses.fields(cls) if f.name != "explicit"]

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any], base: "Scenario | None" = None) -> "Scenario":
        unknown = sorted(set(data) - set(cls.keys()))
        if unknown:
            raise ConfigError(f"unknown scenario keys: {', '.join(unknown)}")
        base = cls() if base is None else base
        try:
            return dataclasses.replace(base, **dict(data), explicit=base.explicit | frozenset(data))
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def updated(self, **changes) -> "Scenario":
        return Scenario.from_mapping(changes, self)

    def material_data(self) -> MaterialDispersion:
        return load_material(self.material)

    def interaction(self, gain: float, geometry: str | None = None) -> InteractionConfig:
        period = None if self.poling_period_nm is None else self.poling_period_nm * 1e-9
        return InteractionConfig(
            lambda_p=self.lambda_p_nm * 1e-9,
            lambda_s=self.lambda_s_nm * 1e-9,
            crystal_length=self.crystal_length_m,
            gain=gain,
            poling_period=period,
            poling_order=self.poling_order,
            pump_phase=self.pump_phase_rad,
            geometry=geometry or self.geometry,
        )

    def model(self, gain: float, material: MaterialDispersion | None = None) -> TwinBeamModel:
        material = self.material_data() if material is None else material
        return TwinBeamModel.from_config(self.interaction(gain), material, self.mismatch_mode,
                                         include_beta=self.include_beta)

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.keys()}


def load_scenario(path: str | Path | None, overrides: Mapping[str, Any] | None = None) -> Scenario:
    """Read a scenario file (or start from defaults) and apply overrides."""
    scenario = Scenario()
    if path is not None:
        try:
            with open(path, "rb") as fh:
                data = tomllib.load(fh)
        except (OSError, tomllib.TOMLDecodeError) as exc:
            raise ConfigError(f"cannot read scenario {path}: {exc}") from exc
        scenario = Scenario.from_mapping(data, scenario)
    if overrides:
        scenario = Scenario.from_mapping(overrides, scenario)
    return scenario


def parse_assignment(text: str) -> tuple[str, Any]:
    """Parse ``key=value`` with the value read as a TOML literal; bare words
    are taken as strings."""
    if "=" not in text:
        raise ConfigError(f"expected key=value, got {text!r}")
    key, raw = (s.strip() for s in text.split("=", 1))
    try:
        value = tomllib.loads(f"v = {raw}")["v"]
    except tomllib.TOMLDecodeError:
        value = raw
    return key, value

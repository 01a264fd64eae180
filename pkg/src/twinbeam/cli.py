"""Command-line front end.

Subcommands ``timescales``, ``figure`` and ``sweep`` read a scenario
(defaults, then ``--scenario`` file, then flags), compute, and write CSV
series plus a JSON manifest into the output directory.

Exit codes: 0 success, 2 configuration or usage error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import hashlib
import json
import os
import sys
import tempfile
import warnings
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .dispersion import G_THRESHOLD, qpm_poling_period, timescales
from .errors import (
    AboveThreshold,
    BadBracket,
    ConfigError,
    InvalidCoeffs,
    NearThresholdWarning,
    NoCrossing,
    NoSolution,
    NumericalInstability,
    OutOfRange,
    QuadratureFailure,
)
from .intensity_noise import default_detection_times, mean_intensity, variance_curve, variance_spontaneous, vminus_spectrum
from .scenario import Scenario, load_scenario, parse_assignment
from .spectra import PhaseChoice, default_grid, intensity_spectrum, squeezing_bandwidth, squeezing_spectrum

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
CONFIG_ERRORS = (ConfigError, OutOfRange, NoSolution, AboveThreshold, OSError)
NUMERIC_ERRORS = (NumericalInstability, QuadratureFailure, NoCrossing, InvalidCoeffs, BadBracket)

FIGURES = {
    "fig3": {"geometry": "counter", "gains": [0.1, 0.5, 1.0, 1.4, 1.5],
             "title": "intensity spectra |V_s|^2"},
    "fig4": {"geometry": "counter", "gains": [0.5, 1.0, 1.4, 1.5],
             "title": "quadrature squeezing spectra"},
    "fig5": {"geometry": "co", "gains": [0.5, 1.0, 2.0, 3.0],
             "title": "co-propagating squeezing and intensity spectra"},
    "fig6": {"geometry": "counter", "gains": [0.1, 1.5],
             "title": "intensity-difference spectrum over shot noise"},
    "fig7": {"geometry": "counter", "gains": [0.1, 1.0, 1.5],
             "title": "photon-number-difference variance over shot noise"},
}
SWEEPS = ("sigma0_optimal", "bandwidth", "mean_intensity")
FIG6_POINTS = 241
FIG6_SPAN = 6.0


class UsageError(ConfigError):
    pass


# --------------------------------------------------------------------- output

def _fmt(x) -> str:
    return "{:.12e}".format(float(x))


def csv_text(columns: dict) -> str:
    """Comma-separated table with a header row and ``%.12e`` numbers."""
    names = list(columns)
    n = len(next(iter(columns.values())))
    lines = [",".join(names)]
    for j in range(n):
        lines.append(",".join(_fmt(columns[k][j]) for k in names))
    return "\n".join(lines) + "\n"


def atomic_write(path: Path, text: str) -> str:
    """Write via a temporary file and rename; returns the sha256 of the bytes."""
    data = text.encode("utf-8")
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return hashlib.sha256(data).hexdigest()


def _gain_tag(g: float) -> str:
    return f"g{g:.4f}"


class RunWriter:
    """Collects output files of one command and writes the manifest."""

    def __init__(self, out_dir: Path, name: str, scenario: Scenario, argv: Sequence[str]):
        self.out_dir = Path(out_dir)
        self.name = name
        self.scenario = scenario
        self.argv = list(argv)
        self.files = []
        self.extra = {}

    def csv(self, filename: str, columns: dict, **meta) -> Path:
        path = self.out_dir / filename
        digest = atomic_write(path, csv_text(columns))
        entry = {"file": filename, "sha256": digest, "rows": len(next(iter(columns.values()))),
                 "columns": list(columns)}
        entry.update(meta)
        self.files.append(entry)
        return path

    def json_file(self, filename: str, payload: dict) -> Path:
        path = self.out_dir / filename
        digest = atomic_write(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
        self.files.append({"file": filename, "sha256": digest})
        return path

    def gnuplot(self, x: str, y: str, title: str, logy: bool = False) -> Path:
        lines = ["set datafile separator ','", "set key autotitle columnhead",
                 f"set title '{self.name}: {title}'", f"set xlabel '{x}'", f"set ylabel '{y}'"]
        if logy:
            lines.append("set logscale y")
        plots = [f"'{f['file']}' using '{x}':'{y}' with lines title '{f['file']}'"
                 for f in self.files if f["file"].endswith(".csv")]
        lines.append("plot " + ", \\\n     ".join(plots))
        path = self.out_dir / f"{self.name}.gp"
        atomic_write(path, "\n".join(lines) + "\n")
        return path

    def manifest(self) -> Path:
        payload = {
            "tool": "twinbeam",
            "version": __version__,
            "command": self.name,
            "argv": self.argv,
            "scenario": self.scenario.as_dict(),
            "files": self.files,
            "created_utc": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        }
        payload.update(self.extra)
        path = self.out_dir / f"{self.name}_manifest.json"
        atomic_write(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return path


# -------------------------------------------------------------------- helpers

def _for_geometry(scenario: Scenario, geometry: str) -> Scenario:
    if "geometry" in scenario.explicit and scenario.geometry != geometry:
        raise ConfigError(f"this command needs geometry '{geometry}', scenario sets '{scenario.geometry}'")
    return scenario.updated(geometry=geometry)


def _gains(scenario: Scenario, default=None) -> list:
    gains = scenario.gains if scenario.gains is not None else default
    if not gains:
        raise UsageError("empty gain list")
    return list(gains)


def _grid(scenario: Scenario, model, span=None, points=None):
    span = scenario.grid_span if scenario.grid_span is not None else span
    points = scenario.grid_points if scenario.grid_points is not None else points
    return default_grid(model, points, span)


def _phase(scenario: Scenario, default_mode: str) -> PhaseChoice:
    return PhaseChoice(scenario.phase_mode or default_mode, scenario.phi_sum_rad, scenario.delay_s)


# ------------------------------------------------------------------- commands

def cmd_timescales(scenario: Scenario, writer: RunWriter, out=None) -> dict:
    out = sys.stdout if out is None else out
    material = scenario.material_data()
    config = scenario.interaction(0.0)
    ts = timescales(config, material)
    report = {"material": material.name, "geometry": scenario.geometry,
              "crystal_length_m": config.crystal_length,
              "lambda_p_m": config.lambda_p, "lambda_s_m": config.lambda_s, "lambda_i_m": config.lambda_i}
    report.update(ts.as_dict())
    report["k1_s_s_per_m"], report["k2_s_s2_per_m"] = ts.k1_s, ts.k2_s
    report["g_threshold"] = G_THRESHOLD if scenario.geometry == "counter" else None
    for geo in ("counter", "co"):
        report[f"poling_period_{geo}_m"] = qpm_poling_period(scenario.interaction(0.0, geo), material)
    report["poling_period_m"] = report[f"poling_period_{scenario.geometry}_m"]

    def line(label, value):
        print(f"{label:<16}{value}", file=out)

    line("material", material.name)
    line("geometry", scenario.geometry)
    line("tau_gvs", f"{ts.tau_gvs:.6e} s  ({ts.tau_gvs * 1e12:.4f} ps)")
    line("tau_gvm", f"{ts.tau_gvm:.6e} s  ({ts.tau_gvm * 1e12:.4f} ps)")
    line("tau_gvd", f"{ts.tau_gvd:.6e} s  ({ts.tau_gvd * 1e12:.6f} ps)")
    line("Omega_gvs", f"{ts.omega_gvs:.6e} rad/s")
    line("Omega_gvm", f"{ts.omega_gvm:.6e} rad/s")
    line("Omega_gvd", f"{ts.omega_gvd:.6e} rad/s")
    if scenario.geometry == "counter":
        line("g_threshold", f"{G_THRESHOLD:.6f} (pi/2)")
    else:
        line("g_threshold", "none (co-propagating)")
    period = report["poling_period_m"]
    line("poling_period", f"{period:.6e} m  ({period * 1e9:.4f} nm, order {scenario.poling_order})")
    # JSON has no infinity; an unbounded bandwidth is written as null
    report = {k: (None if isinstance(v, float) and not np.isfinite(v) else v) for k, v in report.items()}
    writer.json_file("timescales.json", report)
    return report


def _fig_spectra(name, scenario, writer, gains, material):
    for g in gains:
        model = scenario.model(g, material)
        tag = _gain_tag(g)
        if name == "fig3":
            spec = intensity_spectrum(_grid(scenario, model), model)
            cols = {"value": spec["intensity"], "value_normalized": spec["intensity_normalized"]}
        elif name == "fig4":
            grid = _grid(scenario, model)
            opt = squeezing_spectrum(grid, model, PhaseChoice("optimal", None, scenario.delay_s))
            fix = squeezing_spectrum(grid, model, PhaseChoice("fixed", scenario.phi_sum_rad, scenario.delay_s))
            spec = opt
            chosen = opt if _phase(scenario, "optimal").mode == "optimal" else fix
            cols = {"value": chosen["sigma"], "sigma_optimal": opt["sigma"], "sigma_fixed": fix["sigma"]}
        else:  # fig5
            grid = _grid(scenario, model)
            spec = squeezing_spectrum(grid, model, _phase(scenario, "fixed"))
            inten = intensity_spectrum(grid, model)
            cols = {"value": spec["sigma"], "intensity": inten["intensity"],
                    "intensity_normalized": inten["intensity_normalized"]}
        columns = {"omega_rad_s": spec.omega, "omega_normalized": spec.omega_normalized}
        columns.update(cols)
        writer.csv(f"{name}_{tag}.csv", columns, gain=g)


def _fig6(scenario, writer, gains, material):
    for g in gains:
        model = scenario.model(g, material)
        grid = _grid(scenario, model, FIG6_SPAN, FIG6_POINTS)
        spec = vminus_spectrum(grid, model, scenario.cutoff)
        columns = {"omega_rad_s": spec.omega, "omega_normalized": spec.omega_normalized,
                   "value": spec["vminus"], "value_normalized": spec["vminus_normalized"],
                   "spontaneous": spec["spontaneous"], "near_threshold": spec["near_threshold"]}
        writer.csv(f"fig6_{_gain_tag(g)}.csv", columns, gain=g, shot_noise_photons_s=spec.attrs["shot_noise"])


def _fig7(scenario, writer, gains, material):
    for g in gains:
        model = scenario.model(g, material)
        tau = 1.0 / model.bandwidth
        t_grid = default_detection_times(tau)
        ratio = variance_curve(t_grid, model, scenario.cutoff)
        columns = {"td_s": t_grid, "td_normalized": t_grid / tau, "value": ratio,
                   "spontaneous": variance_spontaneous(t_grid, tau)}
        writer.csv(f"fig7_{_gain_tag(g)}.csv", columns, gain=g)


def cmd_figure(name: str, scenario: Scenario, writer: RunWriter, gnuplot: bool = False) -> list:
    spec = FIGURES[name]
    scenario = _for_geometry(scenario, spec["geometry"])
    writer.scenario = scenario
    gains = _gains(scenario, spec["gains"])
    scenario = scenario.updated(gains=gains)
    writer.scenario = scenario
    material = scenario.material_data()
    if name in ("fig3", "fig4", "fig5"):
        _fig_spectra(name, scenario, writer, gains, material)
    elif name == "fig6":
        _fig6(scenario, writer, gains, material)
    else:
        _fig7(scenario, writer, gains, material)
    writer.extra["figure"] = {"name": name, "title": spec["title"]}
    if gnuplot:
        x = "td_normalized" if name == "fig7" else "omega_normalized"
        y = "value_normalized" if name in ("fig3", "fig6") else "value"
        writer.gnuplot(x, y, spec["title"], logy=name == "fig7")
    return writer.files


def _sweep_value(observable, model):
    g = model.gain
    counter = model.geometry == "counter"
    if observable == "sigma0_optimal":
        value = float(squeezing_spectrum(np.array([0.0]), model)["sigma"][0])
        closed = ((1 - np.sin(g)) / np.cos(g)) ** 2 if counter else np.exp(-2.0 * g)
        return {"value": value, "closed_form": closed}
    if observable == "bandwidth":
        try:
            res = squeezing_bandwidth(model)
        except NoCrossing:
            return {"value": np.nan, "value_normalized": np.nan, "closed_form": np.nan}
        closed = np.nan if res.closed_form is None else res.closed_form
        return {"value": res.omega, "value_normalized": res.omega_normalized, "closed_form": closed}
    value = mean_intensity(model)
    closed = g * g * model.bandwidth / 2.0 if counter else np.nan
    return {"value": value, "closed_form": closed}


def cmd_sweep(observable: str, scenario: Scenario, writer: RunWriter) -> list:
    gains = _gains(scenario)
    material = scenario.material_data()
    rows = [_sweep_value(observable, scenario.model(g, material)) for g in gains]
    columns = {"gain": gains}
    for key in rows[0]:
        columns[key] = [r[key] for r in rows]
    writer.csv(f"sweep_{observable}.csv", columns)
    writer.extra["observable"] = observable
    return writer.files


# ---------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--scenario", help="scenario TOML file")
    common.add_argument("-o", "--output-dir", help="output directory (overrides output_dir)")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a scenario key; VALUE is read as a TOML literal")
    common.add_argument("--material", help="material name or path")
    common.add_argument("--geometry", choices=["counter", "co"])
    common.add_argument("--mismatch-mode", choices=["exact", "linearized"])
    common.add_argument("--gains", nargs="*", type=float, help="gain values")

    parser = argparse.ArgumentParser(prog="twinbeam", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("timescales", parents=[common], help="slab timescales and poling period")
    fig = sub.add_parser("figure", parents=[common], help="data series of one figure")
    fig.add_argument("name", choices=sorted(FIGURES))
    fig.add_argument("--gnuplot", action="store_true", help="also write a gnuplot script")
    sw = sub.add_parser("sweep", parents=[common], help="tabulate an observable against gain")
    sw.add_argument("observable", choices=SWEEPS)
    return parser


def _scenario_from_args(args) -> Scenario:
    overrides = dict(parse_assignment(s) for s in args.set)
    for attr, key in (("material", "material"), ("geometry", "geometry"),
                      ("mismatch_mode", "mismatch_mode"), ("output_dir", "output_dir")):
        value = getattr(args, attr)
        if value is not None:
            overrides[key] = value
    if args.gains is not None:
        if not args.gains:
            raise UsageError("--gains needs at least one value")
        overrides["gains"] = args.gains
    return load_scenario(args.scenario, overrides)


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        scenario = _scenario_from_args(args)
        writer = RunWriter(Path(scenario.output_dir), args.command if args.command != "figure" else args.name,
                           scenario, argv)
        with warnings.catch_warnings():
            warnings.simplefilter("always", NearThresholdWarning)
            if args.command == "timescales":
                cmd_timescales(scenario, writer)
            elif args.command == "figure":
                cmd_figure(args.name, scenario, writer, args.gnuplot)
            else:
                cmd_sweep(args.observable, scenario, writer)
        writer.manifest()
        if args.command != "timescales":
            for f in writer.files:
                print(writer.out_dir / f["file"])
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"twinbeam: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CONFIG_ERRORS as exc:
        print(f"twinbeam: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NUMERIC_ERRORS as exc:
        print(f"twinbeam: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

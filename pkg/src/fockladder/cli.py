"""Command-line front end: parse flags, run one experiment, write files.

Every run writes two files: the data file (CSV by default, JSON on
request) and a metadata sidecar <out>.meta.json recording the full
configuration, package version, wall time and a small result summary.
The sidecar's config block round-trips: load_sidecar_config returns a
RunConfig equal to the one that produced the run.  Data files are
deterministic, so reruns with the same configuration are
byte-identical; only the sidecar's wall time differs.

Exit codes: 0 success, 1 compute or I/O error (and `validate` with any
failed check), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import __version__
from .experiments import (
    DEFAULT_NS,
    DEFAULT_PHI_GRID,
    band_panels,
    entropy_scan,
    find_mu_max,
    fit_inverse_size,
    interaction_scan,
    refine_interaction_peak,
    scan_flux,
    scan_threads,
)
from .floquet import BranchAmbiguityError, SystemParams, build_floquet, ground_state, spectrum
from .lattice import rung_values
from .meanfield import chiral_current_analytic, entropy_analytic, mu_critical
from .observables import (
    chiral_current_normalized,
    entanglement_entropy_numeric,
    fock_density_phase,
)
from .validation import run_invariant_suite

__all__ = ["RunConfig", "parse_args", "run", "main", "load_sidecar_config"]

COMMANDS = ("bands", "ground", "current-scan", "mu-scan", "fss", "entropy-scan", "validate")

# Default flux grid for entropy scans starts one step into the zone;
# the analytic entropy is singular at zero flux.
ENTROPY_PHI_MIN = float(DEFAULT_PHI_GRID[1])

HALF_PI = math.pi / 2.0


@dataclass(frozen=True)
class RunConfig:
    """One resolved CLI invocation.

    Fields a command does not consume keep their defaults, so any
    config serializes to the same shape and the sidecar round-trip is
    a plain field-by-field comparison.
    """

    command: str
    n: int = 100
    mu: float = 0.0
    xi: float = 0.5
    phi: float = 0.0
    tau: float = 0.01
    phi_min: float = 0.0
    phi_max: float = HALF_PI
    phi_points: int = 121
    mu_min: float = -0.6
    mu_max: float = 0.1
    mu_points: int = 71
    ns: tuple = DEFAULT_NS
    fluxes: tuple | None = None
    out: str | None = None
    format: str = "csv"

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.format not in ("csv", "json"):
            raise ValueError(f"unknown format {self.format!r}")

    def to_dict(self):
        data = dataclasses.asdict(self)
        data["ns"] = list(self.ns)
        data["fluxes"] = None if self.fluxes is None else list(self.fluxes)
        return data

    @classmethod
    def from_dict(cls, data):
        values = dict(data)
        values["ns"] = tuple(values.get("ns", DEFAULT_NS))
        fluxes = values.get("fluxes")
        values["fluxes"] = None if fluxes is None else tuple(fluxes)
        return cls(**values)

    def out_path(self):
        return self.out if self.out else f"{self.command}.{self.format}"


def load_sidecar_config(path):
    """RunConfig stored in a metadata sidecar written by a previous run."""
    with open(path, encoding="utf-8") as handle:
        return RunConfig.from_dict(json.load(handle)["config"])


# ---------------------------------------------------------------- parsing

def _even_bosons(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if value <= 0 or value % 2:
        raise argparse.ArgumentTypeError(
            f"boson number must be a positive even integer, got {value}"
        )
    return value


def _finite_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number")
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"value must be finite, got {value}")
    return value


def _positive_float(text):
    value = _finite_float(text)
    if value <= 0.0:
        raise argparse.ArgumentTypeError(f"value must be positive, got {value}")
    return value


def _nonnegative_float(text):
    value = _finite_float(text)
    if value < 0.0:
        raise argparse.ArgumentTypeError(f"value must be nonnegative, got {value}")
    return value


def _points_at_least(minimum):
    def convert(text):
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
        if value < minimum:
            raise argparse.ArgumentTypeError(f"need at least {minimum} points, got {value}")
        return value

    return convert


def _size_list(text):
    try:
        values = tuple(int(token) for token in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a comma-separated integer list")
    if len(values) < 3:
        raise argparse.ArgumentTypeError(f"need at least 3 sizes, got {len(values)}")
    if any(v <= 0 or v % 2 for v in values):
        raise argparse.ArgumentTypeError(f"sizes must be positive even integers, got {text!r}")
    if len(set(values)) != len(values):
        raise argparse.ArgumentTypeError(f"duplicate sizes in {text!r}")
    return values


def _flux_list(text):
    if text.strip().lower() == "auto":
        return None
    try:
        values = tuple(float(token) for token in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"{text!r} is neither 'auto' nor a comma-separated number list"
        )
    if not values or any(not math.isfinite(v) for v in values):
        raise argparse.ArgumentTypeError(f"flux list {text!r} must hold finite numbers")
    return values


def _add_system_flags(parser, with_mu=True):
    parser.add_argument("--n", type=_even_bosons, default=100,
                        help="boson number, positive even (default 100)")
    if with_mu:
        parser.add_argument("--mu", type=_finite_float, default=0.0,
                            help="scaled boson-boson interaction (default 0)")
    parser.add_argument("--xi", type=_nonnegative_float, default=0.5,
                        help="impurity-BEC coupling ratio (default 0.5)")
    parser.add_argument("--tau", type=_positive_float, default=0.01,
                        help="driving period in units of 1/J (default 0.01)")


def _add_phi_grid_flags(parser, default_min=0.0, default_points=121):
    parser.add_argument("--phi-min", type=_finite_float, default=default_min,
                        help=f"lowest flux in rad (default {default_min:g})")
    parser.add_argument("--phi-max", type=_finite_float, default=HALF_PI,
                        help="highest flux in rad (default pi/2)")
    parser.add_argument("--phi-points", type=_points_at_least(2), default=default_points,
                        help=f"flux grid size (default {default_points})")


def _add_mu_grid_flags(parser):
    parser.add_argument("--mu-min", type=_finite_float, default=-0.6,
                        help="lowest interaction (default -0.6)")
    parser.add_argument("--mu-max", type=_finite_float, default=0.1,
                        help="highest interaction (default 0.1)")
    parser.add_argument("--mu-points", type=_points_at_least(3), default=71,
                        help="interaction grid size (default 71)")


def _add_output_flags(parser):
    parser.add_argument("--out", default=None,
                        help="output path (default <command>.<format>)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="data file format (default csv)")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="fockladder",
        description="Fock-state ladder simulations of a driven bosonic "
                    "junction coupled to an impurity.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("bands", help="band curves, phase densities and ground strips per flux")
    _add_system_flags(p)
    p.add_argument("--fluxes", type=_flux_list, default=None,
                   help="comma-separated fluxes in rad, or 'auto' for "
                        "phi_c/2, phi_c, 3 phi_c/2 (default auto)")
    _add_output_flags(p)

    p = sub.add_parser("ground", help="ground-state site data and observables at one point")
    _add_system_flags(p)
    p.add_argument("--phi", type=_finite_float, default=0.0,
                   help="flux in rad (default 0)")
    _add_output_flags(p)

    p = sub.add_parser("current-scan", help="chiral current versus flux")
    _add_system_flags(p)
    _add_phi_grid_flags(p)
    _add_output_flags(p)

    p = sub.add_parser("mu-scan", help="peak chiral current versus interaction")
    _add_system_flags(p, with_mu=False)
    _add_phi_grid_flags(p)
    _add_mu_grid_flags(p)
    _add_output_flags(p)

    p = sub.add_parser("fss", help="finite-size extrapolation of the current maximum")
    p.add_argument("--ns", type=_size_list, default=DEFAULT_NS,
                   help="comma-separated even boson numbers (default 20,40,60,80,100)")
    p.add_argument("--xi", type=_nonnegative_float, default=0.5,
                   help="impurity-BEC coupling ratio (default 0.5)")
    p.add_argument("--tau", type=_positive_float, default=0.01,
                   help="driving period in units of 1/J (default 0.01)")
    _add_phi_grid_flags(p)
    _add_mu_grid_flags(p)
    _add_output_flags(p)

    p = sub.add_parser("entropy-scan", help="impurity entanglement entropy versus flux")
    _add_system_flags(p, with_mu=False)
    _add_phi_grid_flags(p, default_min=ENTROPY_PHI_MIN, default_points=120)
    _add_output_flags(p)

    p = sub.add_parser("validate", help="run the cross-module invariant suite")
    _add_output_flags(p)

    return parser


def parse_args(argv=None):
    """Parse argv into a RunConfig; usage errors exit with code 2."""
    parser = _build_parser()
    args = parser.parse_args(argv)

    if hasattr(args, "phi_min"):
        if args.phi_min >= args.phi_max:
            parser.error("--phi-min must be smaller than --phi-max")
        if args.phi_min < 0.0 or args.phi_max > HALF_PI + 1e-12:
            parser.error("flux grid must lie within [0, pi/2]")
        if args.command == "entropy-scan" and args.phi_min <= 0.0:
            parser.error("--phi-min must be positive for entropy-scan")
    if hasattr(args, "mu_min") and args.mu_min >= args.mu_max:
        parser.error("--mu-min must be smaller than --mu-max")

    field_names = {field.name for field in dataclasses.fields(RunConfig)}
    values = {
        name: getattr(args, name)
        for name in field_names
        if name != "command" and hasattr(args, name)
    }
    return RunConfig(command=args.command, **values)


# ---------------------------------------------------------------- writers

def _format_cell(value):
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format_cell(cell) for cell in row])


def _write_json(path, payload):
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2)
        handle.write("\n")


def _write_sidecar(path, config, wall_time, result):
    payload = {
        "version": __version__,
        "config": config.to_dict(),
        "wall_time_s": round(wall_time, 6),
        "result": result,
    }
    _write_json(path, payload)


def _native(value):
    if value is None:
        return None
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    return float(value)


def _unmask(value):
    return None if np.ma.is_masked(value) else float(value)


def _phase_rows(phase):
    return [[_unmask(value) for value in row] for row in np.ma.asarray(phase)]


# ---------------------------------------------------------------- commands

def _cmd_bands(config, threads):
    panels = band_panels(config.n, config.xi, mu=config.mu, tau=config.tau,
                         flux_list=config.fluxes, threads=threads)
    rungs = rung_values(config.n)
    header = [
        "flux [rad]", "theta [rad]", "e_lower [J]", "e_upper [J]", "rung [n]",
        "ground_density_left [prob]", "ground_density_right [prob]",
        "ground_phase_left [rad]", "ground_phase_right [rad]",
    ]
    rows = []
    for panel in panels:
        phase = _phase_rows(panel.ground_phase)
        for k in range(config.n + 1):
            rows.append([
                panel.flux, panel.thetas[k], panel.e_lower[k], panel.e_upper[k],
                rungs[k], panel.ground_density[0, k], panel.ground_density[1, k],
                phase[0][k], phase[1][k],
            ])
    payload = {
        "panels": [
            {
                "flux": panel.flux,
                "thetas": panel.thetas.tolist(),
                "e_lower": panel.e_lower.tolist(),
                "e_upper": panel.e_upper.tolist(),
                "quasienergies": panel.quasienergies.tolist(),
                "density": panel.density.tolist(),
                "ground_quasienergy": panel.ground_quasienergy,
                "ground_density": panel.ground_density.tolist(),
                "ground_phase": _phase_rows(panel.ground_phase),
            }
            for panel in panels
        ]
    }
    result = {
        "fluxes": [panel.flux for panel in panels],
        "ground_quasienergies": [panel.ground_quasienergy for panel in panels],
    }
    fluxes = ", ".join(f"{panel.flux:.6g}" for panel in panels)
    return header, rows, payload, result, [f"bands: {len(panels)} panels at flux {fluxes}"]


def _cmd_ground(config, threads):
    params = SystemParams(n=config.n, mu=config.mu, xi=config.xi,
                          phi=config.phi, tau=config.tau)
    spec = spectrum(build_floquet(params), config.tau)
    eps0, state = ground_state(spec)
    fock = fock_density_phase(state)
    jc = chiral_current_normalized(state, config.phi)
    ent = entanglement_entropy_numeric(state)
    in_domain = 0.0 <= config.phi <= HALF_PI
    jc_ana = chiral_current_analytic(config.phi, config.xi) if in_domain else None
    ent_ana = (
        entropy_analytic(config.phi, config.xi)
        if in_domain and math.sin(config.phi) != 0.0
        else None
    )
    header = ["leg [m]", "rung [n]", "density [prob]", "phase [rad]"]
    rungs = rung_values(config.n)
    phase = _phase_rows(fock.phase)
    rows = []
    for m_index, m in enumerate((-1, 1)):
        for k in range(config.n + 1):
            rows.append([m, rungs[k], fock.density[m_index, k], phase[m_index][k]])
    result = {
        "quasienergy": float(eps0),
        "jc_numeric": jc,
        "jc_analytic": jc_ana,
        "entropy_numeric": ent,
        "entropy_analytic": ent_ana,
    }
    line = (f"ground: quasienergy={eps0:.10g} jc={jc:.10g} entropy={ent:.10g}")
    return header, rows, None, result, [line]


def _phi_grid(config):
    return np.linspace(config.phi_min, config.phi_max, config.phi_points)


def _mu_grid(config):
    return np.linspace(config.mu_min, config.mu_max, config.mu_points)


def _cmd_current_scan(config, threads):
    records = scan_flux(config.n, config.mu, config.xi, tau=config.tau,
                        phi_grid=_phi_grid(config), threads=threads)
    header = ["phi [rad]", "jc_numeric [2J_C/(N J)]", "jc_analytic [2J_C/(N J)]"]
    rows = [[r.params.phi, r.jc_numeric, r.jc_analytic] for r in records]
    best = max(records, key=lambda r: r.jc_numeric)
    result = {
        "peak_phi": best.params.phi,
        "peak_jc": best.jc_numeric,
        "points": len(records),
    }
    line = (f"current-scan: {len(records)} fluxes, "
            f"peak jc={best.jc_numeric:.10g} at phi={best.params.phi:.10g}")
    return header, rows, None, result, [line]


def _cmd_mu_scan(config, threads):
    scan_rows = interaction_scan(config.n, config.xi, tau=config.tau,
                                 mu_grid=_mu_grid(config),
                                 phi_grid=_phi_grid(config), threads=threads)
    mu_max, max_jc = refine_interaction_peak(scan_rows, config.n, config.xi,
                                             tau=config.tau,
                                             phi_grid=_phi_grid(config),
                                             threads=threads)
    header = ["mu [dimensionless]", "peak_phi [rad]", "peak_jc [2J_C/(N J)]"]
    rows = [list(row) for row in scan_rows]
    result = {
        "mu_max": mu_max,
        "max_jc": max_jc,
        "mu_c": mu_critical(config.xi),
    }
    line = (f"mu-scan: mu_max={mu_max:.10g} max_jc={max_jc:.10g} "
            f"(mu_c={result['mu_c']:.10g})")
    return header, rows, None, result, [line]


def _cmd_fss(config, threads):
    target = mu_critical(config.xi)
    header = ["n [bosons]", "inverse_n [1/bosons]",
              "mu_max [dimensionless]", "abs_mu_diff [dimensionless]"]
    rows = []
    points = []
    for n_bosons in config.ns:
        mu_max, _ = find_mu_max(n_bosons, config.xi, tau=config.tau,
                                mu_grid=_mu_grid(config),
                                phi_grid=_phi_grid(config), threads=threads)
        diff = abs(mu_max - target)
        rows.append([n_bosons, 1.0 / n_bosons, mu_max, diff])
        points.append((1.0 / n_bosons, diff))
    fit = fit_inverse_size(points)
    result = {
        "slope": fit.slope,
        "intercept": fit.intercept,
        "r_squared": fit.r_squared,
        "mu_c": target,
    }
    line = (f"fss: intercept={fit.intercept:.10g} slope={fit.slope:.10g} "
            f"r_squared={fit.r_squared:.10g}")
    return header, rows, None, result, [line]


def _cmd_entropy_scan(config, threads):
    records = entropy_scan(config.n, config.xi, tau=config.tau,
                           phi_grid=_phi_grid(config), threads=threads)
    header = ["phi [rad]", "entropy_numeric [nats]", "entropy_analytic [nats]"]
    rows = [[r.params.phi, r.entropy_numeric, r.entropy_analytic] for r in records]
    best = max(records, key=lambda r: r.entropy_numeric)
    result = {
        "max_entropy": best.entropy_numeric,
        "argmax_phi": best.params.phi,
        "points": len(records),
    }
    line = (f"entropy-scan: {len(records)} fluxes, "
            f"max entropy={best.entropy_numeric:.10g} at phi={best.params.phi:.10g}")
    return header, rows, None, result, [line]


def _cmd_validate(config, threads):
    checks = run_invariant_suite()
    header = ["check [name]", "passed [bool]", "detail [text]"]
    rows = [[c.name, "true" if c.passed else "false", c.detail] for c in checks]
    failed = [c.name for c in checks if not c.passed]
    result = {
        "total": len(checks),
        "passed": len(checks) - len(failed),
        "failed_names": failed,
        "all_passed": not failed,
    }
    lines = [
        f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.detail}" for c in checks
    ]
    lines.append(f"{result['passed']}/{result['total']} checks passed")
    return header, rows, None, result, lines


_COMMANDS = {
    "bands": _cmd_bands,
    "ground": _cmd_ground,
    "current-scan": _cmd_current_scan,
    "mu-scan": _cmd_mu_scan,
    "fss": _cmd_fss,
    "entropy-scan": _cmd_entropy_scan,
    "validate": _cmd_validate,
}


def run(config):
    """Execute one RunConfig; returns the process exit code."""
    try:
        threads = scan_threads()
    except ValueError as exc:
        print(f"fockladder: error: {exc}", file=sys.stderr)
        return 2

    out_path = config.out_path()
    directory = os.path.dirname(os.path.abspath(out_path))
    if not os.path.isdir(directory) or not os.access(directory, os.W_OK):
        print(f"fockladder: error: output directory {directory!r} is not writable",
              file=sys.stderr)
        return 1

    start = time.perf_counter()
    try:
        header, rows, payload, result, lines = _COMMANDS[config.command](config, threads)
    except (ValueError, ArithmeticError, np.linalg.LinAlgError, BranchAmbiguityError) as exc:
        print(f"fockladder: error: {exc}", file=sys.stderr)
        return 1
    wall_time = time.perf_counter() - start

    try:
        if config.format == "csv":
            _write_csv(out_path, header, rows)
        else:
            if payload is None:
                payload = {
                    "columns": header,
                    "rows": [[_native(cell) for cell in row] for row in rows],
                }
            _write_json(out_path, payload)
        _write_sidecar(out_path + ".meta.json", config, wall_time, result)
    except OSError as exc:
        print(f"fockladder: error: {exc}", file=sys.stderr)
        return 1

    for line in lines:
        print(line)
    print(f"wrote {out_path} and {out_path}.meta.json")

    if config.command == "validate" and not result["all_passed"]:
        return 1
    return 0


def main(argv=None):
    """Console entry point."""
    return run(parse_args(argv))

"""Command line entry point: ``cpaswitch <subcommand> --config <path>``.

Exit codes: 0 success, 1 configuration or usage error, 2 numerical
failure, 3 failed validation.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from typing import Any

import numpy as np

from . import __version__
from .config import RunConfig, config_to_dict, load_config, parse_config
from .errors import ConfigError, CpaSwitchError, InvalidInputError, NumericalError
from .invariants import run_invariant_suite
from .nonlinear import (cpa_threshold_points, default_a_grid, detect_multistability,
                        trace_input_output)
from .oracle import crosscheck_linear
from .polaritons import LABELS, locate_cpa_points, polariton_frequencies
from .spectra import (ScanAxis, bandwidth_and_switch_time, efficiency_scan, sweep_spectrum,
                      tune_control_to_channel)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VALIDATION = 0, 1, 2, 3
SUBCOMMANDS = ("spectrum", "polaritons", "efficiency", "bandwidth", "nonlinear", "validate")

CSV_HEADERS = {
    "spectrum": ("delta_p_over_gamma", "i_t_over_i_in", "i_cav_norm"),
    "polaritons": ("record", "label", "delta_p_over_gamma", "value"),
    "efficiency": ("axis_value", "channel", "eta_t", "eta_i"),
    "bandwidth": ("channel", "i_max", "i_min", "two_delta_gamma", "two_delta_mhz",
                  "switch_time_us"),
    "nonlinear": ("a_mag", "i_in", "i_t", "slope_sign"),
    "validate": ("check", "value", "tolerance", "passed"),
}


class Output:
    """Result of a subcommand: CSV rows plus a JSON document and an exit code."""

    def __init__(self, name: str, rows: list, doc: dict, code: int = EXIT_OK,
                 notes: list[str] | None = None):
        self.name = name
        self.rows = rows
        self.doc = doc
        self.code = code
        self.notes = notes or []


def _csv_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        return format(v, ".12g")
    return "" if value is None else str(value)


def render_csv(name: str, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(CSV_HEADERS[name]) + "\n")
    for row in rows:
        buf.write(",".join(_csv_cell(v) for v in row) + "\n")
    return buf.getvalue()


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": _jsonable(value.real), "im": _jsonable(value.imag)}
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return None if not math.isfinite(v) else v
    if hasattr(value, "value"):  # enums
        return value.value
    return value


def render_json(doc: dict) -> str:
    return json.dumps(_jsonable(doc), indent=2, allow_nan=False) + "\n"


def _snapshot(cfg: RunConfig) -> dict:
    return config_to_dict(cfg)


# ---- subcommands ----------------------------------------------------------

def run_spectrum(cfg: RunConfig) -> Output:
    s = cfg.sweep
    series = sweep_spectrum(cfg.system, cfg.control.field(), s.min, s.max, s.count)
    rows = list(zip(series.grid, series.i_t, series.i_cav))
    doc = {"command": "spectrum", "params_snapshot": _snapshot(cfg),
           "delta_p_over_gamma": series.grid, "i_t_over_i_in": series.i_t,
           "i_cav_norm": series.i_cav}
    return Output("spectrum", rows, doc)


def run_polaritons(cfg: RunConfig) -> Output:
    pols = polariton_frequencies(cfg.system)
    s = cfg.sweep
    series = sweep_spectrum(cfg.system, cfg.control.field(), s.min, s.max, s.count)
    report = locate_cpa_points(series, s.threshold)
    rows = [("polariton", label, f, None) for label, f in pols]
    rows += [("cpa", str(k), x, v) for k, (x, v) in enumerate(report.cpa_points)]
    rows.append(("residual", "g_coll+delta_c", None, report.residual))
    doc = {"command": "polaritons", "params_snapshot": _snapshot(cfg),
           "polaritons": {"labels": list(pols.labels), "freqs": list(pols.freqs)},
           "cpa": {"residual": report.residual, "threshold": s.threshold,
                   "points": [{"delta_p": x, "i_t_over_i_in": v} for x, v in report.cpa_points]}}
    return Output("polaritons", rows, doc)


def _scan_values(s) -> np.ndarray:
    if s.scan_count == 1:
        return np.array([s.scan_min])
    if s.scan_spacing == "log":
        return np.geomspace(s.scan_min, s.scan_max, s.scan_count)
    return np.linspace(s.scan_min, s.scan_max, s.scan_count)


def _channel_deltas(cfg: RunConfig, omegas, freqs):
    cd = cfg.control.channel_delta
    if cd == "polariton":
        return list(freqs)
    if cd == "tuned":
        return [tune_control_to_channel(cfg.system, w, f, cfg.control.dressing)
                for w, f in zip(omegas, freqs)]
    return list(cd)


def run_efficiency(cfg: RunConfig) -> Output:
    s = cfg.sweep
    values = _scan_values(s)
    cd = cfg.control.channel_delta
    if cd == "tuned":
        deltas = None
    elif cd == "polariton":
        if s.scan_axis is ScanAxis.G_COLL:
            raise ConfigError("polariton detunings move with g_coll; use tuned or explicit values",
                              field="control.channel_delta")
        deltas = list(polariton_frequencies(cfg.system).freqs)
    else:
        deltas = list(cd)
    scan = efficiency_scan(cfg.system, cfg.control.field(), s.scan_axis, values,
                           channel_omegas=cfg.control.channel_omega, channel_deltas=deltas)
    rows = [(v, LABELS[ch], scan.eta_t[i, ch], scan.eta_i[i, ch])
            for i, v in enumerate(scan.axis) for ch in range(3)]
    doc = {"command": "efficiency", "params_snapshot": _snapshot(cfg),
           "axis": scan.axis_name.value, "values": scan.axis, "channels": list(LABELS),
           "eta_t": scan.eta_t, "eta_i": scan.eta_i, "control_delta": scan.control_delta}
    return Output("efficiency", rows, doc)


def run_bandwidth(cfg: RunConfig) -> Output:
    s = cfg.sweep
    freqs = polariton_frequencies(cfg.system).freqs
    omegas = cfg.control.channel_omega
    deltas = _channel_deltas(cfg, omegas, freqs)
    base = cfg.control.field()
    off = sweep_spectrum(cfg.system, base.off(), s.min, s.max, s.count)
    rows, results, notes = [], [], []
    code = EXIT_OK
    for ch, label in enumerate(LABELS):
        control = base.evolve(omega=omegas[ch], delta=deltas[ch])
        entry: dict[str, Any] = {"channel": label, "control_omega": omegas[ch],
                                 "control_delta": deltas[ch]}
        try:
            on = sweep_spectrum(cfg.system, control, s.min, s.max, s.count)
            r = bandwidth_and_switch_time(on, off, freqs[ch], cfg.system.gamma_mhz)
            vals = (r.i_max, r.i_min, r.two_delta_gamma, r.two_delta_mhz, r.switch_time_us)
            entry.update(i_max=r.i_max, i_min=r.i_min, half_level=r.half_level,
                         peak_delta_p=r.peak_delta_p, two_delta_gamma=r.two_delta_gamma,
                         two_delta_mhz=r.two_delta_mhz, switch_time_us=r.switch_time_us)
        except NumericalError as exc:
            vals = (math.nan,) * 5
            entry["error"] = f"{type(exc).__name__}: {exc}"
            notes.append(f"{label}: {exc}")
            code = EXIT_NUMERIC
        rows.append((label,) + vals)
        results.append(entry)
    doc = {"command": "bandwidth", "params_snapshot": _snapshot(cfg), "channels": results}
    return Output("bandwidth", rows, doc, code, notes)


def run_nonlinear(cfg: RunConfig) -> Output:
    n = cfg.nonlinear
    dp = cfg.system.delta_c if n.delta_p is None else n.delta_p
    branch = trace_input_output(cfg.system, cfg.control.field(), dp,
                                default_a_grid(n.a_max, n.count))
    cpas = cpa_threshold_points(branch, n.threshold)
    windows = detect_multistability(branch)
    rows = [(p.a_mag, p.i_in, p.i_t, p.slope_sign) for p in branch]
    doc = {"command": "nonlinear", "params_snapshot": _snapshot(cfg), "delta_p": dp,
           "branch": {"a_mag": [p.a_mag for p in branch], "i_in": [p.i_in for p in branch],
                      "i_t": [p.i_t for p in branch],
                      "slope_sign": [p.slope_sign for p in branch]},
           "cpa_thresholds": [{"i_in": c.i_in, "a_mag": c.a_mag, "i_t_over_i_in": c.ratio,
                               "stored_over_input": c.stored_ratio} for c in cpas],
           "multistability": [{"i_in_low": lo, "i_in_high": hi} for lo, hi in windows]}
    notes = [f"CPA thresholds (I_in): {[c.i_in for c in cpas]}",
             f"multistable windows (I_in): {windows}"]
    return Output("nonlinear", rows, doc, notes=notes)


def run_validate(cfg: RunConfig) -> Output:
    o, s = cfg.oracle, cfg.sweep
    checks = []
    report = crosscheck_linear(cfg.system, cfg.control.field(), s.min, s.max, o.grid_count,
                               o.drive_scale, o.integration())
    checks.append(("oracle_max_rel_error", report.max_rel_error, o.tolerance,
                   report.max_rel_error < o.tolerance))
    checks.append(("oracle_converged", float(report.converged), 1.0, report.converged))
    if o.invariant_draws > 0:
        inv = run_invariant_suite(o.invariant_draws, o.seed)
        for c in inv.checks:
            checks.append((f"invariant: {c.name}", c.worst, c.tolerance, c.passed))
    ok = all(c[3] for c in checks)
    doc = {"command": "validate", "params_snapshot": _snapshot(cfg), "passed": ok,
           "max_rel_error": report.max_rel_error,
           "checks": [{"check": n, "value": v, "tolerance": t, "passed": p}
                      for n, v, t, p in checks]}
    notes = [f"{'PASS' if p else 'FAIL'} {n}: {v:.3e} (tol {t:.1e})" for n, v, t, p in checks]
    return Output("validate", checks, doc, EXIT_OK if ok else EXIT_VALIDATION, notes)


RUNNERS = {
    "spectrum": run_spectrum, "polaritons": run_polaritons, "efficiency": run_efficiency,
    "bandwidth": run_bandwidth, "nonlinear": run_nonlinear, "validate": run_validate,
}


def run_subcommand(name: str, cfg: RunConfig) -> Output:
    if name not in RUNNERS:
        raise ConfigError(f"unknown subcommand {name!r}")
    return RUNNERS[name](cfg)


# ---- process plumbing -----------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cpaswitch", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", help="run configuration file (defaults if omitted)")
    parser.add_argument("--out", help="output file (default: output.path or stdout)")
    parser.add_argument("--format", choices=("csv", "json"), help="override output.format")
    return parser


def _color(text: str, code: str, stream) -> str:
    if os.environ.get("NO_COLOR") is not None or not getattr(stream, "isatty", lambda: False)():
        return text
    return f"\033[{code}m{text}\033[0m"


def _report(lines, stream=None):
    stream = stream or sys.stderr
    for line in lines:
        if line.startswith("PASS"):
            line = _color(line, "32", stream)
        elif line.startswith("FAIL"):
            line = _color(line, "31", stream)
        print(line, file=stream)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else parse_config("")
    except OSError as exc:
        print(f"cpaswitch: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"cpaswitch: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        result = run_subcommand(args.subcommand, cfg)
    except (ConfigError, InvalidInputError) as exc:
        print(f"cpaswitch: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"cpaswitch: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except CpaSwitchError as exc:  # pragma: no cover - every subclass is handled above
        print(f"cpaswitch: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    fmt = args.format or cfg.output.format
    text = render_csv(result.name, result.rows) if fmt == "csv" else render_json(result.doc)
    path = args.out or cfg.output.path
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    _report(result.notes)
    return result.code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""Run configuration: a flat ``section.key = value`` text format.

Lines starting with ``#`` (and anything after a ``#``) are comments.  Every
key is optional; omitted keys take the defaults of the three-polariton
switch (delta_c = -5, delta12 = 10, g_coll = 5, kappa = 1 in units of Gamma).
Values are written back with ``repr`` so parse -> serialize -> parse is exact.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any, Callable

from .errors import ConfigError, InvalidInputError
from .nonlinear import DEFAULT_A_COUNT, DEFAULT_A_MAX, DEFAULT_NL_THRESHOLD
from .oracle import IntegrationConfig
from .params import ControlField, Dressing, SystemParams
from .polaritons import DEFAULT_CPA_THRESHOLD
from .spectra import DEFAULT_GRID, ScanAxis

CHANNEL_DELTA_MODES = ("tuned", "polariton")
OUTPUT_FORMATS = ("csv", "json")


def _positive(name, value, allow_zero=False):
    if value is None:
        return
    if not (value >= 0 if allow_zero else value > 0):
        raise ConfigError(f"must be {'>= 0' if allow_zero else '> 0'}, got {value!r}", field=name)


@dataclass(frozen=True)
class ControlSpec:
    omega: complex = 0.0
    delta: float = 0.0
    dressing: Dressing = Dressing.AS_PRINTED
    # Rabi frequency and control detuning per channel (Left, Central, Right)
    channel_omega: tuple[float, float, float] = (0.5, 0.5, 1.0)
    channel_delta: str | tuple[float, float, float] = "tuned"

    def __post_init__(self):
        if len(self.channel_omega) != 3:
            raise ConfigError("needs three comma-separated values", field="control.channel_omega")
        for v in self.channel_omega:
            _positive("control.channel_omega", v, allow_zero=True)
        cd = self.channel_delta
        if isinstance(cd, str):
            if cd not in CHANNEL_DELTA_MODES:
                raise ConfigError(f"expected {' or '.join(CHANNEL_DELTA_MODES)} or three values",
                                  field="control.channel_delta")
        elif len(cd) != 3:
            raise ConfigError("needs three comma-separated values", field="control.channel_delta")

    def field(self) -> ControlField:
        return ControlField(omega=self.omega, delta=self.delta, dressing=self.dressing)


@dataclass(frozen=True)
class SweepSpec:
    min: float = DEFAULT_GRID[0]
    max: float = DEFAULT_GRID[1]
    count: int = DEFAULT_GRID[2]
    threshold: float = DEFAULT_CPA_THRESHOLD
    scan_axis: ScanAxis = ScanAxis.OMEGA
    scan_min: float = 1e-3
    scan_max: float = 0.5
    scan_count: int = 40
    scan_spacing: str = "log"

    def __post_init__(self):
        if not self.min < self.max:
            raise ConfigError("sweep.min must be < sweep.max", field="sweep.max")
        if self.count < 2:
            raise ConfigError("must be >= 2", field="sweep.count")
        _positive("sweep.threshold", self.threshold)
        _positive("sweep.scan_min", self.scan_min, allow_zero=self.scan_spacing == "linear")
        if not self.scan_min <= self.scan_max:
            raise ConfigError("sweep.scan_min must be <= sweep.scan_max", field="sweep.scan_max")
        if self.scan_count < 1:
            raise ConfigError("must be >= 1", field="sweep.scan_count")
        if self.scan_spacing not in ("log", "linear"):
            raise ConfigError("expected log or linear", field="sweep.scan_spacing")


@dataclass(frozen=True)
class NonlinearSpec:
    delta_p: float | None = None  # None: sit on the cavity detuning
    a_max: float = DEFAULT_A_MAX
    count: int = DEFAULT_A_COUNT
    threshold: float = DEFAULT_NL_THRESHOLD

    def __post_init__(self):
        _positive("nonlinear.a_max", self.a_max)
        _positive("nonlinear.count", self.count)
        _positive("nonlinear.threshold", self.threshold)


@dataclass(frozen=True)
class OracleSpec:
    dt_initial: float = 1e-2
    t_max: float = 200.0
    convergence_tol: float = 1e-10
    grid_count: int = 101
    drive_scale: float = 1e-4
    tolerance: float = 1e-3
    invariant_draws: int = 1000
    seed: int = 20240101

    def __post_init__(self):
        for name in ("dt_initial", "t_max", "convergence_tol", "drive_scale", "tolerance"):
            _positive(f"oracle.{name}", getattr(self, name))
        if self.grid_count < 2:
            raise ConfigError("must be >= 2", field="oracle.grid_count")
        _positive("oracle.invariant_draws", self.invariant_draws, allow_zero=True)

    def integration(self) -> IntegrationConfig:
        return IntegrationConfig(dt_initial=self.dt_initial, t_max=self.t_max,
                                 convergence_tol=self.convergence_tol)


@dataclass(frozen=True)
class OutputSpec:
    format: str = "csv"
    path: str | None = None

    def __post_init__(self):
        if self.format not in OUTPUT_FORMATS:
            raise ConfigError("expected csv or json", field="output.format")


@dataclass(frozen=True)
class RunConfig:
    system: SystemParams = field(default_factory=SystemParams)
    control: ControlSpec = field(default_factory=ControlSpec)
    sweep: SweepSpec = field(default_factory=SweepSpec)
    nonlinear: NonlinearSpec = field(default_factory=NonlinearSpec)
    oracle: OracleSpec = field(default_factory=OracleSpec)
    output: OutputSpec = field(default_factory=OutputSpec)


# ---- value codecs -------------------------------------------------------

def _parse_float(text: str) -> float:
    return float(text)


def _parse_int(text: str) -> int:
    value = float(text)
    if value != int(value):
        raise ValueError(f"expected an integer, got {text!r}")
    return int(value)


def _parse_optional(parser):
    def inner(text: str):
        return None if text.lower() in ("none", "") else parser(text)
    return inner


def _parse_complex(text: str) -> complex | float:
    value = complex(text.replace(" ", ""))
    return value.real if value.imag == 0 else value


def _parse_triple(text: str) -> tuple[float, float, float]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise ValueError("expected three comma-separated values")
    return tuple(float(p) for p in parts)


def _parse_channel_delta(text: str):
    key = text.strip().lower()
    return key if key in CHANNEL_DELTA_MODES else _parse_triple(text)


def _parse_str(text: str) -> str:
    return text


def _fmt(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, (Dressing, ScanAxis)):
        return value.value
    if isinstance(value, tuple):
        return ",".join(repr(float(v)) for v in value)
    if isinstance(value, complex):
        return repr(value).strip("()")
    if isinstance(value, float):
        return repr(value)
    return str(value)


_SYSTEM_KEYS: dict[str, Callable[[str], Any]] = {
    "kappa": _parse_float, "delta12": _parse_float, "delta_c": _parse_float,
    "g_coll": _parse_float, "g_single": _parse_float, "n_atoms": _parse_optional(_parse_int),
    "gamma13": _parse_float, "gamma23": _parse_float, "gamma4": _parse_float,
    "mirror_t": _parse_optional(_parse_float), "tau_rt": _parse_optional(_parse_float),
    "gamma_mhz": _parse_float,
}

SCHEMA: dict[str, tuple[type, dict[str, Callable[[str], Any]]]] = {
    "system": (SystemParams, _SYSTEM_KEYS),
    "control": (ControlSpec, {
        "omega": _parse_complex, "delta": _parse_float, "dressing": Dressing.parse,
        "channel_omega": _parse_triple, "channel_delta": _parse_channel_delta,
    }),
    "sweep": (SweepSpec, {
        "min": _parse_float, "max": _parse_float, "count": _parse_int,
        "threshold": _parse_float, "scan_axis": ScanAxis.parse, "scan_min": _parse_float,
        "scan_max": _parse_float, "scan_count": _parse_int, "scan_spacing": _parse_str,
    }),
    "nonlinear": (NonlinearSpec, {
        "delta_p": _parse_optional(_parse_float), "a_max": _parse_float,
        "count": _parse_int, "threshold": _parse_float,
    }),
    "oracle": (OracleSpec, {
        "dt_initial": _parse_float, "t_max": _parse_float, "convergence_tol": _parse_float,
        "grid_count": _parse_int, "drive_scale": _parse_float, "tolerance": _parse_float,
        "invariant_draws": _parse_int, "seed": _parse_int,
    }),
    "output": (OutputSpec, {"format": lambda s: s.lower(), "path": _parse_optional(_parse_str)}),
}

_LINE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\.([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*?)\s*$")


def _blame(section: str, message: str) -> str | None:
    """Best guess at which key a constructor's error message is about."""
    keys = sorted(SCHEMA[section][1], key=len, reverse=True)
    for key in keys:
        if re.search(rf"\b{key}\b", message):
            return f"{section}.{key}"
    return section


def parse_config(text: str) -> RunConfig:
    values: dict[str, dict[str, Any]] = {s: {} for s in SCHEMA}
    lines: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if not m:
            raise ConfigError("expected 'section.key = value'", line=lineno)
        section, key, value = m.groups()
        name = f"{section}.{key}"
        if section not in SCHEMA:
            raise ConfigError(f"unknown section {section!r}", line=lineno, field=name)
        parsers = SCHEMA[section][1]
        if key not in parsers:
            raise ConfigError("unknown key", line=lineno, field=name)
        if name in lines:
            raise ConfigError(f"duplicate key (first set on line {lines[name]})",
                              line=lineno, field=name)
        try:
            values[section][key] = parsers[key](value)
        except (ValueError, InvalidInputError) as exc:
            raise ConfigError(f"cannot parse {value!r}: {exc}", line=lineno, field=name) from None
        lines[name] = lineno

    built = {}
    for section, (cls, _) in SCHEMA.items():
        try:
            built[section] = cls(**values[section])
        except ConfigError as exc:
            line = lines.get(exc.field) if exc.field else None
            raise ConfigError(exc.message, line=line, field=exc.field) from None
        except InvalidInputError as exc:
            name = _blame(section, str(exc))
            raise ConfigError(str(exc), line=lines.get(name), field=name) from None
    return RunConfig(**built)


def config_to_dict(cfg: RunConfig) -> dict[str, dict[str, Any]]:
    out = {}
    for section, (_, parsers) in SCHEMA.items():
        obj = getattr(cfg, section)
        out[section] = {key: getattr(obj, key) for key in parsers}
    return out


def serialize_config(cfg: RunConfig) -> str:
    lines = []
    for section, entries in config_to_dict(cfg).items():
        for key, value in entries.items():
            lines.append(f"{section}.{key} = {_fmt(value)}")
    return "\n".join(lines) + "\n"


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())

"""Spectral sweeps and switching metrics built on the closed-form model."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .errors import (BandwidthUndefinedError, InvalidInputError, NoPeakError,
                     UndefinedEfficiencyError)
from .model import bare_responses, normalized_spectrum_point
from .params import ControlField, Dressing, SystemParams
from .polaritons import LABELS, polariton_frequencies, refine_minimum

DEFAULT_GRID = (-20.0, 10.0, 3001)
#: Half-width of the window (units of Gamma) searched for a switching peak.
PEAK_WINDOW = 2.0
#: On-state (or off-state) intensities below this make an efficiency undefined.
EFFICIENCY_FLOOR = 1e-12
BISECT_XTOL = 1e-6


@dataclass(frozen=True, eq=False)
class SpectrumSeries:
    grid: np.ndarray
    i_t: np.ndarray
    i_cav: np.ndarray
    params_snapshot: tuple[SystemParams, ControlField] | None = None

    def __len__(self):
        return len(self.grid)

    def curve(self, which: str = "i_t") -> Callable[[float], float]:
        """Continuous version of one column: the model itself if known, else a spline."""
        if which not in ("i_t", "i_cav"):
            raise InvalidInputError(f"unknown spectrum column {which!r}")
        if self.params_snapshot is not None:
            params, control = self.params_snapshot
            col = 0 if which == "i_t" else 1

            def f(x):
                return float(normalized_spectrum_point(params, control, x)[col])
            return f
        spline = CubicSpline(self.grid, getattr(self, which))
        return lambda x: float(spline(x))


@dataclass(frozen=True)
class BandwidthResult:
    i_max: float
    i_min: float
    half_level: float
    peak_delta_p: float
    two_delta_gamma: float
    two_delta_mhz: float
    switch_time_us: float


class ScanAxis(str, Enum):
    OMEGA = "omega"
    G_COLL = "g_coll"

    @classmethod
    def parse(cls, text) -> "ScanAxis":
        if isinstance(text, cls):
            return text
        key = str(text).strip().lower().replace("-", "_")
        aliases = {"gcoll": "g_coll", "g": "g_coll", "g_sqrt_n": "g_coll"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise InvalidInputError(f"unknown scan axis {text!r}") from None


@dataclass(frozen=True, eq=False)
class EfficiencyScan:
    axis_name: ScanAxis
    axis: np.ndarray
    eta_t: np.ndarray  # shape (len(axis), 3)
    eta_i: np.ndarray
    control_delta: np.ndarray  # control detuning used per point and channel
    channels: tuple[str, ...] = LABELS


def uniform_grid(lo: float, hi: float, count: int) -> np.ndarray:
    if int(count) != count or count < 2:
        raise InvalidInputError("grid count must be an integer >= 2")
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise InvalidInputError("grid needs finite min < max")
    return np.linspace(lo, hi, int(count))


def sweep_spectrum(params: SystemParams, control: ControlField, lo: float = DEFAULT_GRID[0],
                   hi: float = DEFAULT_GRID[1], count: int = DEFAULT_GRID[2]) -> SpectrumSeries:
    grid = uniform_grid(lo, hi, count)
    i_t, i_cav = normalized_spectrum_point(params, control, grid)
    return SpectrumSeries(grid=grid, i_t=i_t, i_cav=i_cav, params_snapshot=(params, control))


def _on_off(params, control, delta_p):
    if not control.is_on:
        raise InvalidInputError("on state requires omega != 0")
    on = normalized_spectrum_point(params, control, delta_p)
    off = normalized_spectrum_point(params, control.off(), delta_p)
    return on, off


def efficiency_from_intensities(on: float, off: float, *, output: bool) -> float:
    """eta_T = (on - off)/on for the output, eta_I = (off - on)/off intracavity."""
    ref = on if output else off
    if ref < EFFICIENCY_FLOOR:
        raise UndefinedEfficiencyError(
            f"reference intensity {ref:.3e} below {EFFICIENCY_FLOOR:g}")
    return float((on - off) / on) if output else float((off - on) / off)


def switching_efficiency_output(params, control, delta_p) -> float:
    (t_on, _), (t_off, _) = _on_off(params, control, delta_p)
    return efficiency_from_intensities(float(t_on), float(t_off), output=True)


def switching_efficiency_intracavity(params, control, delta_p) -> float:
    (_, c_on), (_, c_off) = _on_off(params, control, delta_p)
    return efficiency_from_intensities(float(c_on), float(c_off), output=False)


def _invert_circle(center: complex, radius: float) -> tuple[complex, float]:
    """Image of the circle |q - center| = radius under q -> 1/q (origin outside)."""
    k = abs(center) ** 2 - radius ** 2
    if k <= 0:
        raise InvalidInputError("dressing circle encloses the origin")
    return np.conj(center) / k, radius / k


def tune_control_to_channel(params: SystemParams, omega: complex, channel_delta_p: float,
                            dressing: Dressing = Dressing.AS_PRINTED) -> float:
    """Control detuning that puts the dressed resonance on ``channel_delta_p``.

    Chooses Delta to maximise |D| at the channel (the on-state intracavity
    minimum).  As Delta runs over the reals the dressed branch response
    1/(1/d + |Omega|^2/X) traces a circle, so the optimum is closed form.
    """
    p = float(channel_delta_p)
    w2 = float(abs(omega)) ** 2
    if w2 == 0:
        return p
    d1, d2 = bare_responses(params, p)
    if dressing is Dressing.AS_PRINTED:
        d, other, s = d2, d1, 1.0
    else:
        d, other, s = d1, d2, -1.0
    base = params.kappa + 1j * (params.delta_c - p) + params.g2n * other
    inv_d = 1 / d
    if params.gamma4 > 0:
        r = w2 / params.gamma4
        center, radius = _invert_circle(inv_d + r, r)
    else:
        # q = 1/d + z with z on the imaginary axis: the line Re q = Re(1/d)
        rho = inv_d.real
        if rho <= 0:
            raise InvalidInputError("dressed branch needs a nonzero decay rate")
        center, radius = 1 / (2 * rho), 1 / (2 * rho)
    shifted = base + params.g2n * center
    direction = shifted / abs(shifted) if abs(shifted) > 0 else 1.0
    w_star = center + radius * direction
    if abs(w_star) < 1e-300:
        return p  # infinite |Omega|^2/X: exact two-photon resonance
    z_star = 1 / w_star - inv_d
    if abs(z_star) < 1e-300:
        return p
    x_star = w2 / z_star
    return p - x_star.imag / s


def efficiency_scan(params: SystemParams, control_template: ControlField, axis,
                    values: Sequence[float], channel_omegas: Sequence[float] | None = None,
                    channel_deltas: Sequence[float] | None = None) -> EfficiencyScan:
    """eta_T and eta_I per channel while scanning Omega or g sqrt(N).

    Each channel is read at its polariton frequency with the control tuned
    onto it (``tune_control_to_channel``) unless ``channel_deltas`` pins the
    detunings.  For a g sqrt(N) scan the Rabi frequency per channel comes
    from ``channel_omegas`` (default: the template's omega).  Omega = 0
    yields efficiency 0 by continuity.
    """
    axis = ScanAxis.parse(axis)
    vals = np.asarray(values, dtype=float).ravel()
    if vals.size == 0:
        raise InvalidInputError("scan needs at least one value")
    if np.any(~np.isfinite(vals)) or np.any(vals < 0):
        raise InvalidInputError("scan values must be finite and >= 0")
    if channel_omegas is None:
        channel_omegas = [control_template.omega] * 3
    if len(channel_omegas) != 3 or (channel_deltas is not None and len(channel_deltas) != 3):
        raise InvalidInputError("per-channel settings need exactly three entries")

    eta_t = np.zeros((vals.size, 3))
    eta_i = np.zeros((vals.size, 3))
    deltas = np.zeros((vals.size, 3))
    for i, v in enumerate(vals):
        p_here = params.evolve(g_coll=float(v)) if axis is ScanAxis.G_COLL else params
        freqs = polariton_frequencies(p_here).freqs
        for ch in range(3):
            omega = float(v) if axis is ScanAxis.OMEGA else channel_omegas[ch]
            if channel_deltas is not None:
                delta = float(channel_deltas[ch])
            else:
                delta = tune_control_to_channel(p_here, omega, freqs[ch], control_template.dressing)
            deltas[i, ch] = delta
            if omega == 0:
                continue
            ctrl = control_template.evolve(omega=omega, delta=delta)
            (t_on, c_on), (t_off, c_off) = _on_off(p_here, ctrl, freqs[ch])
            eta_t[i, ch] = efficiency_from_intensities(float(t_on), float(t_off), output=True)
            eta_i[i, ch] = efficiency_from_intensities(float(c_on), float(c_off), output=False)
    return EfficiencyScan(axis_name=axis, axis=vals, eta_t=eta_t, eta_i=eta_i,
                          control_delta=deltas)


def _local_maxima(v: np.ndarray, idx: np.ndarray) -> list[int]:
    return [i for i in idx if 0 < i < len(v) - 1 and v[i] > v[i - 1] and v[i] >= v[i + 1]]


def _crossing(f, grid, start, step, level):
    """Walk from ``start`` by ``step`` until f drops below level, then bisect."""
    i = start
    while 0 <= i + step < len(grid):
        j = i + step
        if f(grid[j]) < level:
            a, b = sorted((grid[i], grid[j]))
            return brentq(lambda x: f(x) - level, a, b, xtol=BISECT_XTOL)
        i = j
    return None


def bandwidth_and_switch_time(on: SpectrumSeries, off: SpectrumSeries, channel_delta_p: float,
                              gamma_mhz: float | None = None,
                              window: float = PEAK_WINDOW) -> BandwidthResult:
    """Full width of the switching peak at the level halfway between on and off.

    ``i_max`` is the on-state peak nearest the channel, ``i_min`` the off-state
    value at the same detuning.  Widths come out in Gamma and MHz and the
    switching time is 1/(4 pi delta) with delta the half width in MHz.
    """
    grid = np.asarray(on.grid, dtype=float)
    if grid.shape != np.shape(off.grid) or not np.allclose(grid, off.grid, rtol=0, atol=0):
        raise InvalidInputError("on and off spectra must share a grid")
    if grid.size < 3:
        raise InvalidInputError("bandwidth needs at least three grid points")
    if gamma_mhz is None:
        gamma_mhz = on.params_snapshot[0].gamma_mhz if on.params_snapshot else 6.07

    v_on = np.asarray(on.i_t, dtype=float)
    near = np.flatnonzero(np.abs(grid - channel_delta_p) <= window)
    peaks = _local_maxima(v_on, near)
    if not peaks:
        raise NoPeakError(f"no on-state peak within {window} of {channel_delta_p}")
    k = max(peaks, key=lambda i: v_on[i])

    f_on = on.curve("i_t")
    f_off = off.curve("i_t")
    x_peak = refine_minimum(lambda x: -f_on(x), grid[k - 1], grid[k], grid[k + 1])
    i_max = f_on(x_peak)
    i_min = f_off(x_peak)
    if not i_max > i_min:
        raise BandwidthUndefinedError("on-state peak does not exceed the off state")
    half = 0.5 * (i_max + i_min)

    left = _crossing(f_on, grid, k, -1, half)
    right = _crossing(f_on, grid, k, +1, half)
    if left is None or right is None:
        raise BandwidthUndefinedError("half level not crossed on both sides of the peak")
    two_delta = right - left
    two_delta_mhz = two_delta * gamma_mhz
    switch_time = 1.0 / (4 * math.pi * (two_delta_mhz / 2))
    return BandwidthResult(i_max=i_max, i_min=i_min, half_level=half, peak_delta_p=x_peak,
                           two_delta_gamma=two_delta, two_delta_mhz=two_delta_mhz,
                           switch_time_us=switch_time)

"""Polariton eigenfrequencies and coherent-perfect-absorption bookkeeping."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import minimize_scalar

from .errors import InvalidInputError
from .model import normalized_spectrum_point
from .params import SystemParams

LABELS = ("Left", "Central", "Right")
DEFAULT_CPA_THRESHOLD = 1e-3


@dataclass(frozen=True)
class PolaritonSet:
    freqs: tuple[float, float, float]
    labels: tuple[str, str, str] = LABELS

    def __iter__(self):
        return iter(zip(self.labels, self.freqs))

    def __getitem__(self, item):
        if isinstance(item, str):
            return self.freqs[self.labels.index(item)]
        return self.freqs[item]


@dataclass(frozen=True)
class CpaReport:
    residual: float
    cpa_points: list[tuple[float, float]] = field(default_factory=list)


def coupling_matrix(params: SystemParams) -> np.ndarray:
    """Lossless three-mode matrix: cavity at delta_c coupled to the two spin waves.

    The spin waves sit at the poles of d1 (-delta12) and d2 (0).
    """
    g = params.g_coll
    return np.array([
        [params.delta_c, g, g],
        [g, -params.delta12, 0.0],
        [g, 0.0, 0.0],
    ])


def characteristic_polynomial(params: SystemParams, x):
    """det(M - x) in expanded form, used to check returned eigenvalues."""
    x = np.asarray(x, dtype=float)
    dc, d12, g2 = params.delta_c, params.delta12, params.g2n
    return (dc - x) * (-d12 - x) * (-x) - g2 * (-x) - g2 * (-d12 - x)


def polariton_frequencies(params: SystemParams) -> PolaritonSet:
    w = np.linalg.eigvalsh(coupling_matrix(params))
    return PolaritonSet(freqs=tuple(float(v) for v in np.sort(w)))


def cpa_criterion_residual(params: SystemParams) -> float:
    """g sqrt(N) + delta_c; zero when the CPA criterion holds."""
    return params.g_coll + params.delta_c


def _local_minima(values: np.ndarray) -> list[int]:
    v = values
    return [i for i in range(1, len(v) - 1) if v[i] < v[i - 1] and v[i] <= v[i + 1]]


def refine_minimum(func, lo: float, mid: float, hi: float, xtol: float = 1e-6) -> float:
    """Golden-section refinement inside a grid bracket ``f(mid) <= f(lo), f(hi)``."""
    try:
        res = minimize_scalar(func, bracket=(lo, mid, hi), method="golden",
                              options={"xtol": xtol / max(abs(mid), 1.0)})
        x = float(res.x)
    except ValueError:  # rounding noise broke the bracket on a flat stretch
        x = math.nan
    if not lo <= x <= hi:
        # golden may wander out of a degenerate bracket; fall back to a bounded search
        res = minimize_scalar(func, bounds=(lo, hi), method="bounded",
                              options={"xatol": xtol})
        x = float(res.x)
    return x


def locate_cpa_points(spectrum, threshold: float = DEFAULT_CPA_THRESHOLD) -> CpaReport:
    """All local minima of I_T/I_in below ``threshold``, refined in delta_p.

    Refinement uses the continuous model when the series carries a params
    snapshot, otherwise a cubic spline through the samples.
    """
    grid = np.asarray(spectrum.grid, dtype=float)
    i_t = np.asarray(spectrum.i_t, dtype=float)
    if grid.size == 0:
        raise InvalidInputError("empty spectrum")
    if grid.size > 1 and np.any(np.diff(grid) <= 0):
        raise InvalidInputError("spectrum grid must be strictly increasing")

    snapshot = getattr(spectrum, "params_snapshot", None)
    if snapshot is not None:
        params, control = snapshot

        def func(x):
            return float(normalized_spectrum_point(params, control, x)[0])
        residual = cpa_criterion_residual(params)
    else:
        func = CubicSpline(grid, i_t) if grid.size >= 4 else None
        residual = float("nan")

    points = []
    for i in _local_minima(i_t):
        x, val = grid[i], i_t[i]
        if func is not None:
            x = refine_minimum(func, grid[i - 1], grid[i], grid[i + 1])
            val = float(func(x))
        if val < threshold:
            points.append((float(x), float(val)))
    return CpaReport(residual=residual, cpa_points=points)

"""Saturable (nonlinear) steady state of the driven cavity.

The atoms are described by four amplitudes c1..c4 (|3> is the ground
state).  For a given intracavity amplitude ``a`` the steady-state excited
amplitudes are linear in c3, so the whole branch can be traced
parametrically in |a|: compute the atoms, then the drive that sustains
that field.  No root finding in the input intensity is needed, which makes
multivalued (bistable) input-output curves come out for free.

The control is always taken to dress the |3>-|1> branch here, i.e. these
equations reduce to the ``Dressing.TRANSITION1`` susceptibility at weak
drive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import InvalidInputError
from .model import branch_responses
from .params import ControlField, Dressing, SystemParams

DEFAULT_A_MAX = 1e4
DEFAULT_A_COUNT = 2000
DEFAULT_NL_THRESHOLD = 1e-3


@dataclass(frozen=True, eq=False)
class AtomicAmplitudes:
    c1: complex
    c2: complex
    c3: float
    c4: complex
    degenerate: bool = False

    @property
    def populations(self):
        return tuple(np.abs(c) ** 2 for c in (self.c1, self.c2, self.c3, self.c4))

    @property
    def norm(self):
        return sum(self.populations)

    @property
    def sigma13(self):
        return self.c1 * self.c3

    @property
    def sigma23(self):
        return self.c2 * self.c3


@dataclass(frozen=True, eq=False)
class BranchPoint:
    a_mag: float
    i_in: float
    i_t: float
    slope_sign: int
    amplitudes: AtomicAmplitudes


class Branch(list):
    """List of BranchPoint that remembers the configuration it was traced for."""

    def __init__(self, points=(), params=None, control=None, delta_p=None):
        super().__init__(points)
        self.params = params
        self.control = control
        self.delta_p = delta_p

    @property
    def has_model(self) -> bool:
        return self.params is not None

    def arrays(self):
        a = np.array([p.a_mag for p in self])
        i_in = np.array([p.i_in for p in self])
        i_t = np.array([p.i_t for p in self])
        return a, i_in, i_t


@dataclass(frozen=True)
class CpaThreshold:
    a_mag: float
    i_in: float
    ratio: float  # I_T / I_in at the refined minimum
    stored_ratio: float  # kappa tau |a|^2 / I_in, equals 1 at perfect absorption


def atomic_steady_state(params: SystemParams, control: ControlField, a, delta_p) -> AtomicAmplitudes:
    """Normalised steady-state amplitudes for intracavity field ``a`` (scalar or array)."""
    a = np.asarray(a, dtype=complex)
    dp = float(delta_p)
    g = params.g_single
    omega = complex(control.omega)
    t1 = control.evolve(dressing=Dressing.TRANSITION1)
    _, d2, r1, _, _ = branch_responses(params, t1, dp)

    half_y = params.gamma4 / 2 - 1j * (dp - control.delta)
    degenerate = False
    u2 = 1j * g * a * d2
    if omega == 0:
        u1 = 1j * g * a * r1
        u4 = np.zeros_like(a)
        degenerate = half_y == 0
    elif half_y == 0:
        # dark resonance: |1> is emptied, the drive is balanced by |4>
        u1 = np.zeros_like(a)
        u4 = -g * a / omega
    else:
        u1 = 1j * g * a * r1
        u4 = 1j * np.conj(omega) * u1 / half_y

    c3 = 1 / np.sqrt(1 + np.abs(u1) ** 2 + np.abs(u2) ** 2 + np.abs(u4) ** 2)
    if c3.ndim == 0:
        return AtomicAmplitudes(complex(u1 * c3), complex(u2 * c3), float(c3),
                                complex(u4 * c3), degenerate)
    return AtomicAmplitudes(u1 * c3, u2 * c3, c3, u4 * c3, degenerate)


def required_input(params: SystemParams, control: ControlField, delta_p, a,
                   amplitudes: AtomicAmplitudes | None = None):
    """Symmetric input amplitude a_in that holds the cavity at field ``a``."""
    a = np.asarray(a, dtype=complex)
    if amplitudes is None:
        amplitudes = atomic_steady_state(params, control, a, delta_p)
    n = params.n_atoms
    g = params.g_single
    polarisation = amplitudes.sigma13 + amplitudes.sigma23
    lin = params.kappa + 1j * (params.delta_c - float(delta_p))
    a_in = (lin * a - 1j * g * n * polarisation) / (2 * np.sqrt(params.kappa / params.tau_rt))
    return complex(a_in) if np.ndim(a_in) == 0 else a_in


def default_a_grid(a_max: float = DEFAULT_A_MAX, count: int = DEFAULT_A_COUNT) -> np.ndarray:
    """0 followed by ``count`` log-spaced magnitudes spanning six decades up to a_max."""
    if not a_max > 0 or count < 1:
        raise InvalidInputError("a_max must be > 0 and count >= 1")
    return np.concatenate([[0.0], np.geomspace(a_max * 1e-6, a_max, int(count))])


def _branch_values(params, control, delta_p, a_mag):
    amps = atomic_steady_state(params, control, a_mag, delta_p)
    a_in = required_input(params, control, delta_p, a_mag, amps)
    a_out = np.sqrt(params.kappa_tau) * np.asarray(a_mag) - a_in
    return amps, np.abs(a_in) ** 2, np.abs(a_out) ** 2


def trace_input_output(params: SystemParams, control: ControlField, delta_p: float,
                       a_grid=None) -> Branch:
    """Input-output curve traced parametrically in the real, positive field |a|."""
    a_grid = default_a_grid() if a_grid is None else np.asarray(a_grid, dtype=float)
    if a_grid.ndim != 1 or a_grid.size == 0:
        raise InvalidInputError("a_grid must be a nonempty 1-d sequence")
    if not np.all(np.isfinite(a_grid)) or a_grid[0] < 0:
        raise InvalidInputError("a_grid must be finite and start at a value >= 0")
    if np.any(np.diff(a_grid) <= 0):
        raise InvalidInputError("a_grid must be strictly increasing")

    amps, i_in, i_t = _branch_values(params, control, delta_p, a_grid)
    if a_grid.size >= 2:
        slope = np.sign(np.gradient(i_in, a_grid)).astype(int)
    else:
        slope = np.zeros(1, dtype=int)

    points = []
    for k, a in enumerate(a_grid):
        snap = AtomicAmplitudes(complex(amps.c1[k]), complex(amps.c2[k]), float(amps.c3[k]),
                                complex(amps.c4[k]), amps.degenerate)
        points.append(BranchPoint(float(a), float(i_in[k]), float(i_t[k]), int(slope[k]), snap))
    return Branch(points, params=params, control=control, delta_p=float(delta_p))


def _ratio(branch: Branch, a_mag: float) -> float:
    _, i_in, i_t = _branch_values(branch.params, branch.control, branch.delta_p, a_mag)
    return float(i_t / i_in)


def _interior_minima(values: np.ndarray, rel: float = 1e-9) -> list[tuple[int, int]]:
    """(first, last) index of every interior run that sits below both neighbours.

    Values equal to within ``rel`` count as one flat run, so rounding noise on
    a plateau does not produce spurious minima.
    """
    runs = []
    k = 0
    while k < len(values):
        j = k
        while j + 1 < len(values) and abs(values[j + 1] - values[k]) <= rel * abs(values[k]):
            j += 1
        runs.append((k, j))
        k = j + 1
    out = []
    for (k, j), prev, nxt in zip(runs[1:-1], runs[:-2], runs[2:]):
        if values[prev[0]] > values[k] and values[nxt[0]] > values[k]:
            out.append((k, j))
    return out


def cpa_threshold_points(branch, threshold: float = DEFAULT_NL_THRESHOLD) -> list[CpaThreshold]:
    """Interior local minima of I_T/I_in along the branch that fall below ``threshold``."""
    if len(branch) == 0:
        raise InvalidInputError("empty branch")
    a = np.array([p.a_mag for p in branch])
    i_in = np.array([p.i_in for p in branch])
    i_t = np.array([p.i_t for p in branch])
    keep = i_in > 0
    a, i_in, i_t = a[keep], i_in[keep], i_t[keep]
    ratio = i_t / i_in if a.size else np.array([])
    model = getattr(branch, "has_model", False)

    found = []
    for first, last in _interior_minima(ratio):
        k = (first + last) // 2
        x, r, iin = a[k], ratio[k], i_in[k]
        if model:
            lo, hi = a[first - 1], a[last + 1]
            res = minimize_scalar(lambda s: _ratio(branch, s), bounds=(lo, hi), method="bounded",
                                  options={"xatol": 1e-12 * hi})
            if res.fun <= r:
                x, r = float(res.x), float(res.fun)
                iin = float(_branch_values(branch.params, branch.control, branch.delta_p, x)[1])
        if r >= threshold:
            continue
        stored = branch.params.kappa_tau * x * x / iin if model else float("nan")
        found.append(CpaThreshold(a_mag=float(x), i_in=float(iin), ratio=float(r),
                                  stored_ratio=float(stored)))
    return found


def detect_cpa_thresholds(branch, threshold: float = DEFAULT_NL_THRESHOLD) -> list[float]:
    """Input intensities at which the output (nearly) vanishes."""
    return [c.i_in for c in cpa_threshold_points(branch, threshold)]


def _turning_points(branch) -> list[int]:
    signs = [(k, p.slope_sign) for k, p in enumerate(branch) if p.slope_sign != 0]
    return [k for (k, s), (_, s_prev) in zip(signs[1:], signs[:-1]) if s != s_prev]


def _refined_extremum(branch, k: int, maximum: bool) -> float:
    a = [p.a_mag for p in branch]
    lo, hi = a[max(k - 2, 0)], a[min(k + 1, len(a) - 1)]
    sign = -1.0 if maximum else 1.0

    def f(s):
        return sign * float(_branch_values(branch.params, branch.control, branch.delta_p, s)[1])
    res = minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12 * hi})
    return sign * float(res.fun)


def detect_multistability(branch) -> list[tuple[float, float]]:
    """I_in windows with more than one steady state.

    Every pair of consecutive slope reversals of I_in(|a|) bounds one window.
    """
    if len(branch) == 0:
        return []
    turns = _turning_points(branch)
    refine = getattr(branch, "has_model", False)
    windows = []
    for k1, k2 in zip(turns[0::2], turns[1::2]):
        vals = []
        for k in (k1, k2):
            rising_before = branch[k - 1].slope_sign > 0 if k > 0 else False
            approx = max(branch[k - 1].i_in, branch[k].i_in) if rising_before \
                else min(branch[k - 1].i_in, branch[k].i_in)
            vals.append(_refined_extremum(branch, k, rising_before) if refine else approx)
        windows.append((min(vals), max(vals)))
    return windows

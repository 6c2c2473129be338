"""Brute-force time integration of the cavity + amplitude equations.

Used only to validate the closed-form and parametric solvers.  Many
detunings are integrated at once (one batch, one shared step size) with an
embedded Dormand-Prince 5(4) pair.  After every accepted step the atomic
state is renormalised and rephased so that c3 is real and positive; the
norm that leaked through the decay terms during that step is recorded.
That projection is why the stepper is written out here instead of calling
``scipy.integrate.solve_ivp``, which offers no hook to edit the state
between steps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IntegrationFailure, InvalidInputError
from .model import normalized_spectrum_point
from .nonlinear import AtomicAmplitudes
from .params import DEFAULT_G_SINGLE, ControlField, Dressing, DriveInputs, SystemParams
from .spectra import uniform_grid

# Dormand-Prince 5(4) tableau
_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_B_LOW = np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200,
                   187 / 2100, 1 / 40])
_E = _B - _B_LOW


@dataclass(frozen=True)
class IntegrationConfig:
    dt_initial: float = 1e-2
    t_max: float = 200.0
    convergence_tol: float = 1e-10
    rtol: float = 1e-8
    atol: float = 1e-14
    min_step: float = 1e-12
    max_step_factor: float = 2.0
    method: str = "dopri5"

    def __post_init__(self):
        for name in ("dt_initial", "t_max", "convergence_tol", "rtol", "atol", "min_step",
                     "max_step_factor"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise InvalidInputError(f"{name} must be finite and > 0")
        if self.method != "dopri5":
            raise InvalidInputError("only the dopri5 (RK 5(4)) method is available")


@dataclass(frozen=True, eq=False)
class SteadyState:
    a: complex
    amplitudes: AtomicAmplitudes
    converged: bool
    t_elapsed: float
    leaked_norm: float  # largest per-step norm loss removed by the projection
    metric: float  # last relative-change metric

    def __iter__(self):
        return iter((self.a, self.amplitudes, self.converged, self.t_elapsed))


@dataclass(frozen=True, eq=False)
class CrosscheckReport:
    max_rel_error: float
    grid: np.ndarray
    oracle_i_t: np.ndarray
    model_i_t: dict
    converged: bool

    def __float__(self):
        return float(self.max_rel_error)


def _rhs_factory(params: SystemParams, control: ControlField, delta_p: np.ndarray, drive_sum):
    g = params.g_single
    n = params.n_atoms
    omega = complex(control.omega)
    lin_a = -(params.kappa + 1j * (params.delta_c - delta_p))
    r1 = 1j * (delta_p + params.delta12) - params.gamma13 / 2
    r2 = 1j * delta_p - params.gamma23 / 2
    r4 = 1j * (delta_p - control.delta) - params.gamma4 / 2
    pump = np.sqrt(params.kappa / params.tau_rt) * drive_sum

    def rhs(y):
        a, c1, c2, c3, c4 = y
        out = np.empty_like(y)
        out[0] = lin_a * a + 1j * g * n * (c1 + c2) * np.conj(c3) + pump
        out[1] = r1 * c1 + 1j * g * a * c3 + 1j * omega * c4
        out[2] = r2 * c2 + 1j * g * a * c3
        out[3] = 1j * g * np.conj(a) * (c1 + c2)
        out[4] = r4 * c4 + 1j * np.conj(omega) * c1
        return out
    return rhs


def _rate_bound(params: SystemParams, control: ControlField, delta_p: np.ndarray) -> float:
    """Row-sum bound on the spectral radius of the linearised equations.

    Without it the step controller drifts to the edge of the stability region
    once the increments become tiny and the state rattles at the rtol level.
    """
    dp = np.abs(delta_p).max()
    return float(params.kappa + abs(params.delta_c) + dp + 2 * params.g_coll
                 + params.gamma13 + dp + abs(params.delta12) + params.gamma23 + dp
                 + params.gamma4 + abs(control.delta) + 2 * abs(control.omega))


def _project(y):
    """Renormalise the atomic part and make c3 real >= 0; returns the leaked norm."""
    atoms = y[1:]
    norm2 = np.sum(np.abs(atoms) ** 2, axis=0)
    leaked = 1 - norm2
    phase = np.ones_like(atoms[2])
    nz = np.abs(atoms[2]) > 0
    phase[nz] = np.abs(atoms[2][nz]) / atoms[2][nz]
    y[1:] = atoms * phase / np.sqrt(norm2)
    y[3] = y[3].real
    return leaked


def _change_metric(y, y_prev):
    """Largest component-wise relative change per batch member."""
    diff = np.abs(y - y_prev)
    scale = np.maximum(np.abs(y), np.abs(y_prev))
    rel = np.zeros_like(diff)
    nz = scale > 0
    rel[nz] = diff[nz] / scale[nz]
    return rel.max(axis=0)


def integrate_batch(params: SystemParams, control: ControlField, a_in_r, a_in_l, delta_p,
                    config: IntegrationConfig | None = None):
    """Integrate every detuning in ``delta_p`` from vacuum until all have settled.

    Returns (y, converged, t, leaked, metric) with y of shape (5, n) holding
    a, c1, c2, c3, c4.
    """
    config = config or IntegrationConfig()
    dp = np.atleast_1d(np.asarray(delta_p, dtype=float))
    rhs = _rhs_factory(params, control, dp, complex(a_in_r) + complex(a_in_l))
    y = np.zeros((5, dp.size), dtype=complex)
    y[3] = 1.0

    interval = 1.0 / params.kappa
    t, dt = 0.0, config.dt_initial
    h_max = config.max_step_factor / _rate_bound(params, control, dp)
    next_check = interval
    y_check = y.copy()
    below_since = np.full(dp.size, np.nan)  # time at which metric first dropped below tol
    converged = np.zeros(dp.size, dtype=bool)
    metric = np.full(dp.size, np.inf)
    leaked_max = np.zeros(dp.size)
    k = np.empty((7,) + y.shape, dtype=complex)
    k[0] = rhs(y)

    while t < config.t_max and not converged.all():
        h = min(dt, h_max, next_check - t, config.t_max - t)
        for s in range(1, 7):
            ys = y + h * np.tensordot(_A[s], k[:s], axes=1)
            k[s] = rhs(ys)
        y_new = ys  # row 6 of the tableau equals the 5th-order weights
        err = h * np.tensordot(_E, k, axes=1)
        scale = config.atol + config.rtol * np.maximum(np.abs(y), np.abs(y_new))
        err_norm = float(np.max(np.abs(err) / scale))
        if err_norm > 1.0:
            dt = h * max(0.2, 0.9 * err_norm ** -0.2)
            if dt < config.min_step:
                raise IntegrationFailure(f"step size underflow at t={t:.6g}")
            continue

        t += h
        y = y_new
        leaked_max = np.maximum(leaked_max, _project(y))
        k[0] = rhs(y)
        dt = h * min(5.0, 0.9 * err_norm ** -0.2) if err_norm > 0 else 5.0 * h

        if t >= next_check - 1e-12 * interval:
            metric = _change_metric(y, y_check)
            y_check = y.copy()
            next_check += interval
            newly = (metric < config.convergence_tol) & np.isnan(below_since)
            below_since[newly] = t
            # after first dropping below tol the metric must stay under 10*tol
            # for one more interval (the verification tail)
            broke = ~np.isnan(below_since) & ~converged & (metric >= 10 * config.convergence_tol)
            below_since[broke] = np.nan
            converged |= ~np.isnan(below_since) & (t - below_since >= interval * (1 - 1e-12))

    return y, converged, t, leaked_max, metric


def integrate_to_steady_state(params: SystemParams, control: ControlField, drive: DriveInputs,
                              config: IntegrationConfig | None = None) -> SteadyState:
    """Time-integrate one configuration from a = 0, c3 = 1 to its steady state."""
    if np.ndim(drive.delta_p) != 0:
        raise InvalidInputError("integrate_to_steady_state takes a scalar delta_p")
    y, conv, t, leaked, metric = integrate_batch(params, control, drive.a_in_r, drive.a_in_l,
                                                 drive.delta_p, config)
    y = y[:, 0]
    amps = AtomicAmplitudes(complex(y[1]), complex(y[2]), float(y[3].real), complex(y[4]))
    return SteadyState(a=complex(y[0]), amplitudes=amps, converged=bool(conv[0]), t_elapsed=t,
                       leaked_norm=float(leaked[0]), metric=float(metric[0]))


def weak_drive_amplitude(params: SystemParams, drive_scale: float) -> float:
    """Symmetric input amplitude that keeps g|a| <= drive_scale at any detuning.

    Passivity gives |D| >= kappa, hence |a| <= 2 sqrt(kappa/tau) |a_in| / kappa.
    """
    g = params.g_single if params.g_single > 0 else DEFAULT_G_SINGLE
    return drive_scale * params.kappa / (2 * g * np.sqrt(params.kappa / params.tau_rt))


def crosscheck_linear(params: SystemParams, control: ControlField, lo: float, hi: float,
                      count: int, drive_scale: float = 1e-4,
                      config: IntegrationConfig | None = None) -> CrosscheckReport:
    """Largest relative deviation of the integrated I_T/I_in from the closed form.

    With Omega = 0 both dressing modes are compared (they coincide); with a
    control field only the |3>-|1> dressing, which the amplitude equations embody.
    """
    if not drive_scale > 0:
        raise InvalidInputError("drive_scale must be > 0")
    grid = uniform_grid(lo, hi, count)
    a_in = weak_drive_amplitude(params, drive_scale)
    y, conv, _, _, _ = integrate_batch(params, control, a_in, a_in, grid, config)
    a_out = np.sqrt(params.kappa_tau) * y[0] - a_in
    oracle = np.abs(a_out) ** 2 / a_in ** 2

    modes = list(Dressing) if not control.is_on else [Dressing.TRANSITION1]
    models = {}
    worst = 0.0
    for mode in modes:
        ref, _ = normalized_spectrum_point(params, control.evolve(dressing=mode), grid)
        models[mode.value] = ref
        rel = np.abs(oracle - ref) / np.maximum(ref, 1e-300)
        worst = max(worst, float(rel.max()))
    return CrosscheckReport(max_rel_error=worst, grid=grid, oracle_i_t=oracle,
                            model_i_t=models, converged=bool(conv.all()))

"""Randomised property checks of the linear model and the polariton matrix."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import normalized_spectrum_point, steady_state_fields, susceptibility
from .params import ControlField, Dressing, DriveInputs, SystemParams
from .polaritons import polariton_frequencies

# documented tolerances
IDENTITY_RTOL = 1e-12
SWAP_RTOL = 1e-14
MODE_RTOL = 1e-12
SMALL_OMEGA = 1e-7
SMALL_OMEGA_RTOL = 1e-6
PASSIVITY_SLACK = 1e-9
SCALE_RTOL = 1e-9


@dataclass
class CheckResult:
    name: str
    tolerance: float
    worst: float = 0.0
    failures: int = 0
    draws: int = 0

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def record(self, value: float):
        self.draws += 1
        self.worst = max(self.worst, float(value))
        if not value <= self.tolerance:
            self.failures += 1


@dataclass
class InvariantReport:
    seed: int
    draws: int
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def random_configuration(rng: np.random.Generator):
    """One random (params, control, drive) triple inside the physical domain."""
    params = SystemParams(
        kappa=rng.uniform(0.1, 5.0),
        delta12=rng.uniform(0.0, 20.0),
        delta_c=rng.uniform(-15.0, 15.0),
        g_coll=rng.uniform(0.0, 10.0),
        gamma13=rng.uniform(1.0, 3.0),
        gamma23=rng.uniform(1.0, 3.0),
        gamma4=0.0 if rng.random() < 0.5 else rng.uniform(0.0, 1.0),
        mirror_t=rng.uniform(0.001, 0.1),
    )
    omega = rng.uniform(0.0, 2.0) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    control = ControlField(omega=omega, delta=rng.uniform(-20.0, 10.0),
                           dressing=list(Dressing)[rng.integers(2)])
    a_r, a_l = rng.normal(size=2) + 1j * rng.normal(size=2)
    drive = DriveInputs(a_in_r=a_r, a_in_l=a_l, delta_p=rng.uniform(-25.0, 15.0))
    return params, control, drive


def _rel(x, y):
    scale = max(abs(x), abs(y))
    return abs(x - y) / scale if scale > 0 else 0.0


def run_invariant_suite(draws: int = 1000, seed: int = 20240101) -> InvariantReport:
    rng = np.random.default_rng(seed)
    identity = CheckResult("input-output identity", IDENTITY_RTOL)
    swap = CheckResult("input swap symmetry", SWAP_RTOL)
    modes = CheckResult("dressing modes agree at omega=0", MODE_RTOL)
    small = CheckResult("omega->0 continuity", SMALL_OMEGA_RTOL)
    passive = CheckResult("passivity I_T/I_in <= 1", PASSIVITY_SLACK)
    scale = CheckResult("eigenfrequency scale covariance", SCALE_RTOL)

    for _ in range(draws):
        params, control, drive = random_configuration(rng)
        dp = drive.delta_p

        sol = steady_state_fields(params, control, drive)
        root = np.sqrt(params.kappa_tau)
        identity.record(max(_rel(sol.a_out_r, root * sol.a - drive.a_in_r),
                            _rel(sol.a_out_l, root * sol.a - drive.a_in_l)))

        swapped = steady_state_fields(params, control, drive.swapped())
        swap.record(max(_rel(swapped.a_out_r, sol.a_out_l), _rel(swapped.a_out_l, sol.a_out_r)))

        off = control.off()
        chi_a = susceptibility(params, off.evolve(dressing=Dressing.AS_PRINTED), dp).chi
        chi_t = susceptibility(params, off.evolve(dressing=Dressing.TRANSITION1), dp).chi
        modes.record(_rel(chi_a, chi_t))

        tiny = control.evolve(omega=SMALL_OMEGA * np.exp(1j * np.angle(control.omega or 1)))
        worst_small = 0.0
        for mode in Dressing:
            chi_s = susceptibility(params, tiny.evolve(dressing=mode), dp).chi
            # continuity is only uniform away from a two-photon resonance
            if abs(dp - control.delta) > 1e-2 or params.gamma4 > 1e-2:
                worst_small = max(worst_small, _rel(chi_s, chi_a))
        small.record(worst_small)

        i_t, _ = normalized_spectrum_point(params, control, dp)
        passive.record(max(0.0, float(i_t) - 1.0))

        s = rng.uniform(0.1, 10.0)
        base = np.array(polariton_frequencies(params).freqs)
        scaled = np.array(polariton_frequencies(params.evolve(
            delta_c=params.delta_c * s, delta12=params.delta12 * s,
            g_coll=params.g_coll * s)).freqs)
        norm = max(np.abs(base).max() * s, 1e-300)
        scale.record(float(np.abs(scaled - s * base).max() / norm))

    return InvariantReport(seed=seed, draws=draws,
                           checks=[identity, swap, modes, small, passive, scale])

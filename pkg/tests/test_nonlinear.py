import math

import numpy as np
import pytest

from cpaswitch import ControlField, InvalidInputError, SystemParams, normalized_spectrum_point
from cpaswitch.model import bare_responses, cavity_denominator
from cpaswitch.nonlinear import (Branch, atomic_steady_state, cpa_threshold_points,
                                 default_a_grid, detect_cpa_thresholds, detect_multistability,
                                 required_input, trace_input_output)

from conftest import t1


def _residuals(p, c, amps, a, dp):
    g, om = p.g_single, complex(c.omega)
    c1, c2, c3, c4 = amps.c1, amps.c2, amps.c3, amps.c4
    r1 = c1 * (1j * (dp + p.delta12) - p.gamma13 / 2) + 1j * g * a * c3 + 1j * om * c4
    r2 = c2 * (1j * dp - p.gamma23 / 2) + 1j * g * a * c3
    r4 = c4 * (1j * (dp - c.delta) - p.gamma4 / 2) + 1j * np.conj(om) * c1
    return max(abs(r1), abs(r2), abs(r4))


def test_vacuum(base, off):
    amps = atomic_steady_state(base, off, 0.0, -5.0)
    assert (amps.c1, amps.c2, amps.c3, amps.c4) == (0, 0, 1.0, 0)
    assert required_input(base, off, -5.0, 0.0) == 0


def test_weak_drive_linearises(base, off):
    a = 1e-6 / base.g_single
    amps = atomic_steady_state(base, off, a, -5.0)
    d2 = bare_responses(base, -5.0)[1]
    assert abs(amps.c2 / (1j * base.g_single * a * d2) - 1) < 1e-4


def test_strong_drive_saturates(base, off):
    a = 1e3 / base.g_single
    amps = atomic_steady_state(base, off, a, 0.0)
    assert amps.c3 < 1
    assert abs(amps.norm - 1) < 1e-10
    assert _residuals(base, off, amps, a, 0.0) < 1e-10 * a * base.g_single


@pytest.mark.parametrize("omega,delta,dp,gamma4", [(0.5, -3.0, -2.0, 0.0), (0.3j, 1.0, 1.0, 0.2),
                                                    (1.0, -13.6, -13.0, 0.0)])
def test_amplitude_equations_hold(base, omega, delta, dp, gamma4):
    p = base.evolve(gamma4=gamma4)
    c = ControlField(omega, delta)
    a = 30.0 * (0.6 + 0.8j)
    amps = atomic_steady_state(p, c, a, dp)
    assert _residuals(p, c, amps, a, dp) < 1e-12
    assert abs(amps.norm - 1) < 1e-12
    assert amps.c3 > 0


def test_dark_resonance_branch(base):
    c = ControlField(0.5, -3.0)
    a = 20.0
    amps = atomic_steady_state(base, c, a, -3.0)
    assert amps.c1 == 0
    assert amps.c4 == pytest.approx(-base.g_single * a * amps.c3 / 0.5)
    assert _residuals(base, c, amps, a, -3.0) < 1e-12
    assert not amps.degenerate


def test_degenerate_flag(base):
    amps = atomic_steady_state(base, ControlField(0.0, -3.0), 5.0, -3.0)
    assert amps.degenerate and amps.c4 == 0


def test_required_input_empty_cavity():
    p = SystemParams(g_coll=0.0, delta_c=-1.0)
    a = 2.0 - 1.0j
    expect = (p.kappa + 1j * (p.delta_c - 0.7)) * a / (2 * math.sqrt(p.kappa / p.tau_rt))
    assert required_input(p, ControlField(), 0.7, a) == pytest.approx(expect, rel=1e-15)


@pytest.mark.parametrize("control", [ControlField(), t1(0.5, -13.6), t1(1.0, 3.7)])
def test_required_input_weak_limit(base, control):
    a = 1e-6 / base.g_single
    for dp in (-13.6, -5.0, 0.3):
        ain = required_input(base, control, dp, a)
        expect = cavity_denominator(base, control, dp) * a / (2 * math.sqrt(base.kappa / base.tau_rt))
        assert abs(ain / expect - 1) < 1e-4


def test_trace_starts_at_origin_and_conserves_norm(base, off):
    branch = trace_input_output(base, off, -11.0)
    assert len(branch) == 2001
    assert branch[0].i_in == 0 and branch[0].i_t == 0
    norms = np.array([p.amplitudes.norm for p in branch])
    assert np.all(np.abs(norms - 1) < 1e-10)
    assert all(p.i_in >= 0 and p.i_t >= 0 for p in branch)


def test_trace_grid_validation(base, off):
    for grid in ([0, 2, 1], [-1, 0, 1], [], [0, np.nan]):
        with pytest.raises(InvalidInputError):
            trace_input_output(base, off, -5.0, grid)


def test_default_grid():
    g = default_a_grid(100.0, 50)
    assert g[0] == 0 and len(g) == 51 and g[-1] == pytest.approx(100.0)
    assert np.all(np.diff(g) > 0)


@pytest.mark.parametrize("control", [ControlField(), t1(0.5, -13.6), t1(1.0, 3.7)])
def test_linear_limit_matches_closed_form(base, control):
    grid = np.concatenate([[0.0], np.geomspace(1e-4, 1e-2, 5)])  # g|a| <= 1e-4
    for dp in (-13.66, -5.0, -9.0, 3.66):
        branch = trace_input_output(base, control, dp, grid)
        expect = normalized_spectrum_point(base, control, dp)[0]
        for pt in branch[1:]:
            assert abs(pt.i_t / pt.i_in / expect - 1) < 1e-3


def test_slope_sign_centred(base, off):
    grid = np.linspace(0, 3000, 7)
    branch = trace_input_output(base, off, -11.0, grid)
    i_in = np.array([p.i_in for p in branch])
    np.testing.assert_array_equal([p.slope_sign for p in branch], np.sign(np.gradient(i_in, grid)))


def test_empty_cavity_is_linear(off):
    p = SystemParams(g_coll=0.0, delta_c=0.0)
    branch = trace_input_output(p, off, 0.5)
    assert detect_multistability(branch) == []
    assert detect_cpa_thresholds(branch) == []


def test_cpa_detection_rejects_empty_branch():
    with pytest.raises(InvalidInputError):
        detect_cpa_thresholds(Branch())


def test_nonlinear_cpa_threshold_geometry():
    # weaker coupling, cavity on the bare |2> line, control on two-photon resonance
    p = SystemParams(g_coll=2 * math.sqrt(2), delta_c=0.0)
    branch = trace_input_output(p, t1(0.1, 0.0), 0.0)
    found = cpa_threshold_points(branch)
    assert len(found) == 1
    cpa = found[0]
    assert cpa.ratio < 1e-6
    assert abs(cpa.stored_ratio - 1) < 0.01
    assert detect_cpa_thresholds(branch) == [cpa.i_in]


def test_bistable_window_between_polaritons(base, off):
    branch = trace_input_output(base, off, -11.0)
    windows = detect_multistability(branch)
    assert len(windows) == 1
    lo, hi = windows[0]
    assert 0 < lo < hi
    # three branch points share any input intensity inside the window
    a = np.linspace(0, 1e4, 200001)
    dense = trace_input_output(base, off, -11.0, a)
    i_in = np.array([p.i_in for p in dense])
    level = 0.5 * (lo + hi)
    crossings = np.count_nonzero(np.diff(np.sign(i_in - level)))
    assert crossings == 3
    # the refined edges are the extreme values of I_in around the turning points
    mid = (i_in > lo * 0.5) & (i_in < hi * 1.5)
    assert i_in[mid].max() >= hi * (1 - 1e-6)

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cpaswitch import (ControlField, Dressing, DriveInputs, InvalidInputError, SingularityError,
                       SystemParams, normalized_spectrum_point, steady_state_fields,
                       susceptibility)
from cpaswitch.model import bare_responses

from conftest import t1


def test_susceptibility_central_polariton(base, off):
    # d1 + d2 = 2/(1 - 10i) + 2/(1 + 10i) = 4/101, chi = i 25 * 4/101
    terms = susceptibility(base, off, -5.0)
    assert terms.chi == pytest.approx(1j * 100 / 101, rel=1e-14)
    assert terms.d1 + terms.d2 == pytest.approx(4 / 101, rel=1e-14)
    assert terms.sigma3 == 0


def test_chi_vanishes_without_atoms(empty):
    for dressing in Dressing:
        c = ControlField(omega=0.7, delta=1.0, dressing=dressing)
        assert susceptibility(empty, c, np.linspace(-5, 5, 11)).chi == pytest.approx(0)


def test_far_detuned_limit(base, off):
    chi = susceptibility(base, off, 1e6).chi
    assert abs(chi) < 1e-5 * base.g2n


def test_as_printed_matches_written_form(base):
    c = ControlField(omega=0.4 + 0.3j, delta=-2.0)
    p = base.evolve(gamma4=0.2)
    dp = -1.3
    d1 = 2 / (1 - 2j * (dp + 10))
    d2 = 2 / (1 - 2j * dp)
    s3 = -np.conj(c.omega) * d2 / (0.1 - 1j * (c.delta - dp) + abs(c.omega) ** 2 * d2)
    expect = 1j * 25 * (d1 + d2 + d2 * c.omega * s3)
    terms = susceptibility(p, c, dp)
    assert terms.sigma3 == pytest.approx(s3, rel=1e-13)
    assert terms.chi == pytest.approx(expect, rel=1e-13)


def test_transition1_matches_written_form(base):
    p = base.evolve(gamma4=0.2)
    c = t1(0.6, 2.5)
    dp = 1.7
    d1d = 2 / (1 - 2j * (dp + 10) + 4 * 0.36 / (0.2 - 2j * (dp - 2.5)))
    expect = 1j * 25 * (d1d + 2 / (1 - 2j * dp))
    assert susceptibility(p, c, dp).chi == pytest.approx(expect, rel=1e-13)


def test_transition1_two_photon_resonance_is_finite(base):
    # gamma4 = 0 and delta_p = delta: the dressed d1 vanishes (dark state)
    chi = susceptibility(base, t1(0.5, -3.0), -3.0).chi
    d2 = bare_responses(base, -3.0)[1]
    assert chi == pytest.approx(1j * 25 * d2, rel=1e-14)


def test_only_modulus_of_omega_matters(base):
    dp = np.linspace(-20, 10, 301)
    for dressing in Dressing:
        a = normalized_spectrum_point(base, ControlField(0.5, -13.6, dressing), dp)
        b = normalized_spectrum_point(base, ControlField(0.5j, -13.6, dressing), dp)
        np.testing.assert_allclose(a, b, rtol=1e-12)


def test_singularity_names_term():
    p = SystemParams(gamma13=0.0, gamma23=0.0)
    with pytest.raises(SingularityError) as err:
        susceptibility(p, ControlField(), 0.0)
    assert err.value.term == "d2"
    with pytest.raises(SingularityError) as err:
        susceptibility(p, ControlField(), -10.0)
    assert err.value.term == "d1"


def test_non_finite_detuning(base, off):
    with pytest.raises(InvalidInputError):
        susceptibility(base, off, np.nan)


def test_cpa_at_central_polariton(base, off):
    # D = 1 + 100/101 = 201/101, a_out = 2*101/201 - 1 = 1/201
    i_t, i_cav = normalized_spectrum_point(base, off, -5.0)
    assert i_t == pytest.approx((1 / 201) ** 2, rel=1e-12)
    assert i_cav == pytest.approx(4 * (101 / 201) ** 2, rel=1e-12)
    sol = steady_state_fields(base, off, DriveInputs(1.0, 1.0, -5.0))
    assert sol.a_out_r == pytest.approx(sol.a_out_l)
    assert sol.i_t_norm_r == pytest.approx(i_t, rel=1e-12)
    assert sol.i_cav_norm == pytest.approx(i_cav, rel=1e-12)
    assert sol.i_cav_raw * base.kappa_tau == pytest.approx(i_cav, rel=1e-12)


def test_empty_cavity_on_resonance(empty, off):
    sol = steady_state_fields(empty, off, DriveInputs(1.0, 1.0, 0.0))
    assert sol.a_out_r == pytest.approx(1.0)
    assert sol.i_t_norm_r == pytest.approx(1.0)
    assert sol.i_cav_norm == pytest.approx(4.0)


def test_empty_cavity_far_off_resonance_reflects(empty, off):
    sol = steady_state_fields(empty, off, DriveInputs(1.0, 0.0, 1e6))
    assert sol.a_out_r == pytest.approx(-1.0, abs=1e-5)
    assert sol.i_t_norm_r == pytest.approx(1.0, abs=1e-5)
    i_t, i_cav = normalized_spectrum_point(empty, off, 1e6)
    assert i_t == pytest.approx(1.0, abs=1e-5) and i_cav < 1e-10


def test_zero_input_rejected_for_normalised_quantities(base, off):
    sol = steady_state_fields(base, off, DriveInputs(0.0, 0.0, 0.0))
    assert sol.a == 0
    with pytest.raises(InvalidInputError):
        sol.i_t_norm


def test_cpa_bookkeeping(off):
    # g^2 N = 101/4 makes D = 2 kappa exactly at delta_p = delta_c = -5
    p = SystemParams(g_coll=np.sqrt(101 / 4))
    dp = np.linspace(-5.01, -4.99, 2001)
    i_t, i_cav = normalized_spectrum_point(p, off, dp)
    deep = i_t < 1e-6
    assert deep.any()
    assert np.all(np.abs(i_cav[deep] - 1) < 2e-3)


params_st = st.builds(
    SystemParams,
    kappa=st.floats(0.05, 10), delta12=st.floats(0, 30), delta_c=st.floats(-20, 20),
    g_coll=st.floats(0, 12), gamma13=st.floats(1, 4), gamma23=st.floats(1, 4),
    gamma4=st.floats(0, 2))
control_st = st.builds(ControlField, omega=st.complex_numbers(max_magnitude=3, allow_nan=False),
                       delta=st.floats(-25, 15), dressing=st.sampled_from(list(Dressing)))


@settings(max_examples=200, deadline=None)
@given(params_st, control_st, st.floats(-30, 20),
       st.complex_numbers(max_magnitude=5, allow_nan=False),
       st.complex_numbers(max_magnitude=5, allow_nan=False))
def test_io_identity_and_passivity(p, c, dp, ar, al):
    sol = steady_state_fields(p, c, DriveInputs(ar, al, dp))
    root = np.sqrt(p.kappa_tau)
    scale = max(abs(ar), abs(al), abs(root * sol.a), 1e-300)
    assert abs(sol.a_out_r - (root * sol.a - ar)) <= 1e-12 * scale
    assert abs(sol.a_out_l - (root * sol.a - al)) <= 1e-12 * scale
    i_t, _ = normalized_spectrum_point(p, c, dp)
    assert i_t <= 1 + 1e-9


@settings(max_examples=100, deadline=None)
@given(params_st, st.floats(-25, 15), st.floats(-30, 20))
def test_modes_agree_without_control(p, delta, dp):
    a = susceptibility(p, ControlField(0.0, delta, Dressing.AS_PRINTED), dp).chi
    b = susceptibility(p, ControlField(0.0, delta, Dressing.TRANSITION1), dp).chi
    assert a == b

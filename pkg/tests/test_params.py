import math

import pytest

from cpaswitch import ControlField, Dressing, DriveInputs, InvalidInputError, SystemParams
from cpaswitch.params import DEFAULT_G_SINGLE


def test_defaults_resolve_mirror_and_atoms(base):
    assert base.mirror_t == pytest.approx(0.02)
    assert base.kappa == pytest.approx(base.mirror_t / base.tau_rt, rel=1e-12)
    assert base.n_atoms == round((5 / DEFAULT_G_SINGLE) ** 2)
    assert base.g_single ** 2 * base.n_atoms == pytest.approx(25.0, rel=1e-12)
    assert base.gamma == 1.0
    assert base.unit_linewidth_decays


def test_mirror_triplet_any_two():
    p = SystemParams(kappa=2.0, tau_rt=0.5)
    assert p.mirror_t == pytest.approx(1.0)
    p = SystemParams(kappa=2.0, mirror_t=0.1)
    assert p.tau_rt == pytest.approx(0.05)
    with pytest.raises(InvalidInputError):
        SystemParams(kappa=1.0, mirror_t=0.1, tau_rt=0.2)


def test_explicit_atom_number_must_match():
    p = SystemParams.from_atoms(0.02, 10000, delta_c=-2.0)
    assert p.g_coll == pytest.approx(2.0)
    with pytest.raises(InvalidInputError):
        SystemParams(g_coll=5.0, g_single=0.02, n_atoms=10)


@pytest.mark.parametrize("kw", [dict(kappa=0.0), dict(kappa=-1.0), dict(gamma13=-0.1),
                                dict(g_coll=-1.0), dict(delta_c=math.nan),
                                dict(gamma_mhz=0.0), dict(delta12=math.inf)])
def test_invalid_values_rejected(kw):
    with pytest.raises(InvalidInputError):
        SystemParams(**kw)


def test_evolve_rederives(base):
    q = base.evolve(g_coll=2.0)
    assert q.g_coll == 2.0
    assert q.g_single ** 2 * q.n_atoms == pytest.approx(4.0, rel=1e-12)
    r = base.evolve(kappa=2.0)
    assert r.kappa_tau == pytest.approx(r.mirror_t)


def test_non_default_decays_flagged():
    assert not SystemParams(gamma13=2.0).unit_linewidth_decays


def test_control_field_and_dressing_parse():
    c = ControlField(omega=0.5 + 0.5j, delta=-3.0, dressing="Transition1")
    assert c.dressing is Dressing.TRANSITION1
    assert c.omega_sq == pytest.approx(0.5)
    assert not c.off().is_on
    assert Dressing.parse("AsPrinted") is Dressing.AS_PRINTED
    with pytest.raises(InvalidInputError):
        Dressing.parse("both")


def test_drive_inputs_reference_intensity():
    d = DriveInputs(a_in_r=1.0, a_in_l=2j, delta_p=0.0)
    assert d.i_in == pytest.approx(4.0)
    s = d.swapped()
    assert (s.a_in_r, s.a_in_l) == (2j, 1.0)

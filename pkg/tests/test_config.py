import pytest

from cpaswitch import ConfigError, Dressing, SystemParams
from cpaswitch.config import RunConfig, load_config, parse_config, serialize_config
from cpaswitch.spectra import ScanAxis


def test_empty_document_gives_defaults():
    cfg = parse_config("")
    assert cfg == RunConfig()
    s = cfg.system
    assert (s.delta_c, s.delta12, s.g_coll, s.kappa) == (-5.0, 10.0, 5.0, 1.0)
    assert (s.gamma13, s.gamma23, s.gamma4, s.gamma_mhz) == (1.0, 1.0, 0.0, 6.07)
    assert cfg.control.field().omega == 0
    assert (cfg.sweep.min, cfg.sweep.max, cfg.sweep.count) == (-20.0, 10.0, 3001)
    assert cfg.output.format == "csv"


def test_comments_and_whitespace():
    cfg = parse_config("""
# leading comment
system.kappa = 2.0   # trailing comment
   control.omega=0.5+0.25j
control.dressing = Transition1
sweep.scan_axis = g_coll
""")
    assert cfg.system.kappa == 2.0
    assert cfg.control.omega == 0.5 + 0.25j
    assert cfg.control.dressing is Dressing.TRANSITION1
    assert cfg.sweep.scan_axis is ScanAxis.G_COLL


@pytest.mark.parametrize("text", [
    "",
    "system.g_coll = 2.8284271247461903\ncontrol.omega = 0.1\ncontrol.delta = -10",
    "control.omega = 0.3-0.1j\ncontrol.channel_delta = -13.6, -5, 3.7\nnonlinear.delta_p = -11",
    "system.kappa = 0.7\nsystem.mirror_t = 0.05\nsystem.gamma4 = 1e-4\noutput.path = x.csv",
])
def test_round_trip(text):
    cfg = parse_config(text)
    text2 = serialize_config(cfg)
    cfg2 = parse_config(text2)
    assert cfg2 == cfg
    assert serialize_config(cfg2) == text2


def test_constraint_violation_names_field():
    with pytest.raises(ConfigError) as err:
        parse_config("system.delta_c = -5\nsystem.kappa = -1\n")
    assert err.value.field == "system.kappa"
    assert err.value.line == 2
    assert "kappa" in str(err.value)


@pytest.mark.parametrize("text,line,field", [
    ("system.kappa 1", 1, None),
    ("\n\nkappa = 1", 3, None),
    ("system.bogus = 1", 1, "system.bogus"),
    ("plot.color = red", 1, "plot.color"),
    ("system.kappa = one", 1, "system.kappa"),
    ("sweep.count = 2.5", 1, "sweep.count"),
    ("sweep.count = 1", 1, "sweep.count"),
    ("control.dressing = sideways", 1, "control.dressing"),
    ("control.channel_omega = 1,2", 1, "control.channel_omega"),
    ("output.format = xml", 1, "output.format"),
    ("system.kappa = 1\nsystem.kappa = 2", 2, "system.kappa"),
    ("oracle.t_max = 0", 1, "oracle.t_max"),
])
def test_errors_carry_location(text, line, field):
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    assert err.value.line == line
    assert err.value.field == field


def test_system_matches_direct_construction():
    cfg = parse_config("system.g_coll = 3\nsystem.delta_c = -3")
    assert cfg.system == SystemParams(g_coll=3.0, delta_c=-3.0)


def test_load_from_file(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text("sweep.count = 11\n", encoding="utf-8")
    assert load_config(path).sweep.count == 11

import pytest

from cpaswitch import ControlField, Dressing, SystemParams

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(id): acceptance criterion identifier")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    props = dict(report.user_properties)
    marker = props.get("acceptance_id")
    if marker:
        notes = "; ".join(str(v) for k, v in report.user_properties if k == "measured")
        _RESULTS[report.nodeid] = (marker, report.outcome, notes)


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("acceptance")
        if m:
            item.user_properties.append(("acceptance_id", m.args[0]))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, (cid, outcome, notes) in sorted(_RESULTS.items(), key=lambda kv: kv[1][0]):
        status = "PASS" if outcome == "passed" else "FAIL"
        line = f"criterion {cid:<5} {status}  {nodeid.split('::')[-1]}"
        terminalreporter.write_line(line + (f"  [{notes}]" if notes else ""))


@pytest.fixture
def base():
    """Three-polariton configuration: delta_c = -5, delta12 = 10, g sqrt(N) = 5."""
    return SystemParams()


@pytest.fixture
def off():
    return ControlField()


@pytest.fixture
def empty():
    return SystemParams(g_coll=0.0, delta_c=0.0)


def t1(omega=0.0, delta=0.0):
    return ControlField(omega=omega, delta=delta, dressing=Dressing.TRANSITION1)

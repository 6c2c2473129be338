import time

from cpaswitch.invariants import run_invariant_suite


def test_suite_small_draw_count():
    report = run_invariant_suite(draws=50, seed=7)
    assert report.passed
    assert {c.name for c in report.checks} >= {"input-output identity", "input swap symmetry",
                                                "passivity I_T/I_in <= 1"}
    assert all(c.draws == 50 for c in report.checks)


def test_suite_is_reproducible():
    a = run_invariant_suite(draws=20, seed=3)
    b = run_invariant_suite(draws=20, seed=3)
    assert [c.worst for c in a.checks] == [c.worst for c in b.checks]

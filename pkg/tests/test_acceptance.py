"""The eight acceptance criteria, each at its stated tolerance and time budget.

Every test prints one PASS/FAIL line.  Criterion 3 has one clause that cannot
hold (the fitted constant is not unimodular); it is split out as a strict
xfail and recorded in the decisions ledger.
"""

import pytest

from gammaforge import battery


def report(capsys, tag: str, check, budget: float, passed=None, note: str = ""):
    ok = check.passed if passed is None else passed
    ok = ok and check.seconds < budget
    with capsys.disabled():
        extra = f" [{note}]" if note else ""
        print(f"\n{'PASS' if ok else 'FAIL'} {tag}: {check.name} "
              f"({check.seconds:.1f}s, budget {budget:.0f}s){extra}")
    return ok


def test_c1_cubic_covering_table(capsys):
    c = battery.covering_table()
    assert report(capsys, "C1", c, 1.0), c.details
    assert c.details["pairing"] == {1: 3, 3: 1, 4: 5, 5: 4, 2: 2, 6: 6}
    assert c.details["fixed_points"] == [2, 6]


def test_c2_e6_table(capsys):
    c = battery.pvs_table()
    assert report(capsys, "C2", c, 1.0), c.details
    assert c.details["count"] == 6


@pytest.fixture(scope="module")
def cubic_check():
    return battery.cubic_weak_identity(num_tests=3, tol=1e-2)


def test_c3_weak_identity_deviation_consistency_control(capsys, cubic_check):
    d = cubic_check.details
    ok = bool(d["verified"])
    note = (f"deviation {d['deviation']:.2g}, C spread {d['C_spread']:.2g}, "
            f"control {d['control_deviation']:.2g}; |C| = {d['abs_C']:.5f} is not 1, see xfail")
    report(capsys, "C3", cubic_check, 300.0, passed=False, note=note)
    assert d["tests"] >= 3
    assert d["deviation"] < 1e-2
    assert d["C_spread"] < 1e-2
    assert d["control_deviation"] > 10 * 1e-2
    assert ok and cubic_check.seconds < 300.0


@pytest.mark.xfail(strict=True, reason="fitted C = -i/(3 sqrt 3) has modulus 0.19245; "
                                       "logged as a conflict in the decisions ledger")
def test_c3_fitted_constant_is_unimodular(cubic_check):
    assert cubic_check.details["unimodular_deviation"] < 1e-2


def test_c4_gauss_identity(capsys):
    c = battery.gauss_identity(1e-6, 1e-4)
    assert report(capsys, "C4", c, 30.0), c.details
    assert c.details["R"]["oracle_error"] < 1e-6
    assert c.details["C"]["oracle_error"] < 1e-4


def test_c5_gamma_battery(capsys):
    c = battery.gamma_battery(1e-9)
    assert report(capsys, "C5", c, 30.0), c.details


def test_c6_covering_divisor_cross_check(capsys):
    c = battery.covering_cross_check(11, 12, 5)
    assert report(capsys, "C6", c, 120.0), c.details
    assert not c.details["failed"] and not c.details["extra"]


def test_c7_legendre_battery(capsys):
    c = battery.legendre_battery(20)
    assert report(capsys, "C7", c, 60.0), c.details


def test_c8_padic_suite(capsys):
    c = battery.padic_suite(1e-10, 1e-10, 1e-8, 3)
    assert report(capsys, "C8", c, 300.0), c.details
    cubic = c.details["cubic"]
    assert cubic["sign_error"] < 1e-8 and cubic["stabilization"] < 1e-10
    assert not cubic["control_pass"]

"""Acceptance gate: ten criteria, each exact, each under a wall-clock budget.

Every test prints one line ``criterion N: PASS|FAIL ...`` to the terminal even
without ``-s``. Run only this gate with ``pytest tests/test_acceptance.py -v``.
"""

import time

import pytest

from detpres.field import make_field
from detpres.harness import classify_linear_preservers, run_suite


@pytest.fixture
def report(capsys):
    def emit(number, ok, elapsed, limit, detail):
        status = "PASS" if ok and elapsed < limit else "FAIL"
        line = f"criterion {number:>2}: {status}  {elapsed:8.2f}s / {limit:>5}s  {detail}"
        with capsys.disabled():
            print("\n" + line)
        return status == "PASS"

    yield emit


def _suite(name, **params):
    t0 = time.perf_counter()
    r = run_suite(name, params)
    return r, time.perf_counter() - t0


def test_criterion_01_sym_witnesses(report):
    r, dt = _suite("lemma21", n=2, p=5)
    ok = r.passed and r.cases == 125 * 124 == 15_500
    assert report(1, ok, dt, 5, f"sym witnesses, {r.cases} ordered pairs, {r.violation_count} violations")


def test_criterion_02_skew_witnesses_and_canonical(report):
    r, dt = _suite("lemma24", n=4, p=3)
    ok = r.passed and r.cases == 729 + 729 * 728
    assert report(2, ok, dt, 30, f"skew witnesses and canonical forms on Q4(GF(3)), {r.cases} cases")


def test_criterion_03_cofactor_bump(report):
    r3, dt3 = _suite("lemma23", n=3, p=3)
    r2, dt2 = _suite("lemma23", n=2, p=5)
    ok = r3.passed and r2.passed and r3.cases == 3 ** 9 and r2.cases == 5 ** 4
    assert report(3, ok, dt3 + dt2, 60, f"cofactor bump on M3(GF(3)) {r3.cases} and M2(GF(5)) {r2.cases} matrices")


def test_criterion_04_trace_pairing(report):
    rs, dts = _suite("trace_pairing", n=2, p=5, space="sym")
    rk, dtk = _suite("trace_pairing", n=4, p=3, space="skew")
    ok = rs.passed and rk.passed and rs.cases == 15_625 and rk.cases == 531_441
    assert report(4, ok, dts + dtk, 60, f"trace pairing, {rs.cases} sym and {rk.cases} skew pairs")


def test_criterion_05_sym_round_trip_gf5(report):
    r, dt = _suite("roundtrip_sym", n=2, p=5, count=1000, seed=0)
    ok = r.passed and r.cases == 1000
    assert report(5, ok, dt, 120, f"1000 round trips over GF(5), exhaustive det-compat, paper == fast; "
                                  f"{r.violation_count} violations")


def test_criterion_06_sym_round_trip_n3(report):
    r, dt = _suite("roundtrip_sym", n=3, p=11, count=100, seed=0, samples=10_000)
    ok = r.passed and r.cases == 100
    assert report(6, ok, dt, 600, f"100 round trips over GF(11) n=3, 10^4 sampled pairs each; "
                                  f"{r.violation_count} violations")


def test_criterion_07_skew_round_trip(report):
    r, dt = _suite("roundtrip_skew", n=4, p=17, count=100, seed=0, samples=10_000)
    ok = r.passed and r.cases == 100
    assert report(7, ok, dt, 600, f"100 skew round trips on Q4(GF(17)), 10^4 sampled pairs each; "
                                  f"{r.violation_count} violations")


def test_criterion_08_classification(report):
    t0 = time.perf_counter()
    r = classify_linear_preservers("sym", 2, make_field("prime", 5), shards=1)
    dt = time.perf_counter() - t0
    ex = r.extra
    ok = (r.passed and ex["operators"] == 5 ** 9 and ex["failed"] == 0
          and ex["det_preserving"] == ex["oracle_count"] == ex["factored"])
    assert report(8, ok, dt, 900, f"{ex['operators']} operators, {ex['det_preserving']} preservers, "
                                  f"oracle {ex['oracle_count']}, failed {ex['failed']}")


def test_criterion_09_odd_skew_singular(report):
    r3, dt3 = _suite("odd_skew_singular", n=3, p=3)
    r5, dt5 = _suite("odd_skew_singular", n=3, p=5)
    ok = r3.passed and r5.passed and r3.cases == 27 and r5.cases == 125
    assert report(9, ok, dt3 + dt5, 1, f"det = 0 on all of Q3(GF(3)) and Q3(GF(5)), {r3.cases + r5.cases} matrices")


def test_criterion_10_two_alphas(report):
    r, dt = _suite("corollary13", n=2, p=7, count=100, seed=0)
    ok = r.passed and r.cases == 100
    assert report(10, ok, dt, 60, f"two distinct alphas over GF(7): x0 = 0 and phi = gamma on {r.cases} instances")

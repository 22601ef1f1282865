"""Acceptance suite: one test per criterion, each printing a status line.

Every identity is checked in exact arithmetic (integers, Fractions,
polynomial or symbolic-constant equality); there are no tolerances
anywhere.  Reported wall times are informative, not asserted.
"""

import time

from swb.suites import SuiteConfig, run_suite


def _run(suite, **kw):
    t0 = time.time()
    report = run_suite(SuiteConfig(suite=suite, **kw))
    return report, time.time() - t0


def _announce(num, label, report, wall, extra=""):
    s = report.summary
    status = "PASS" if not report.failed else "FAIL"
    print(
        f"\nACCEPTANCE {num}: {label}: {status} "
        f"({s['pass']} pass, {s['fail']} fail, {s['skipped-budget']} skipped; "
        f"{wall:.1f}s){extra}"
    )
    return status == "PASS"


def test_criterion_1_density_calibration():
    report, wall = _run("density-calibration")
    ok = _announce(1, "primitive densities match the rank-1 closed forms", report, wall)
    assert ok
    assert report.summary["pass"] >= 120
    assert report.summary["skipped-budget"] == 0


def test_criterion_2_difference_formula():
    report, wall = _run("difference-formula")
    ok = _announce(2, "difference formula exact on the (p, H, M, N) grid", report, wall)
    assert ok
    assert report.summary["pass"] >= 60
    assert report.summary["skipped-budget"] == 0


def test_criterion_3_functional_equations():
    report, wall = _run("functional-equation")
    ok = _announce(
        3, "density polynomial reflections (30 odd-p lattices + 10 dyadic pairs)", report, wall
    )
    assert ok
    assert report.summary["skipped-budget"] == 0
    # 30 random odd-p lattices contribute two checks each; 10 dyadic pairs one
    assert report.summary["pass"] == 70


def test_criterion_4_g_functional_equation():
    from swb.analytic import check_g_functional_equation

    t0 = time.time()
    cases = []
    for p in (2, 3):
        for nu in (2, 3, 4):
            for t in (x for x in range(-6, 7) if x):
                cases.append(check_g_functional_equation(p**nu, t, p))
    wall = time.time() - t0
    fails = [c for c in cases if not c.passed]
    print(
        f"\nACCEPTANCE 4: g functional equation formal identity: "
        f"{'PASS' if not fails else 'FAIL'} ({len(cases)} cases; {wall:.1f}s)"
    )
    assert len(cases) == 72 and not fails


def test_criterion_5_a_p_two_routes():
    report, wall = _run("siegel-weil-t0", n_values=(1,))
    routes = [c for c in report.cases if c.kind == "a-p-two-routes"]
    fails = [c for c in routes if not c.passed]
    print(
        f"\nACCEPTANCE 5: A_p closed form vs stable-limit route: "
        f"{'PASS' if not fails else 'FAIL'} ({len(routes)} cases; {wall:.1f}s)"
    )
    assert len(routes) == 12 and not fails


def test_criterion_6_singular_relation():
    report, wall = _run("singular-relation")
    cases = [c for c in report.cases if c.kind.startswith("singular-relation")]
    formal = [c for c in cases if c.kind == "singular-relation"]
    ok = _announce(
        6,
        "singular-coefficient relation (formal identity and k = 1, 2, 3)",
        report,
        wall,
        extra=f" [{len(formal)} formal identities]",
    )
    assert ok
    assert report.summary["skipped-budget"] == 0
    assert len(formal) == 240  # 3 primes x 4 valuations x 20 values of t


def test_criterion_7_geometry_ledger():
    report, wall = _run("geometry-ledger")
    kinds = {}
    for c in report.cases:
        kinds.setdefault(c.kind, []).append(c)
    ok = _announce(7, "intersection ledger identities", report, wall)
    assert ok
    assert all(c.passed for c in kinds["div-p-trivial"])
    assert all(c.passed for c in kinds["xhat-closed-form"])
    assert all(c.passed for c in kinds["f-p-self-closed-form"])
    assert all(c.passed for c in kinds["hodge-difference"])
    assert len(kinds["hodge-difference"]) >= 60


def test_criterion_8_a_N_bookkeeping():
    report, wall = _run("geometry-ledger")
    sums = [c for c in report.cases if c.kind.startswith("a-N")]
    fails = [c for c in sums if not c.passed]
    print(
        f"\nACCEPTANCE 8: section-exponent sum rules for N <= 60: "
        f"{'PASS' if not fails else 'FAIL'} ({len(sums)} checks; {wall:.1f}s)"
    )
    assert sums and not fails


def test_criterion_9_flagship_t0():
    report, wall = _run("siegel-weil-t0")
    flag = [c for c in report.cases if c.kind == "siegel-weil-t0"]
    fails = [c for c in flag if not c.passed]
    print(
        f"\nACCEPTANCE 9 (FLAGSHIP): geometric T=0 side equals the analytic "
        f"constant-term derivative for N <= 60: {'PASS' if not fails else 'FAIL'} "
        f"({len(flag)} levels; {wall:.1f}s)"
    )
    assert len(flag) == 60 and not fails


def test_criterion_10_incoherence_vanishing():
    report, wall = _run("siegel-weil-t0")
    vanish = [c for c in report.cases if c.kind == "incoherence-vanishing"]
    fails = [c for c in vanish if not c.passed]
    print(
        f"\nACCEPTANCE 10: central value vanishes for N <= 60: "
        f"{'PASS' if not fails else 'FAIL'} ({len(vanish)} levels; {wall:.1f}s)"
    )
    assert len(vanish) == 60 and not fails

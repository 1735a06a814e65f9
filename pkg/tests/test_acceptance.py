"""End-to-end acceptance checks, one test per criterion.

Each test records a one-line verdict in SUMMARY; conftest prints them at
the end of the run.
"""
from arakelov import verify as V
from arakelov.hyperelliptic import xn_plus_one

CFG = V.RunConfig()
SUMMARY = {}


def record(n, title, checks):
    bad = [c for c in checks if not c.ok]
    verdict = "PASS" if not bad else "FAIL"
    SUMMARY[n] = f"[{verdict}] {n}. {title}: {len(checks) - len(bad)}/{len(checks)} checks"
    assert not bad, [(c.name, c.value, c.tolerance, c.detail) for c in bad]


def test_1_reference_values_xn_plus_one():
    rows = V.table1_rows(CFG)
    checks = []
    for r in rows:
        for k, ok in r["checks"].items():
            ref, tol = V.TABLE1[r["n"]][k]
            checks.append(V.Check(f"n={r['n']} {k}", abs(r[k] - ref), tol, ok))
    record(1, "reference values for y^2 = x^n + 1, n = 5..8", checks)


def test_2_deterministic_identities():
    record(2, "deterministic identities on 20 genus-2 and 5 genus-3 curves",
           V.deterministic_suite(CFG))


def test_3_monte_carlo_identities():
    record(3, "Monte Carlo identities on y^2 = x^5 + 1",
           V.identities_suite(xn_plus_one(5), CFG))


def test_4_bounds():
    record(4, "bound margins", V.bounds_suite(CFG))


def test_5_combinatorics():
    record(5, "graph counts and binomial identities", V.combinatorics_suite(CFG))


def test_6_numerical_hygiene():
    record(6, "theta derivatives, truncation, torus mass, quadrature convergence",
           V.theta_suite(CFG) + V.periods_suite(CFG))


def test_7_genus_one():
    record(7, "genus-1 modular invariance and j(y^2 = x^3 + 1)", V.genus_one_suite(CFG))

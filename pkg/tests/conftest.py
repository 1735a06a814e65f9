import pytest

from arakelov.hyperelliptic import period_matrix, xn_plus_one


@pytest.fixture(scope="session")
def x5():
    curve = xn_plus_one(5)
    return curve, period_matrix(curve)


@pytest.fixture(scope="session")
def x7():
    curve = xn_plus_one(7)
    return curve, period_matrix(curve)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "SUMMARY", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for k in sorted(lines):
            terminalreporter.write_line(lines[k])

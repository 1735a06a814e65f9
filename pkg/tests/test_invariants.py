import math

import numpy as np
import pytest

from arakelov import abeljacobi as aj
from arakelov import invariants as inv
from arakelov.numerics import Estimate, agree
from arakelov.theta import PeriodMatrix


@pytest.fixture(scope="module")
def x5_H(x5):
    _, pm = x5
    return inv.H(pm, 100_000, 42)


def test_x5_closed_forms(x5, x5_H):
    curve, pm = x5
    assert x5_H.value == pytest.approx(-0.48544, abs=0.003)
    d, p, L = inv.hyperelliptic_delta_phi(curve, pm, x5_H)
    assert d.value == pytest.approx(-16.679, abs=0.03)
    assert p.value == pytest.approx(0.538, abs=0.02)
    cf = inv.closed_forms(pm, x5_H, L)
    assert cf["Lambda"].value == pytest.approx(3.4152, abs=0.01)


def test_closed_forms_are_consistent(x5, x5_H):
    _, pm = x5
    cf = inv.closed_forms(pm, x5_H)
    g = pm.g
    H, d, p = cf["H"].value, cf["delta"].value, cf["phi"].value
    assert inv.delta_from_H_phi(g, H, p) == pytest.approx(d, abs=1e-10)
    assert inv.beta_from_delta_phi(g, d, p) == pytest.approx(cf["beta"].value, abs=1e-10)
    assert inv.lambda_from_closed_forms(g, H, d, p) == pytest.approx(cf["Lambda"].value, abs=1e-10)
    da, pa, _ = inv.abelian_extensions(g, cf["H"], cf["Lambda"])
    assert da.value == pytest.approx(d, abs=1e-9)
    assert pa.value == pytest.approx(p, abs=1e-9)


def test_with_H_does_not_double_count(x5, x5_H):
    _, pm = x5
    aff = inv.affine_in_H(pm.g, -43.14)
    z = inv.with_H(x5_H, [(1.0, aff["delta"]), (-2.0, aff["phi"]), (24.0, aff["H"])])
    assert z.stderr == pytest.approx(0.0, abs=1e-12)


def test_theta_square_mass(x5):
    _, pm = x5
    m = inv.theta_square_mass(pm, 50_000)
    assert m.value == pytest.approx(2 ** -1, abs=max(4 * m.stderr, 1e-3))


def test_genus_one_modular_invariance():
    tau = 0.2 + 0.9j
    a = inv.genus_one_delta(PeriodMatrix([[tau]]), samples=50_000, seed=1)
    b = inv.genus_one_delta(PeriodMatrix([[-1 / tau]]), samples=50_000, seed=2)
    assert agree(a, b, floor=1e-3)


def test_bounds_hold_on_x5(x5, x5_H):
    curve, pm = x5
    d, p, L = inv.hyperelliptic_delta_phi(curve, pm, x5_H)
    pts = np.random.default_rng(0).random((2000, 4))
    z = pts[:, :2] + pts[:, 2:] @ pm.omega.T
    rep = inv.bounds_report(curve, pm, {"H": x5_H.value, "delta": d.value, "phi": p.value,
                                        "log_delta": L}, points=z)
    assert {"delta interval lower", "delta interval upper", "Autissier", "phi > 0"} <= {
        b.name for b in rep}
    assert all(b.ok for b in rep), [(b.name, b.margin) for b in rep if not b.ok]


def test_default_r():
    assert inv.default_r(2) == 2
    assert inv.default_r(3) == 1
    assert inv.default_r(7) == 1


def test_period_only_report_gates_lambda(x5):
    _, pm = x5
    rep = inv.full_report(None, PeriodMatrix(pm.omega), h_samples=20_000, autissier_points=500)
    assert rep.entries["Lambda"].value is None
    assert rep.entries["Lambda"].provenance == "unavailable"
    assert rep.value("log_delta") == pytest.approx(-43.1406, abs=1e-3)


def test_phi_via_S1_matches_closed_form(x5, x5_H):
    curve, pm = x5
    S1 = aj.S_k(curve, pm, 1, config=aj.MCConfig(20_000, seed=3))
    ph = inv.phi_from_S1(pm.g, x5_H, S1)
    _, p, _ = inv.hyperelliptic_delta_phi(curve, pm, x5_H)
    # both sides carry the same H error; 0.01 is a generous allowance for it
    assert abs(ph.value - p.value) <= 3 * math.hypot(ph.stderr, 0.01)

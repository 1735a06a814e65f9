import math
from itertools import combinations

import numpy as np
import pytest

from arakelov import hyperelliptic as hy
from arakelov.theta import ThetaCharacteristic, theta_norm_many

LOG_DELTA = {5: -43.140600292945841, 6: -44.339891809804911,
             7: -239.74586353115816, 8: -246.58284657876146}


def test_x5_period_matrix(x5):
    _, pm = x5
    expect = np.array([[-1 + 0.85065080835204j, -0.5 + 0.16245984811645303j],
                       [-0.5 + 0.16245984811645303j, -0.5 + 0.68819096023558679j]])
    assert np.abs(pm.omega - expect).max() < 1e-12
    assert str(pm.K) == "[10;11]/2"


@pytest.mark.parametrize("n", [5, 6, 7, 8])
def test_discriminant_frozen(n):
    pm = hy.period_matrix(hy.xn_plus_one(n))
    assert hy.delta_g_log(pm) == pytest.approx(LOG_DELTA[n], abs=1e-8)
    assert hy.delta_g_log(pm, "general-sum") == pytest.approx(LOG_DELTA[n], abs=1e-8)


def test_invalid_branch_sets():
    with pytest.raises(hy.DuplicateBranchPoint):
        hy.HyperellipticCurve([0, 1, 0, 2, 3])
    with pytest.raises(hy.EvenCount):
        hy.HyperellipticCurve([0, 1, 2, 3])


def test_json_round_trip():
    c = hy.HyperellipticCurve([0, 1, 2j, -1 - 1j, 3], "demo")
    d = hy.HyperellipticCurve.from_json(c.to_json())
    assert np.array_equal(d.branch, c.branch) and d.label == "demo"


def test_moebius_invariance():
    rng = np.random.default_rng(4)
    pts = rng.normal(size=5) + 1j * rng.normal(size=5)
    a = hy.delta_g_log(hy.period_matrix(hy.HyperellipticCurve(pts)))
    for r in range(5):
        moved = hy.move_to_infinity(pts, r)
        b = hy.delta_g_log(hy.period_matrix(hy.HyperellipticCurve(moved)))
        assert b == pytest.approx(a, abs=1e-9)


def test_weierstrass_half_periods_and_riemann_constant(x7):
    _, pm = x7
    g = pm.g
    n = 2 * g + 1
    # theta vanishes on the classes of effective degree g-1 divisors of Weierstrass points
    for T in combinations(range(1, n + 1), g - 1):
        z = pm.half_period(pm.char_of(T) + pm.K)
        v, cens = theta_norm_many(pm, z[None])
        assert cens[0] or v[0] < -20


def test_rosenhain_and_de_jong(x5):
    _, pm = x5
    assert hy.rosenhain_residual(pm) < 1e-10
    assert hy.rosenhain_residual(pm, tau=[3, 1, 5, 2, 6, 4]) < 1e-10
    assert hy.de_jong_residual(pm) < 1e-9
    assert hy.phi_g_log(pm, "infinity") == pytest.approx(hy.phi_g_log(pm, "all"), abs=1e-9)


def test_mumford_table_genus2():
    t = hy.weierstrass_characteristics(2)
    assert t.eta[0] == ThetaCharacteristic((1, 0), (0, 0))
    assert t.eta[1] == ThetaCharacteristic((1, 0), (1, 0))
    assert t.eta[5] == ThetaCharacteristic.zero(2)
    assert t.U == (1, 3, 5)


def test_j_invariants():
    c = hy.HyperellipticCurve(-np.exp(2j * np.pi * np.arange(3) / 3))
    assert abs(hy.j_invariant(hy.period_matrix(c))) < 1e-6
    c = hy.HyperellipticCurve([0, 1, -1])
    assert hy.j_invariant(hy.period_matrix(c)) == pytest.approx(1728, abs=1e-6)


def test_quadrature_order_is_converged(x5):
    curve, pm = x5
    pm2 = hy.period_matrix(curve, 512)
    assert np.abs(pm.omega - pm2.omega).max() < 1e-12


def test_discriminant_exponent():
    assert hy.discriminant_exponent(2) == 48
    assert hy.discriminant_exponent(3) == 4 * 4 * math.comb(6, 2)

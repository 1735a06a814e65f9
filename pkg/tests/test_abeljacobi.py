import math

import numpy as np
import pytest

from arakelov import abeljacobi as aj
from arakelov import invariants as inv
from arakelov.hyperelliptic import CurvePoint, HyperellipticCurve, period_matrix
from arakelov.numerics import agree, combine
from arakelov.theta import theta_norm_many

CFG = aj.MCConfig(samples=16_000, seed=11)


@pytest.fixture(scope="module")
def g2_random():
    rng = np.random.default_rng(21)
    curve = HyperellipticCurve(rng.normal(size=5) + 1j * rng.normal(size=5))
    return curve, period_matrix(curve)


def test_sigma_sums_to_zero(x7):
    curve, pm = x7
    rng = np.random.default_rng(0)
    x = rng.normal(size=40) * 1.5 + 1j * rng.normal(size=40)
    y = np.sqrt(curve.f(x))
    s = aj.aj_many(pm, x, y) + aj.aj_many(pm, x, -y)
    assert aj.lattice_residual(pm, s).max() < 1e-10


def test_weierstrass_images(g2_random):
    curve, pm = g2_random
    for j in range(5):
        v = aj.aj_point(curve, pm, CurvePoint(curve.branch[j], 0j), start="inf", order=400)
        assert aj.lattice_residual(pm, v - pm.half_period(pm.weierstrass_chars[j]))[0] < 1e-6


def test_path_refinement_and_start_independence(g2_random):
    curve, pm = g2_random
    P = curve.point(0.4 + 0.9j)
    auto = aj.aj_point(curve, pm, P)
    for order in (300, 600):
        v = aj.aj_point(curve, pm, P, start="inf", order=order)
        assert aj.lattice_residual(pm, v - auto)[0] < 1e-8


def test_theta_of_divisor(x5):
    curve, pm = x5
    assert aj.theta_of_divisor(curve, pm, [(CurvePoint.infinity(), 1)]) == -np.inf
    with pytest.raises(aj.WrongDegree):
        aj.theta_of_divisor(curve, pm, [(CurvePoint.infinity(), 2)])
    P = curve.point(0.3 + 0.2j)
    Q = curve.point(-0.7 + 0.1j)
    a = aj.theta_of_divisor(curve, pm, [(Q, 1)])
    b = aj.theta_of_divisor(curve, pm, [(Q, 1)], shift=(P, P))
    assert a == b
    # W_1 + W_2 - W_3 against the half-period table
    D = [(curve.weierstrass(1), 1), (curve.weierstrass(2), 1), (curve.weierstrass(3), -1)]
    z = pm.half_period(pm.char_of([1, 2, 3]) + pm.K)
    assert aj.theta_of_divisor(curve, pm, D) == pytest.approx(
        theta_norm_many(pm, z[None])[0][0], abs=1e-6)


def test_mu_self_normalisation(x5):
    _, pm = x5
    s = aj.mu_sampler(pm)
    x = s._propose(np.random.default_rng(2), 200_000)
    r = s.ratio(x)
    assert abs(r.mean() - 1) <= 3 * r.std() / math.sqrt(r.size)


def test_envelope_too_small(x5):
    _, pm = x5
    s = aj.MuSampler(pm, pilot=2000)
    s.M = 1e-3
    with pytest.raises(aj.EnvelopeTooSmall):
        s.sample(np.random.default_rng(0), 100)


def test_sample_mu_points_on_curve(x5):
    curve, pm = x5
    out = aj.sample_mu(curve, pm, np.random.default_rng(1), size=20)
    assert all(m.point.on_curve(curve) and m.density > 0 for m in out)


def test_cb_weight_k1_is_one(x5):
    curve, pm = x5
    assert aj.cb_weight(curve, pm, [curve.point(0.2 + 0.1j)]) == pytest.approx(1.0)


def test_cb_weight_is_pullback_density(x5):
    """g^k w rho_1 rho_2 equals det(Y^-1)|det U|^2/(|f_1||f_2|) up to k!."""
    curve, pm = x5
    x = np.array([[0.3 + 0.4j, -1.1 + 0.2j], [2.0 - 0.5j, 0.1j]])
    w = aj.cb_weights(pm, x)
    rho = aj.mu_density(pm, x)
    U = aj._differential_rows(pm, x)
    direct = (np.abs(np.linalg.det(U)) ** 2 / np.linalg.det(pm.Y)
              / np.prod(np.abs(curve.f(x)), axis=1))
    assert np.allclose(4 * w * rho.prod(axis=1), 2 * direct)


def test_cb_mass(x5):
    curve, pm = x5
    e = aj.cb_mass(curve, pm, 2, CFG)
    assert abs(e.value - 1) <= 3 * e.stderr


def test_green_symmetry_and_errors(x5):
    curve, pm = x5
    P, Q = curve.point(0.3 + 0.5j), curve.point(-1.2 + 0.4j, -1)
    a = aj.theta_divisor_integral(curve, pm, P, Q, CFG)
    b = aj.theta_divisor_integral(curve, pm, Q, P, aj.MCConfig(16_000, seed=12))
    assert agree(a, b)
    with pytest.raises(aj.CoincidentPoints):
        aj.green(curve, pm, P, P, CFG, A=inv.closed_forms(pm, samples=4096)["A"])


def test_S1_independent_of_Q(x5):
    curve, pm = x5
    a = aj.S_k(curve, pm, 1, Q=curve.point(0.5 + 0.5j), config=CFG)
    b = aj.S_k(curve, pm, 1, Q=curve.point(-2.0 - 0.3j), config=aj.MCConfig(16_000, seed=13))
    assert agree(a, b)


def test_S_k_chain_genus3(x7):
    """(S_1 - S_g)/(S_{g-1} - S_g) = g(g-1)/2; checked as S_1 - S_g - 3(S_2 - S_g) = 0."""
    curve, pm = x7
    S = {k: aj.S_k(curve, pm, k, config=aj.MCConfig(20_000, seed=30 + k)) for k in (1, 2, 3)}
    r = combine([(1.0, S[1]), (-3.0, S[2]), (2.0, S[3])])
    assert abs(r.value) <= 3 * r.stderr


def test_J_integrand_permutation_invariant(x5):
    from arakelov.theta import J_norm_many
    curve, pm = x5
    x = np.array([0.2 + 0.3j, -0.8 + 0.1j])
    a = aj.aj_many(pm, x, np.sqrt(curve.f(x)))
    K = aj.riemann_lift(pm)
    w = K + a.sum(axis=0)[None] - a
    assert J_norm_many(pm, w[None]) == pytest.approx(J_norm_many(pm, w[::-1][None]), abs=1e-10)


def test_genus_one_mu_is_flat():
    from scipy.stats import chisquare
    curve = HyperellipticCurve([0, 1, 0.3 + 1.1j])
    pm = period_matrix(curve)
    x, y = aj.mu_sampler(pm).sample(np.random.default_rng(5), 10_000)
    z = aj.aj_many(pm, x, y)[:, 0]
    q = z.imag / pm.Y[0, 0]
    p = z.real - q * pm.X[0, 0]
    cells = (np.floor(4 * (p % 1)) * 4 + np.floor(4 * (q % 1))).astype(int)
    assert chisquare(np.bincount(cells, minlength=16)).pvalue > 1e-3

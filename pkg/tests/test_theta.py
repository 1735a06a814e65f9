import math

import numpy as np
import pytest

from arakelov.theta import (NotOnTheta, PeriodMatrix, ThetaCharacteristic, all_characteristics,
                            autissier_constant, eta_norm_log, reduce_point, theta_derivs,
                            theta_log, theta_norm_log, theta_norm_many)


def brute_theta(omega, z, a=None, b=None, N=12):
    g = omega.shape[0]
    a = np.zeros(g) if a is None else a
    b = np.zeros(g) if b is None else b
    tot = 0j
    for n in np.ndindex(*([2 * N + 1] * g)):
        v = np.array(n) - N + a
        tot += np.exp(1j * np.pi * v @ omega @ v + 2j * np.pi * v @ (z + b))
    return tot


@pytest.fixture
def pm2():
    return PeriodMatrix(np.array([[0.3 + 1.2j, 0.1 + 0.2j], [0.1 + 0.2j, -0.2 + 1.0j]]))


def test_square_lattice_value():
    # |theta|(i; 0) = pi^(1/4) / Gamma(3/4)
    pm = PeriodMatrix([[1j]])
    assert abs(theta_log(pm, np.zeros(1)).value()) == pytest.approx(1.0864348112133082, abs=1e-14)
    assert math.pi ** 0.25 / math.gamma(0.75) == pytest.approx(1.0864348112133082, abs=1e-14)


def test_matches_brute_force(pm2):
    z = np.array([0.2 - 0.1j, -0.3 + 0.4j])
    assert theta_log(pm2, z).value() == pytest.approx(brute_theta(pm2.omega, z), abs=1e-11)
    c = ThetaCharacteristic((1, 0), (1, 1))
    assert theta_log(pm2, z, c).value() == pytest.approx(
        brute_theta(pm2.omega, z, c.a, c.b), abs=1e-11)


def test_even_and_odd(pm2):
    z = np.array([0.17 + 0.05j, -0.2 + 0.1j])
    for c in all_characteristics(2):
        s = 1 - 2 * c.parity
        assert theta_log(pm2, -z, c).value() == pytest.approx(s * theta_log(pm2, z, c).value(),
                                                               abs=1e-12)
    odd = [c for c in all_characteristics(2) if c.parity]
    assert len(odd) == 6
    assert theta_norm_log(pm2, np.zeros(2), odd[0]) == -np.inf


def test_norm_is_lattice_invariant(pm2):
    rng = np.random.default_rng(1)
    z = rng.normal(size=(10, 2)) + 1j * rng.normal(size=(10, 2))
    a, _ = theta_norm_many(pm2, z)
    b, _ = theta_norm_many(pm2, z + pm2.omega @ np.array([2, -1]) + np.array([1, 3]))
    assert np.allclose(a, b, atol=1e-10)


def test_reduce_point_round_trip(pm2):
    z = np.array([3.3 + 2.1j, -1.2 - 0.7j])
    r = reduce_point(pm2, z)
    d = z - r.lift(pm2)
    q = np.linalg.solve(pm2.Y, d.imag)
    p = d.real - pm2.X @ q
    assert np.allclose(q, np.rint(q)) and np.allclose(p, np.rint(p))


def test_derivatives_against_finite_differences(pm2):
    z = np.array([0.1 + 0.2j, 0.3 - 0.1j])
    grad, hess = theta_derivs(pm2, z, eps=1e-14)
    h = 1e-5
    for j in range(2):
        e = np.eye(2)[j] * h
        fd = (theta_log(pm2, z + e, eps=1e-14).value() - theta_log(pm2, z - e, eps=1e-14).value()) / (2 * h)
        assert abs(fd - grad[j]) < 1e-7 * max(1, abs(grad[j]))
        fdh = (theta_derivs(pm2, z + e, eps=1e-14)[0] - theta_derivs(pm2, z - e, eps=1e-14)[0]) / (2 * h)
        assert np.abs(fdh - hess[:, j]).max() < 1e-6 * max(1, np.abs(hess).max())


def test_eta_needs_theta_divisor(pm2):
    with pytest.raises(NotOnTheta):
        eta_norm_log(pm2, np.zeros(2))


def test_characteristic_arithmetic():
    c = ThetaCharacteristic((1, 0), (1, 1))
    assert str(c) == "[10;11]/2" and c.parity == 1
    assert c + c == ThetaCharacteristic.zero(2)
    assert len(list(all_characteristics(3))) == 64


def test_autissier_constants():
    assert autissier_constant(1) == 1.5
    assert autissier_constant(3) == 2.5
    assert autissier_constant(4) == pytest.approx(3 * (6 / (math.pi * math.sqrt(3))) ** 2)


def test_rejects_bad_omega():
    with pytest.raises(ValueError):
        PeriodMatrix([[1j, 0.5], [0.2, 1j]])

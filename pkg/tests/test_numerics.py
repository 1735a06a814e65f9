import numpy as np
import pytest

from arakelov.numerics import (AllCensored, Estimate, NotPositiveDefinite, SampleStream,
                               agree, batched_mean, batched_means, cholesky, combine,
                               integrate)


def test_cholesky_matches_numpy():
    rng = np.random.default_rng(0)
    A = rng.normal(size=(4, 4))
    Y = A @ A.T + np.eye(4)
    f = cholesky(Y)
    assert np.allclose(f.L, np.linalg.cholesky(Y))
    assert np.isclose(f.logdet, np.linalg.slogdet(Y)[1])


def test_cholesky_rejects_indefinite():
    with pytest.raises(NotPositiveDefinite):
        cholesky(np.diag([1.0, -1.0]))
    with pytest.raises(ValueError):
        cholesky(np.array([[1.0, 0.5], [0.0, 1.0]]))


def test_combine_adds_in_quadrature():
    a = Estimate(1.0, 0.3, 10, 1)
    b = Estimate(2.0, 0.4, 10, 2)
    c = combine([(2.0, a), (-1.0, b)], 1.0)
    assert c.value == pytest.approx(1.0)
    assert c.stderr == pytest.approx(np.hypot(0.6, 0.4))
    assert agree(a, Estimate(1.5, 0.0, 1, 0))
    assert not agree(a, Estimate(2.5, 0.0, 1, 0))


@pytest.mark.parametrize("kind", ["pseudo", "low-discrepancy"])
def test_integrate_polynomial(kind):
    est = integrate(lambda u: u[:, 0] * u[:, 1] ** 2, 2, 2 ** 14, seed=3, kind=kind)
    assert abs(est.value - 1 / 6) <= 3 * est.stderr + 1e-12
    again = integrate(lambda u: u[:, 0] * u[:, 1] ** 2, 2, 2 ** 14, seed=3, kind=kind)
    assert again.value == est.value


def test_rqmc_beats_pseudo_on_smooth_integrand():
    f = lambda u: np.cos(2 * np.pi * u[:, 0]) * u[:, 1]
    q = integrate(f, 2, 2 ** 14, seed=1, kind="low-discrepancy")
    p = integrate(f, 2, 2 ** 14, seed=1, kind="pseudo")
    assert q.stderr < p.stderr


def test_thread_count_does_not_change_result(monkeypatch):
    def draw(seed, n):
        return np.random.default_rng(seed).normal(size=n)

    monkeypatch.setenv("ARAKELOV_THREADS", "1")
    a = batched_mean(draw, 1000, 5)
    monkeypatch.setenv("ARAKELOV_THREADS", "4")
    b = batched_mean(draw, 1000, 5)
    assert a.value == b.value and a.stderr == b.stderr


def test_all_censored_raises():
    with pytest.raises(AllCensored):
        batched_mean(lambda s, n: (np.zeros(n), np.ones(n, bool)), 64, 0)


def test_nonfinite_values_are_censored():
    def draw(seed, n):
        v = np.ones(n)
        v[0] = -np.inf
        return v

    est = batched_mean(draw, 64, 0)
    assert est.censored == 16 and est.value == 1.0


def test_batched_means_columns_match_single():
    def draw(seed, n):
        x = np.random.default_rng(seed).random(n)
        return np.column_stack([x, 2 * x])

    a, b = batched_means(draw, 2, 512, 9)
    assert b.value == pytest.approx(2 * a.value)


def test_sample_stream_validation():
    with pytest.raises(ValueError):
        SampleStream(2, 0, "bogus")
    s = SampleStream(3, 7).take(8)
    assert s.shape == (8, 3) and np.all((s >= 0) & (s < 1))

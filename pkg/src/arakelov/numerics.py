"""Dense linear algebra helpers and a seeded Monte Carlo engine.

Every estimator in the package goes through :func:`batched_mean`. Samples are
split into ``batches`` slices, each driven by its own child seed of a
:class:`numpy.random.SeedSequence`, so the batch means are independent.
Randomised QMC batches get the batch-means standard error; plain
pseudo-random samples get the pooled one.
"""
from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc


class NotPositiveDefinite(ValueError):
    pass


class AllCensored(RuntimeError):
    pass


@dataclass(frozen=True)
class PDFactorization:
    L: np.ndarray
    logdet: float

    @property
    def dim(self):
        return self.L.shape[0]


def cholesky(Y):
    """Cholesky factor of a real symmetric positive definite matrix.

    Raises NotPositiveDefinite when a pivot is not positive, which for a
    period matrix means Im(Omega) is not a valid polarisation.
    """
    Y = np.asarray(Y, dtype=float)
    if Y.ndim != 2 or Y.shape[0] != Y.shape[1]:
        raise ValueError("square matrix expected")
    scale = max(1.0, float(np.max(np.abs(Y))))
    if np.max(np.abs(Y - Y.T)) > 1e-10 * scale:
        raise ValueError("matrix is not symmetric")
    Y = 0.5 * (Y + Y.T)
    n = Y.shape[0]
    L = np.zeros_like(Y)
    for j in range(n):
        d = Y[j, j] - L[j, :j] @ L[j, :j]
        if not d > 0:
            raise NotPositiveDefinite(f"pivot {j} is {d:.3e}")
        L[j, j] = math.sqrt(d)
        L[j + 1:, j] = (Y[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]) / L[j, j]
    return PDFactorization(L, 2.0 * float(np.sum(np.log(np.diag(L)))))


@dataclass
class Estimate:
    value: float
    stderr: float
    samples: int
    seed: int
    censored: int = 0
    batch_means: np.ndarray | None = field(default=None, repr=False)

    def __add__(self, other):
        return combine([(1.0, self), (1.0, other)])

    def __sub__(self, other):
        return combine([(1.0, self), (-1.0, other)])

    def scaled(self, c, shift=0.0):
        bm = None if self.batch_means is None else c * self.batch_means + shift
        return Estimate(c * self.value + shift, abs(c) * self.stderr,
                        self.samples, self.seed, self.censored, bm)

    def as_dict(self):
        return {"value": self.value, "stderr": self.stderr,
                "samples": self.samples, "seed": self.seed,
                "censored": self.censored}


def exact(value):
    return Estimate(float(value), 0.0, 0, 0)


def combine(terms, const=0.0):
    """Linear combination of independent estimates, stderrs added in quadrature."""
    value = const + sum(c * e.value for c, e in terms)
    err = math.sqrt(sum((c * e.stderr) ** 2 for c, e in terms))
    return Estimate(value, err, sum(e.samples for _, e in terms),
                    terms[0][1].seed if terms else 0,
                    sum(e.censored for _, e in terms))


def agree(a, b, nsigma=3.0, floor=0.0):
    """True when two estimates differ by at most nsigma combined stderrs."""
    return abs(a.value - b.value) <= nsigma * math.hypot(a.stderr, b.stderr) + floor


def thread_count():
    try:
        n = int(os.environ.get("ARAKELOV_THREADS", "1"))
    except ValueError:
        n = 1
    return max(1, n)


class SampleStream:
    """Deterministic stream of points in [0,1)^dim.

    ``kind="pseudo"`` uses PCG64, ``kind="low-discrepancy"`` a scrambled Sobol
    sequence whose scramble is drawn from the seed.
    """

    def __init__(self, dim, seed, kind="low-discrepancy"):
        if dim < 1:
            raise ValueError("dim must be positive")
        self.dim, self.seed, self.kind = dim, seed, kind
        if kind == "pseudo":
            self._rng = np.random.Generator(np.random.PCG64(seed))
        elif kind == "low-discrepancy":
            self._sobol = qmc.Sobol(dim, scramble=True,
                                    seed=np.random.Generator(np.random.PCG64(seed)))
        else:
            raise ValueError(f"unknown stream kind {kind!r}")

    def take(self, n):
        if self.kind == "pseudo":
            return self._rng.random((n, self.dim))
        # balance is best at powers of two but any n is a valid draw
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            return self._sobol.random(n)


def sample_stream(dim, seed, kind="low-discrepancy"):
    return SampleStream(dim, seed, kind)


def child_seeds(seed, n):
    ss = np.random.SeedSequence(seed)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in ss.spawn(n)]


def _unpack(out, shape):
    if isinstance(out, tuple):
        vals, cens = out
        vals = np.asarray(vals, dtype=float)
        cens = np.asarray(cens, dtype=bool)
    else:
        vals = np.asarray(out, dtype=float)
        cens = np.zeros(vals.shape, dtype=bool)
    if vals.shape != shape:
        raise ValueError("integrand must return one value per sample")
    cens = np.broadcast_to(cens, shape)
    bad = ~np.isfinite(vals)
    if bad.any():
        # a -inf with no floor attached: fall back to the smallest finite value
        cens = cens | bad
        fin = vals[~bad]
        vals = np.where(bad, fin.min() if fin.size else -np.inf, vals)
    return vals, cens


def batched_means(draw, m, samples, seed, batches=16, iid=False):
    """Like :func:`batched_mean` for ``m`` integrands evaluated on shared samples.

    ``draw(seed_b, n_b)`` returns an (n_b, m) array, optionally with a mask.
    """
    if batches < 2:
        raise ValueError("need at least two batches for a stderr")
    sizes = [samples // batches + (1 if b < samples % batches else 0)
             for b in range(batches)]
    seeds = child_seeds(seed, batches)

    def run(b):
        return _unpack(draw(seeds[b], sizes[b]), (sizes[b], m))

    nt = min(thread_count(), batches)
    if nt > 1:
        with ThreadPoolExecutor(nt) as ex:
            results = list(ex.map(run, range(batches)))
    else:
        results = [run(b) for b in range(batches)]
    out = []
    w = np.array(sizes, dtype=float)
    for j in range(m):
        censored = int(sum(c[:, j].sum() for _, c in results))
        if censored == samples:
            raise AllCensored("every sample hit the censoring floor")
        means = np.array([v[:, j].mean() for v, _ in results])
        total = np.concatenate([v[:, j] for v, _ in results])
        value = float(total.mean())
        if np.ptp(total) == 0.0:
            err = 0.0
        elif iid:
            # independent samples: the pooled standard error is far less noisy
            err = float(total.std(ddof=1) / math.sqrt(total.size))
        else:
            err = float(np.sqrt(np.sum(w * (means - value) ** 2) / (w.sum() * (batches - 1))))
        out.append(Estimate(value, err, samples, seed, censored, means))
    return out


def batched_mean(draw, samples, seed, batches=16, iid=False):
    """Mean of ``draw(seed_b, n_b)`` over independent batches.

    ``draw`` returns per-sample values, optionally paired with a boolean
    censoring mask. Batches run on up to ARAKELOV_THREADS threads; the
    reduction order is fixed so results do not depend on the thread count.
    With ``iid=True`` (plain pseudo-random samples) the stderr is the pooled
    one, otherwise it comes from the spread of the batch means.
    """
    def draw2(s, n):
        out = draw(s, n)
        if isinstance(out, tuple):
            return np.asarray(out[0])[:, None], np.asarray(out[1])[:, None]
        return np.asarray(out)[:, None]

    return batched_means(draw2, 1, samples, seed, batches, iid)[0]


def integrate(f, dim, samples=200_000, seed=42, kind="low-discrepancy", batches=16):
    """Monte Carlo mean of ``f`` over [0,1)^dim.

    ``f`` maps an (n, dim) array to n values (or ``(values, censored)``).
    """
    def draw(s, n):
        return f(SampleStream(dim, s, kind).take(n))

    return batched_mean(draw, samples, seed, batches, iid=kind == "pseudo")

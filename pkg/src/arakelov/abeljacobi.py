"""Abel-Jacobi maps, the canonical measure mu, and curve integrals.

All Abel-Jacobi images use the point at infinity as base point.  A point is
reached by a straight path either from infinity (in the coordinate
t = x^{-1/2}) or from the finite branch point whose path keeps the other
branch points furthest away, measured by the Bernstein ellipse of the
quadrature interval.  Branch point images are exact half periods, so starting
there costs nothing.

Samples from mu come from rejection sampling against a mixture proposal with
local components at every branch point and at infinity, where mu has its
1/|x-a| and |x|^-3 behaviour.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .hyperelliptic import CurvePoint, rot_sqrt
from .numerics import batched_mean, batched_means, combine
from .theta import J_norm_many, eta_norm_many, theta_norm_many


class PathClearanceFailure(RuntimeError):
    pass


class WrongDegree(ValueError):
    pass


class CoincidentPoints(ValueError):
    pass


class EnvelopeTooSmall(RuntimeError):
    pass


@dataclass
class MCConfig:
    samples: int = 20_000
    seed: int = 42
    batches: int = 16
    eps: float = 1e-10


# ---------------------------------------------------------------- quadrature

@lru_cache(maxsize=None)
def _gl(n):
    u, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (u + 1.0), 0.5 * w


def _bernstein(s):
    """Bernstein parameter of singularities s (in [0,1] coordinates)."""
    z = 2.0 * np.asarray(s, complex) - 1.0
    r = z + np.sqrt(z - 1) * np.sqrt(z + 1)
    return np.maximum(np.abs(r), 1.0 / np.maximum(np.abs(r), 1e-300))


_ORDERS = (12, 16, 24, 32, 48, 64, 96, 128)


def _rule(rho, panels):
    """Composite Gauss-Legendre nodes on [0,1]."""
    need = 18.0 / math.log(max(rho, 1.0001))
    n = next((o for o in _ORDERS if o >= need), _ORDERS[-1])
    u, w = _gl(n)
    edges = np.linspace(0, 1, panels + 1)
    nodes = (edges[:-1, None] + (edges[1:] - edges[:-1])[:, None] * u).ravel()
    weights = ((edges[1:] - edges[:-1])[:, None] * w).ravel()
    return nodes, weights


def _panel_rho(sing, panels):
    """Smallest Bernstein parameter over equal panels of [0,1]."""
    best = np.inf
    for p in range(panels):
        lo, hi = p / panels, (p + 1) / panels
        best = min(best, float(np.min(_bernstein((sing - lo) / (hi - lo)))))
    return best


def _plan(sing):
    panels = 1
    rho = _panel_rho(sing, 1)
    while rho < 1.4 and panels < 64:
        panels *= 2
        rho = _panel_rho(sing, panels)
    return rho, panels


# ---------------------------------------------------------------- Abel-Jacobi

def _singular_u(curve, c, x):
    """Other branch points seen from branch point c in the u variable, x = a_c + (x-a_c)u^2."""
    a = curve.branch
    D = x - a[c]
    others = np.delete(a, c)
    r = np.sqrt((others - a[c]) / D)
    return np.concatenate([r, -r])


def _singular_s(curve, x):
    tP = 1.0 / np.sqrt(x)
    b = np.sqrt(curve.branch.astype(complex))
    b = b[np.abs(b) > 0]
    r = 1.0 / (b * tP)
    return np.concatenate([r, -r])


def _plans(curve, x):
    """Start (-1 for infinity, else branch index), Bernstein rho and panel count per point."""
    n = x.size
    a = curve.branch
    cands = []
    with np.errstate(divide="ignore", invalid="ignore"):
        b = np.sqrt(a.astype(complex))
        b = b[np.abs(b) > 0]
        s = 1.0 / (b[None, :] * (1.0 / np.sqrt(x))[:, None])
        cands.append(np.min(_bernstein(np.concatenate([s, -s], axis=1)), axis=1))
        for c in range(a.size):
            r = np.sqrt((np.delete(a, c)[None, :] - a[c]) / (x - a[c])[:, None])
            cands.append(np.min(_bernstein(np.concatenate([r, -r], axis=1)), axis=1))
    rhos = np.nan_to_num(np.array(cands), nan=0.0)
    best = np.argmax(rhos, axis=0)
    start = best - 1
    rho = rhos[best, np.arange(n)]
    panels = np.ones(n, dtype=int)
    at_branch = np.abs(x[:, None] - a[None, :]) < 1e-300
    hit = at_branch.any(axis=1)
    start[hit] = np.argmax(at_branch[hit], axis=1)
    rho[hit] = np.inf
    for i in np.flatnonzero(rho < 1.4):
        sing = _singular_s(curve, x[i]) if start[i] < 0 else _singular_u(curve, start[i], x[i])
        rho[i], panels[i] = _plan(sing)
        if panels[i] >= 64 and rho[i] < 1.05:
            raise PathClearanceFailure(f"no clear path to x = {x[i]}")
    return start, rho, panels


def _from_branch(curve, pm, c, x, y, nodes, weights):
    """int from a_c to (x, y) of x^j dx / y for many endpoints (vectorised)."""
    g = curve.g
    a = curve.branch
    D = x - a[c]
    s0 = np.sqrt(D)
    X = a[c] + D[:, None] * nodes[None, :] ** 2
    mid = 0.5 * (a[c] + x)
    others = np.delete(np.arange(a.size), c)
    R = np.ones_like(X)
    for j in others:
        d = mid - a[j]
        d = d / np.abs(d)
        R = R * rot_sqrt(X - a[j], d[:, None])
    pw = X[:, None, :] ** np.arange(g)[None, :, None]
    I = 2.0 * s0[:, None] * np.sum(pw / R[:, None, :] * weights, axis=2)
    yend = s0 * _R_at_end(a, c, x, mid)
    flip = np.abs(yend - y) > np.abs(yend + y)
    I[flip] *= -1
    return I


def _R_at_end(a, c, x, mid):
    R = np.ones_like(x)
    for j in range(a.size):
        if j == c:
            continue
        d = mid - a[j]
        R = R * rot_sqrt(x - a[j], d / np.abs(d))
    return R


def _Pi(b, t):
    out = np.ones_like(t)
    for bj in b:
        out = out * np.sqrt(1 - bj * t) * np.sqrt(1 + bj * t)
    return out


def _from_infinity(curve, pm, x, y, nodes, weights, singular_end=False):
    g = curve.g
    b = np.sqrt(curve.branch.astype(complex))
    tP = 1.0 / np.sqrt(x)
    yP = tP ** (-(2 * g + 1)) * _Pi(b, tP)
    tP = np.where(np.abs(yP - y) > np.abs(yP + y), -tP, tP)
    if singular_end:
        # s = 1 - v^2 smooths the inverse square root at a branch endpoint
        s = 1.0 - nodes ** 2
        wts = 2.0 * nodes * weights
    else:
        s, wts = nodes, weights
    t = tP[:, None] * s[None, :]
    P = _Pi(b, t)
    k = np.arange(1, g + 1)
    expo = 2 * g - 2 * k
    num = -2.0 * tP[:, None] ** (expo + 1)[None, :]
    sp = s[None, :] ** expo[:, None]
    return num * np.sum(sp[None, :, :] / P[:, None, :] * wts, axis=2)


def _branch_shift(pm, c):
    return pm.half_period(pm.weierstrass_chars[c])


def aj_many(pm, x, y):
    """Abel-Jacobi images from infinity of finite points (x_i, y_i)."""
    curve = pm.curve
    x = np.atleast_1d(np.asarray(x, complex))
    y = np.atleast_1d(np.asarray(y, complex))
    out = np.empty((x.size, curve.g), complex)
    start, rho, panels = _plans(curve, x)
    groups = {}
    for i in range(x.size):
        if rho[i] == np.inf:
            out[i] = _branch_shift(pm, start[i])
            continue
        nodes, weights = _rule(rho[i], panels[i])
        key = (int(start[i]), nodes.size, int(panels[i]))
        groups.setdefault(key, (nodes, weights, []))[2].append(i)
    for (st, _, _), (nodes, weights, idx) in groups.items():
        idx = np.array(idx)
        if st < 0:
            I = _from_infinity(curve, pm, x[idx], y[idx], nodes, weights)
            out[idx] = I @ pm.PA_inv.T
        else:
            I = _from_branch(curve, pm, st, x[idx], y[idx], nodes, weights)
            out[idx] = _branch_shift(pm, st) + I @ pm.PA_inv.T
    return out


def aj_point(curve, pm, P, start=None, order=200):
    """Abel-Jacobi image of one point from infinity.

    ``start`` forces the path: "inf" or a 0-based branch index.  A forced
    path from infinity to a Weierstrass point integrates its endpoint
    singularity numerically, which gives an independent check of the
    half-period table.
    """
    if P.at_infinity:
        return np.zeros(curve.g, complex)
    if start is None:
        return aj_many(pm, [P.x], [P.y])[0]
    x, y = np.array([P.x]), np.array([P.y])
    nodes, weights = _gl(order)
    if start == "inf":
        singular = bool(np.min(np.abs(curve.branch - P.x)) < 1e-12)
        I = _from_infinity(curve, pm, x, y, nodes, weights, singular_end=singular)
        return (I @ pm.PA_inv.T)[0]
    I = _from_branch(curve, pm, start, x, y, nodes, weights)
    return (_branch_shift(pm, start) + I @ pm.PA_inv.T)[0]


def lattice_residual(pm, dz):
    """Distance of dz from the lattice Z^g + Omega Z^g, in lattice coordinates."""
    dz = np.atleast_2d(dz)
    q = dz.imag @ pm.Yinv
    p = (dz - q @ pm.omega).real
    return np.max(np.abs(np.column_stack([p - np.rint(p), q - np.rint(q)])), axis=1)


def riemann_lift(pm):
    return pm.half_period(pm.K)


def theta_of_divisor(curve, pm, D, shift=None, eps=1e-10):
    """log||theta|| of a degree g-1 divisor given as [(CurvePoint, mult), ...]."""
    deg = sum(m for _, m in D)
    if deg != curve.g - 1:
        raise WrongDegree(f"degree {deg}, expected {curve.g - 1}")
    z = riemann_lift(pm).copy()
    for P, m in D:
        z = z + m * aj_point(curve, pm, P)
    if shift is not None:
        P, Q = shift
        z = z + aj_point(curve, pm, P) - aj_point(curve, pm, Q)
    vals, cens = theta_norm_many(pm, z[None], None, eps)
    return -np.inf if cens[0] else float(vals[0])


# ---------------------------------------------------------------- mu

def _differential_rows(pm, x):
    x = np.asarray(x, complex)
    pw = x[..., None] ** np.arange(pm.g)
    return pw @ pm.PA_inv.T


def mu_density(pm, x):
    """Density of mu on one sheet with respect to area in the x-plane."""
    U = _differential_rows(pm, x)
    q = np.einsum("...j,jk,...k->...", U, pm.Yinv, U.conj()).real
    return q / (pm.g * np.abs(pm.curve.f(x)))


class MuSampler:
    """Rejection sampler for mu on a hyperelliptic curve."""

    def __init__(self, pm, pilot=100_000, safety=2.0, seed=12345):
        self.pm = pm
        a = pm.curve.branch
        self.a = a
        self.R0 = max(1.0, float(np.max(np.abs(a))))
        self.s_loc = math.sqrt(0.25 * pm.curve.min_gap)
        self.s_inf = 1.0 / math.sqrt(2.0 * self.R0)
        n = a.size
        self.mix = np.array([0.4 / n] * n + [0.2, 0.4])
        rng = np.random.Generator(np.random.PCG64(seed))
        xs = self._propose(rng, pilot)
        self.M = safety * float(np.max(self.ratio(xs)))

    def _propose(self, rng, n):
        comp = rng.choice(self.mix.size, size=n, p=self.mix)
        w = (rng.normal(size=n) + 1j * rng.normal(size=n))
        x = np.empty(n, complex)
        na = self.a.size
        loc = comp < na
        x[loc] = self.a[comp[loc]] + (self.s_loc * w[loc]) ** 2
        inf = comp == na
        x[inf] = 1.0 / (self.s_inf * w[inf]) ** 2
        bulk = comp == na + 1
        # uniform on the Riemann sphere of radius R0 via stereographic projection
        u = rng.random(bulk.sum())
        phi = 2 * np.pi * rng.random(bulk.sum())
        r = self.R0 * np.sqrt(u / (1 - u))
        x[bulk] = r * np.exp(1j * phi)
        return x

    def proposal_density(self, x):
        """Density in the x-plane of the mixture proposal."""
        x = np.asarray(x, complex)
        out = np.zeros(x.shape)
        def gauss(w2, s):
            return np.exp(-w2 / (2 * s * s)) / (2 * np.pi * s * s)

        for k, a in enumerate(self.a):
            d = np.abs(x - a)
            out += self.mix[k] * gauss(d, self.s_loc) / (2.0 * np.maximum(d, 1e-300))
        ax = np.abs(x)
        w2 = 1.0 / np.maximum(ax, 1e-300)
        out += self.mix[-2] * gauss(w2, self.s_inf) * w2 ** 3 / 2.0
        out += self.mix[-1] / (np.pi * self.R0 ** 2) / (1 + (ax / self.R0) ** 2) ** 2
        return out

    def ratio(self, x):
        """mu density per sheet over proposal density per sheet."""
        return mu_density(self.pm, x) / (0.5 * self.proposal_density(x))

    def sample(self, rng, n):
        """n points distributed as mu: returns (x, y)."""
        xs, got = [], 0
        while got < n:
            m = max(64, int(1.3 * (n - got) * self.M) + 16)
            x = self._propose(rng, m)
            r = self.ratio(x)
            if np.any(r > self.M):
                raise EnvelopeTooSmall(f"ratio {r.max():.3g} above envelope {self.M:.3g}")
            keep = rng.random(m) * self.M < r
            xs.append(x[keep])
            got += keep.sum()
        x = np.concatenate(xs)[:n]
        sheet = np.where(rng.random(n) < 0.5, 1.0, -1.0)
        y = sheet * np.sqrt(self.pm.curve.f(x))
        return x, y


@dataclass
class MuSample:
    point: CurvePoint
    density: float


def mu_sampler(pm):
    s = getattr(pm, "_mu_sampler", None)
    if s is None:
        s = MuSampler(pm)
        pm._mu_sampler = s
    return s


def sample_mu(curve, pm, rng, size=None):
    s = mu_sampler(pm)
    n = 1 if size is None else size
    x, y = s.sample(rng, n)
    dens = mu_density(pm, x)
    if size is None:
        return MuSample(CurvePoint(complex(x[0]), complex(y[0])), float(dens[0]))
    return [MuSample(CurvePoint(complex(a), complex(b)), float(d)) for a, b, d in zip(x, y, dens)]


def _mu_points(pm, rng, n, k):
    """n tuples of k mu-distributed points: x, y, AJ arrays of shape (n, k[, g])."""
    x, y = mu_sampler(pm).sample(rng, n * k)
    aj = aj_many(pm, x, y)
    return x.reshape(n, k), y.reshape(n, k), aj.reshape(n, k, pm.g)


def cb_weights(pm, x):
    """Cauchy-Binet weights k! det(N N*) with row-normalised N, for x of shape (n, k)."""
    x = np.atleast_2d(np.asarray(x, complex))
    k = x.shape[1]
    U = _differential_rows(pm, x)
    G = np.einsum("nij,jl,nkl->nik", U, pm.Yinv, U.conj())
    d = np.sqrt(np.einsum("nii->ni", G).real)
    G = G / (d[:, :, None] * d[:, None, :])
    return math.factorial(k) * np.linalg.det(G).real


def cb_weight(curve, pm, points):
    x = np.array([[P.x for P in points]])
    return float(cb_weights(pm, x)[0])


# ---------------------------------------------------------------- integrals

def _rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def default_Q(curve):
    """A fixed generic point used when no Q is supplied."""
    x = complex(np.mean(curve.branch)) + (0.3141592653589793 + 0.2718281828459045j) * max(
        1.0, float(np.max(np.abs(curve.branch))))
    return curve.point(x, 1)


def _aj1(pm, P):
    if P.at_infinity:
        return np.zeros(pm.g, complex)
    return aj_many(pm, [P.x], [P.y])[0]


def S_k(curve, pm, k, Q=None, config=None):
    """mu^k average of log||theta||((g-k+1)P_1 + P_2 + ... + P_k - Q)."""
    cfg = config or MCConfig()
    g = pm.g
    if not 1 <= k <= g:
        raise ValueError("1 <= k <= g required")
    Q = Q or default_Q(curve)
    base = riemann_lift(pm) - _aj1(pm, Q)

    def draw(seed, n):
        _, _, aj = _mu_points(pm, _rng(seed), n, k)
        z = base + (g - k + 1) * aj[:, 0] + aj[:, 1:].sum(axis=1)
        return theta_norm_many(pm, z, None, cfg.eps)

    return batched_mean(draw, cfg.samples, cfg.seed, cfg.batches, iid=True)


def B_invariant(curve, pm, config=None):
    """mu^g average of log||J||(P_1, ..., P_g)."""
    cfg = config or MCConfig()
    g = pm.g
    K = riemann_lift(pm)

    def draw(seed, n):
        _, _, aj = _mu_points(pm, _rng(seed), n, g)
        tot = aj.sum(axis=1)
        w = K + tot[:, None, :] - aj
        vals = J_norm_many(pm, w, cfg.eps)
        return vals, ~np.isfinite(vals)

    return batched_mean(draw, cfg.samples, cfg.seed, cfg.batches, iid=True)


def lambda_jacobian(curve, pm, config=None):
    """Lambda: average of log||eta|| over the theta divisor, parametrised by X^(g-1)."""
    cfg = config or MCConfig()
    g = pm.g
    if g < 2:
        raise ValueError("Lambda needs g >= 2")
    K = riemann_lift(pm)
    c = g ** (g - 1) / (math.factorial(g - 1) * math.factorial(g))

    def draw(seed, n):
        x, _, aj = _mu_points(pm, _rng(seed), n, g - 1)
        z = K + aj.sum(axis=1)
        vals = eta_norm_many(pm, z, cfg.eps, guard=None)
        w = cb_weights(pm, x)
        cens = ~np.isfinite(vals)
        return c * np.where(cens, 0.0, vals) * w, cens

    return batched_mean(draw, cfg.samples, cfg.seed, cfg.batches, iid=True)


def _inner_const(g):
    return g ** (g - 1) / (math.factorial(g) * math.factorial(g - 1))


def theta_divisor_integrals(curve, pm, shifts, config=None):
    """(1/g!) int over Theta + s of log||theta|| nu^(g-1), for each shift s.

    One set of Theta samples serves every shift, so the estimates are
    individually valid but correlated with each other.
    """
    cfg = config or MCConfig()
    g = pm.g
    shifts = np.atleast_2d(np.asarray(shifts, complex)) + riemann_lift(pm)
    m = shifts.shape[0]
    c = _inner_const(g)

    def draw(seed, n):
        if g == 1:
            z = np.repeat(shifts[None], n, axis=0).reshape(-1, 1)
            vals, cens = theta_norm_many(pm, z, None, cfg.eps)
            return vals.reshape(n, m), cens.reshape(n, m)
        x, _, a = _mu_points(pm, _rng(seed), n, g - 1)
        z = (a.sum(axis=1)[:, None, :] + shifts[None]).reshape(-1, g)
        vals, cens = theta_norm_many(pm, z, None, cfg.eps)
        w = cb_weights(pm, x)
        return c * vals.reshape(n, m) * w[:, None], cens.reshape(n, m)

    return batched_means(draw, m, cfg.samples, cfg.seed, cfg.batches, iid=True)


def theta_divisor_integral(curve, pm, P, Q, config=None):
    """(1/g!) int over Theta + P - Q of log||theta|| nu^(g-1)."""
    return theta_divisor_integrals(curve, pm, [_aj1(pm, P) - _aj1(pm, Q)], config)[0]


def _check_distinct(P, Q):
    if P.at_infinity and Q.at_infinity:
        raise CoincidentPoints("g(P, P) is singular")
    if not P.at_infinity and not Q.at_infinity and abs(P.x - Q.x) < 1e-14 \
            and abs(P.y - Q.y) < 1e-14:
        raise CoincidentPoints("g(P, P) is singular")


def green(curve, pm, P, Q, config=None, A=None):
    """Arakelov-Green function g(P, Q).

    g(P, Q) is the Theta + P - Q integral plus the constant A = phi/2g - H.
    ``A`` defaults to the hyperelliptic closed form with a fresh H.
    """
    _check_distinct(P, Q)
    if A is None:
        from .invariants import closed_forms
        A = closed_forms(pm)["A"]
    inner = theta_divisor_integral(curve, pm, P, Q, config)
    return combine([(1.0, inner), (1.0, A)])


def green_many(curve, pm, pairs, config=None, A=None):
    """g(P, Q) for a list of pairs sharing one set of Theta samples."""
    for P, Q in pairs:
        _check_distinct(P, Q)
    if A is None:
        from .invariants import closed_forms
        A = closed_forms(pm)["A"]
    shifts = [_aj1(pm, P) - _aj1(pm, Q) for P, Q in pairs]
    return [combine([(1.0, e), (1.0, A)])
            for e in theta_divisor_integrals(curve, pm, shifts, config)]


def h_alt_estimators(curve, pm, config=None, Q=None):
    """H as weighted X^g integrals of log||theta||(P_1+...+P_g-Q) and of
    log||theta||(2P_1+P_2+...+P_{g-1}-P_g)."""
    cfg = config or MCConfig()
    g = pm.g
    if g < 2:
        raise ValueError("needs g >= 2")
    Q = Q or default_Q(curve)
    K = riemann_lift(pm)
    c = g ** g / math.factorial(g) ** 2
    base = K - _aj1(pm, Q)

    def draw1(seed, n):
        x, _, aj = _mu_points(pm, _rng(seed), n, g)
        vals, cens = theta_norm_many(pm, base + aj.sum(axis=1), None, cfg.eps)
        return c * vals * cb_weights(pm, x), cens

    def draw2(seed, n):
        x, _, aj = _mu_points(pm, _rng(seed), n, g)
        z = K + 2 * aj[:, 0] + aj[:, 1:g - 1].sum(axis=1) - aj[:, g - 1]
        vals, cens = theta_norm_many(pm, z, None, cfg.eps)
        return c * vals * cb_weights(pm, x), cens

    e1 = batched_mean(draw1, cfg.samples, cfg.seed, cfg.batches, iid=True)
    e2 = batched_mean(draw2, cfg.samples, cfg.seed + 1, cfg.batches, iid=True)
    return e1, e2


def cb_mass(curve, pm, k, config=None):
    """g^k E[w_k] / (normalising constant); equals 1 for k = 1 and k = g."""
    cfg = config or MCConfig()
    g = pm.g
    norm = 1.0 if k == 1 else g ** g / math.factorial(g) ** 2 if k == g else None
    if norm is None:
        raise ValueError("mass identity is stated for k = 1 and k = g")

    def draw(seed, n):
        x, _ = mu_sampler(pm).sample(_rng(seed), n * k)
        return norm * cb_weights(pm, x.reshape(n, k))

    return batched_mean(draw, cfg.samples, cfg.seed, cfg.batches, iid=True)


def pair_theta_integral(curve, pm, config=None):
    """(1/(g!)^2) int of the Theta + P_1 - P_2 integral against Phi^* nu^g.

    Adding A = phi/2g - H gives the Phi^* nu^g average of g(P_1, P_2).
    Nested single-sample Monte Carlo: one Theta point per outer tuple.
    """
    cfg = config or MCConfig()
    g = pm.g
    if g < 2:
        raise ValueError("needs g >= 2")
    K = riemann_lift(pm)
    cg = g ** g / math.factorial(g) ** 2
    ci = _inner_const(g)

    def draw(seed, n):
        rng = _rng(seed)
        x, _, a = _mu_points(pm, rng, n, g)
        xr, _, ar = _mu_points(pm, rng, n, g - 1)
        z = K + ar.sum(axis=1) + a[:, 0] - a[:, 1]
        vals, cens = theta_norm_many(pm, z, None, cfg.eps)
        return cg * cb_weights(pm, x) * ci * vals * cb_weights(pm, xr), cens

    return batched_mean(draw, cfg.samples, cfg.seed, cfg.batches, iid=True)


def mean_theta_integral(curve, pm, Q, config=None):
    """E over P ~ mu of the Theta + P - Q integral; adding A gives the mu-mean of g(., Q)."""
    cfg = config or MCConfig()
    g = pm.g
    base = riemann_lift(pm) - _aj1(pm, Q)
    c = _inner_const(g)

    def draw(seed, n):
        x, _, a = _mu_points(pm, _rng(seed), n, g)
        vals, cens = theta_norm_many(pm, base + a.sum(axis=1), None, cfg.eps)
        w = cb_weights(pm, x[:, 1:]) if g > 1 else 1.0
        return c * vals * w, cens

    return batched_mean(draw, cfg.samples, cfg.seed, cfg.batches, iid=True)


def decomposition_residual(curve, pm, Ps, Q, Sg, A, config=None):
    """log||theta||(P_1+..+P_g-Q) - S_g - sum g(P_j,Q) - sum_{k<l} g(sigma P_k, P_l).

    All Green terms share Theta samples inside one estimator, so their
    correlation is accounted for; S_g and A are independent inputs.
    """
    g = pm.g
    ajP = np.array([_aj1(pm, P) for P in Ps])
    ajQ = _aj1(pm, Q)
    z = riemann_lift(pm) + ajP.sum(axis=0) - ajQ
    vals, cens = theta_norm_many(pm, z[None], None)
    if cens[0]:
        raise CoincidentPoints("P_1 + ... + P_g - Q lies on Theta")
    shifts = [ajP[j] - ajQ for j in range(g)]
    # sigma acts as -1 on Abel-Jacobi images
    shifts += [-ajP[k] - ajP[l] for k in range(g) for l in range(k + 1, g)]
    m = len(shifts)
    cfg = config or MCConfig()
    shifts = np.array(shifts) + riemann_lift(pm)
    c = _inner_const(g)

    def draw(seed, n):
        x, _, a = _mu_points(pm, _rng(seed), n, g - 1)
        zz = (a.sum(axis=1)[:, None, :] + shifts[None]).reshape(-1, g)
        v, ce = theta_norm_many(pm, zz, None, cfg.eps)
        tot = c * v.reshape(n, m).sum(axis=1) * cb_weights(pm, x)
        return tot, ce.reshape(n, m).any(axis=1)

    inner = batched_mean(draw, cfg.samples, cfg.seed, cfg.batches, iid=True)
    return combine([(-1.0, inner), (-1.0, Sg), (-float(m), A)], float(vals[0]))

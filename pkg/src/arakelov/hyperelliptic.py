"""Hyperelliptic curves y^2 = (x-a_1)...(x-a_{2g+1}) and their period matrices.

Homology is built from a chain: the branch points are sorted and joined by
2g consecutive segments.  The cycle around segment k (out on one sheet, back
on the other) has period 2*int x^j dx/y along the segment, and neighbouring
cycles meet once at their shared branch point.  An integer symplectic
reduction of the resulting tridiagonal intersection form gives A- and
B-cycles.  Images of the Weierstrass points come out as exact half-integer
characteristics from the same integer data, and the Riemann constant is found
by searching the 2-torsion points for the vanishing pattern forced by
Riemann's theorem.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .numerics import NotPositiveDefinite
from .theta import (PeriodMatrix, ThetaCharacteristic, all_characteristics,
                    J_norm_many, theta_sums)


class DuplicateBranchPoint(ValueError):
    pass


class EvenCount(ValueError):
    pass


class NonSymmetric(RuntimeError):
    pass


class CalibrationError(RuntimeError):
    pass


class VanishingEvenThetaConstant(RuntimeError):
    pass


class GenusTooLarge(ValueError):
    pass


class HyperellipticCurve:
    """Curve y^2 = prod (x - a_j) with an odd number of branch points."""

    def __init__(self, points, label=None):
        pts = np.asarray(points, dtype=complex).ravel()
        if pts.size % 2 == 0:
            raise EvenCount(f"{pts.size} branch points; an odd count >= 3 is required")
        if pts.size < 3:
            raise EvenCount("at least three branch points are required")
        scale = max(1.0, float(np.max(np.abs(pts))))
        for i, j in combinations(range(pts.size), 2):
            if abs(pts[i] - pts[j]) <= 1e-9 * scale:
                raise DuplicateBranchPoint(f"branch points {i} and {j} coincide")
        self.branch = pts
        self.g = (pts.size - 1) // 2
        self.label = label
        self.min_gap = min(abs(pts[i] - pts[j]) for i, j in combinations(range(pts.size), 2))
        if self.min_gap < 1e-6 * scale:
            raise DuplicateBranchPoint("branch points closer than 1e-6")

    def __repr__(self):
        return f"HyperellipticCurve(g={self.g}, label={self.label!r})"

    def f(self, x):
        x = np.asarray(x, dtype=complex)
        return np.prod(x[..., None] - self.branch, axis=-1)

    def point(self, x, sheet=1):
        """Curve point over x; sheet +1/-1 picks the sign of the principal root."""
        y = np.sqrt(complex(self.f(x)))
        return CurvePoint(complex(x), sheet * y)

    def weierstrass(self, j):
        """W_j for j = 1..2g+1 (finite) and j = 2g+2 (infinity)."""
        if j == 2 * self.g + 2:
            return CurvePoint.infinity()
        return CurvePoint(complex(self.branch[j - 1]), 0j)

    def to_json(self):
        d = {"branch_points": [[float(z.real), float(z.imag)] for z in self.branch]}
        if self.label:
            d["label"] = self.label
        return d

    @classmethod
    def from_json(cls, d):
        return cls([complex(re, im) for re, im in d["branch_points"]], d.get("label"))


def new_curve(points, label=None):
    return HyperellipticCurve(points, label)


@dataclass(frozen=True)
class CurvePoint:
    x: complex
    y: complex
    at_infinity: bool = False

    @classmethod
    def infinity(cls):
        return cls(complex("nan"), complex("nan"), True)

    def sigma(self):
        if self.at_infinity:
            return self
        return CurvePoint(self.x, -self.y)

    def on_curve(self, curve):
        if self.at_infinity:
            return True
        fx = complex(curve.f(self.x))
        return abs(self.y * self.y - fx) < 1e-8 * (1 + abs(fx))


def move_to_infinity(points, r, infinity_is_branch=True):
    """Branch set after the change x = a_r + 1/t, which sends a_r to infinity.

    The old point at infinity becomes t = 0 and is a branch point exactly
    when the input model has odd degree.
    """
    pts = np.asarray(points, dtype=complex)
    rest = np.delete(pts, r)
    t = 1.0 / (rest - pts[r])
    return np.concatenate([t, [0j]]) if infinity_is_branch else t


def xn_plus_one(n):
    """Branch points of y^2 = x^n + 1 in an odd-degree model."""
    if n < 3:
        raise ValueError("n must be at least 3")
    roots = np.exp(1j * np.pi * (2 * np.arange(n) + 1) / n)
    if n % 2:
        return HyperellipticCurve(roots, f"x{n}+1")
    # an even model has no branch point at infinity: send one root there
    return HyperellipticCurve(move_to_infinity(roots, 0, infinity_is_branch=False), f"x{n}+1")


def rot_sqrt(v, d):
    """sqrt(v) with its cut along the ray -d, continuous elsewhere."""
    return np.sqrt(v / d) * np.sqrt(d)


def _unit(z):
    return z / abs(z)


def chain_order(curve):
    """Indices of the branch points sorted by real part, then imaginary part."""
    a = curve.branch
    return sorted(range(a.size), key=lambda i: (round(a[i].real, 12), a[i].imag))


class _Segment:
    """Segment between two consecutive chain points with a continuous branch of y."""

    def __init__(self, pts, i, j):
        self.a, self.b = pts[i], pts[j]
        self.mid = 0.5 * (self.a + self.b)
        self.pts = pts
        self.dirs = np.array([_unit(self.mid - p) for p in pts])
        self.ends = (i, j)

    def y(self, x):
        x = np.asarray(x, dtype=complex)
        return np.prod(rot_sqrt(x[..., None] - self.pts, self.dirs), axis=-1)

    def integrals(self, g, order):
        """int_a^b x^j dx / y for j < g, Gauss-Chebyshev."""
        k = np.arange(1, order + 1)
        u = np.cos((2 * k - 1) * np.pi / (2 * order))
        h = 0.5 * (self.b - self.a)
        x = self.mid + h * u
        others = [m for m in range(self.pts.size) if m not in self.ends]
        R = np.prod(rot_sqrt(x[:, None] - self.pts[others], self.dirs[others]), axis=-1)
        i, j = self.ends
        pref = h / (abs(h) * np.sqrt(self.dirs[i]) * np.sqrt(self.dirs[j]))
        powers = x[None, :] ** np.arange(g)[:, None]
        return pref * (np.pi / order) * (powers / R).sum(axis=1)


def _converged(seg, g, order, tol=1e-13, cap=1 << 14):
    """Segment integrals, doubling the order until two levels agree."""
    cur = seg.integrals(g, order)
    while order < cap:
        order *= 2
        nxt = seg.integrals(g, order)
        if np.max(np.abs(nxt - cur)) <= tol * max(1.0, np.max(np.abs(nxt))):
            return nxt
        cur = nxt
    raise NonSymmetric("segment quadrature did not converge; branch points too close")


def symplectic_basis(C):
    """Integer S with S C S^t = [[0, I], [-I, 0]] for a unimodular alternating C."""
    C = np.asarray(C, dtype=np.int64)
    n = C.shape[0]
    vecs = [np.eye(n, dtype=np.int64)[i] for i in range(n)]
    E = lambda u, v: int(u @ C @ v)
    As, Bs = [], []
    while vecs:
        pair = None
        for i in range(len(vecs)):
            for j in range(i + 1, len(vecs)):
                if abs(E(vecs[i], vecs[j])) == 1:
                    pair = (i, j)
                    break
            if pair:
                break
        if pair is None:
            raise CalibrationError("intersection form is not unimodular on the chain")
        i, j = pair
        e, f = vecs[i], vecs[j]
        if E(e, f) == -1:
            f = -f
        rest = [w for k, w in enumerate(vecs) if k not in pair]
        vecs = [w - E(w, f) * e + E(w, e) * f for w in rest]
        As.append(e)
        Bs.append(f)
    return np.array(As + Bs, dtype=np.int64)


def _chain_periods(curve, order):
    idx = chain_order(curve)
    pts = curve.branch[idx]
    g = curve.g
    segs = [_Segment(pts, k, k + 1) for k in range(2 * g)]
    P = np.column_stack([2.0 * _converged(s, g, order) for s in segs])
    # intersection of neighbouring cycles from the local picture at the shared point
    C = np.zeros((2 * g, 2 * g), dtype=np.int64)
    for k in range(2 * g - 1):
        b = pts[k + 1]
        delta = 1e-4 * min(abs(pts[k] - b), abs(pts[k + 2] - b))
        xin = b + delta * _unit(pts[k] - b)
        xout = b + delta * _unit(pts[k + 2] - b)
        s = np.imag(np.conj(-segs[k].y(xin)) * segs[k + 1].y(xout))
        C[k, k + 1] = 1 if s > 0 else -1
        C[k + 1, k] = -C[k, k + 1]
    return idx, P, C


class CurvePeriodMatrix(PeriodMatrix):
    """Period matrix of a hyperelliptic curve plus the data tied to its basis.

    Extra attributes: ``curve``, ``PA_inv`` (normalises x^j dx/y),
    ``weierstrass_chars`` (AJ images from infinity of W_1..W_{2g+2}) and
    ``K`` (the 2-torsion Riemann constant for base point infinity).
    """

    def __init__(self, omega, curve, PA_inv, cycle_coords, chain, quad_order):
        super().__init__(omega)
        self.curve = curve
        self.PA_inv = PA_inv
        self.cycle_coords = cycle_coords
        self.chain = chain
        self.quad_order = quad_order
        self.weierstrass_chars = self._weierstrass()
        self.K = None
        self.K = calibrate_riemann_constant(self)

    def _weierstrass(self):
        g = self.g
        n = 2 * g + 1
        # AJ from the first chain point to the k-th one: half the cycles before it
        from_e1 = []
        acc = np.zeros(2 * g, dtype=np.int64)
        for k in range(n):
            from_e1.append(acc.copy())
            if k < 2 * g:
                acc = acc + self.cycle_coords[k]
        inf = sum(from_e1) % 2
        chars = [None] * (n + 1)
        for pos, orig in enumerate(self.chain):
            v = (from_e1[pos] - inf) % 2
            # cycle coords are (p, q) with gamma = p + Omega q; top row is q
            chars[orig] = ThetaCharacteristic(tuple(int(t) for t in v[g:]),
                                              tuple(int(t) for t in v[:g]))
        chars[n] = ThetaCharacteristic.zero(g)
        return chars

    def char_of(self, indices):
        """Sum of Weierstrass characteristics over 1-based indices (mod 1)."""
        c = ThetaCharacteristic.zero(self.g)
        for j in indices:
            c = c + self.weierstrass_chars[j - 1]
        return c

    def half_period(self, char):
        return self.omega @ char.a + char.b


def period_matrix(curve, quad_order=128):
    if quad_order < 32:
        raise ValueError("quad_order must be at least 32")
    g = curve.g
    idx, P, C = _chain_periods(curve, quad_order)
    for sign in (1, -1):
        S = symplectic_basis(sign * C)
        PA = P @ S[:g].T
        PB = P @ S[g:].T
        PA_inv = np.linalg.inv(PA)
        omega = (PA_inv @ PB).T
        resid = float(np.max(np.abs(omega - omega.T)))
        if resid > 1e-6 * (1 + np.max(np.abs(omega))):
            raise NonSymmetric(f"symmetry residual {resid:.2e}")
        if np.all(np.linalg.eigvalsh(0.5 * (omega.imag + omega.imag.T)) > 0):
            break
    else:
        raise NotPositiveDefinite("Im(Omega) is not definite for either orientation")
    Sinv = np.rint(np.linalg.inv(S)).astype(np.int64)
    return CurvePeriodMatrix(omega, curve, PA_inv, Sinv, idx, quad_order)


def theta_constants(pm, chars, eps=1e-10):
    """Normalised values theta[eta](0) (exact, z = 0) for a list of characteristics."""
    chars = list(chars)
    a = np.array([c.a for c in chars])
    b = np.array([c.b for c in chars])
    S0, _, _, _, _ = theta_sums(pm, np.zeros((len(chars), pm.g)), (a, b), 0, eps)
    return S0


def calibrate_riemann_constant(pm, eps=1e-10, tol=1e-7):
    """The unique 2-torsion K matching the vanishing pattern of Riemann's theorem."""
    g = pm.g
    chars = list(all_characteristics(g))
    vals = np.abs(theta_constants(pm, chars, eps))
    zero = {c: v < tol * vals.max() for c, v in zip(chars, vals)}
    n = 2 * g + 1
    must_vanish = [pm.char_of(T) for k in range(g) for T in combinations(range(1, n + 1), k)]
    must_live = [pm.char_of(T) for T in combinations(range(1, n + 1), g + 1)]
    hits = [K for K in chars
            if all(zero[e + K] for e in must_vanish) and not any(zero[e + K] for e in must_live)]
    if len(hits) != 1:
        raise CalibrationError(f"{len(hits)} candidate Riemann constants")
    return hits[0]


@dataclass(frozen=True)
class WeierstrassCharacteristicTable:
    g: int
    eta: tuple

    @property
    def U(self):
        return tuple(range(1, 2 * self.g + 2, 2))

    def of(self, S):
        c = ThetaCharacteristic.zero(self.g)
        for k in S:
            c = c + self.eta[k - 1]
        return c


def weierstrass_characteristics(g):
    """The classical table eta_1..eta_{2g+2} attached to the standard basis."""
    eta = []
    for k in range(1, g + 2):
        top = tuple(1 if i == k - 1 else 0 for i in range(g))
        eta.append(ThetaCharacteristic(top, tuple(1 if i < k - 1 else 0 for i in range(g))))
        if k <= g:
            eta.append(ThetaCharacteristic(top, tuple(1 if i < k else 0 for i in range(g))))
    eta.append(ThetaCharacteristic.zero(g))
    return WeierstrassCharacteristicTable(g, tuple(eta))


def symmetric_difference(S, T):
    return tuple(sorted(set(S) ^ set(T)))


def _theta_norm_at_chars(pm, chars, eps=1e-10):
    chars = list(chars)
    S0 = theta_constants(pm, chars, eps)
    with np.errstate(divide="ignore"):
        return 0.25 * pm.logdetY + np.log(np.abs(S0))


def _check_alive(vals, tol=1e-7):
    if np.any(vals < vals.max() + math.log(tol)):
        raise VanishingEvenThetaConstant("an even theta constant vanishes")


def phi_g_log(pm, route="infinity", eps=1e-10):
    """log||phi_g|| from the Weierstrass half periods.

    ``route="infinity"`` multiplies 8th powers over (g+1)-subsets of the
    finite branch points; ``route="all"`` takes 4th powers over
    (g+1)-subsets of all 2g+2 Weierstrass points.
    """
    g = pm.g
    if route == "infinity":
        sets, power = list(combinations(range(1, 2 * g + 2), g + 1)), 8
    elif route == "all":
        sets, power = list(combinations(range(1, 2 * g + 3), g + 1)), 4
    else:
        raise ValueError(route)
    vals = _theta_norm_at_chars(pm, [pm.char_of(T) + pm.K for T in sets], eps)
    _check_alive(vals)
    return float(power * vals.sum())


def discriminant_exponent(g):
    return 4 * (g + 1) * math.comb(2 * g, g - 1)


def _log_elementary(values, r):
    """log|e_r(values)| for complex values, stable when all are nonzero."""
    v = np.asarray(values, dtype=complex)
    n = v.size
    logs = np.log(np.abs(v))
    base = float(logs.sum())
    k = n - r
    if k == 0:
        return base
    # e_r(v) = prod(v) * e_{n-r}(1/v)
    w = 1.0 / v
    s = np.max(np.abs(w))
    w = w / s
    e = np.zeros(k + 1, complex)
    e[0] = 1.0
    for x in w:
        e[1:] = e[1:] + x * e[:-1]
    return base + k * math.log(s) + math.log(abs(e[k]))


def delta_g_log(pm, mode="hyperelliptic-product", eps=1e-10):
    """log||Delta_g||."""
    g = pm.g
    shift = -discriminant_exponent(g) * math.log(2)
    if mode == "hyperelliptic-product":
        return phi_g_log(pm, "infinity", eps) + shift
    if mode != "general-sum":
        raise ValueError(mode)
    if g > 3:
        raise GenusTooLarge("the subset sum is only implemented for g <= 3")
    even = [c for c in all_characteristics(g) if c.parity == 0]
    S0 = theta_constants(pm, even, eps)
    alive = np.abs(S0) >= 1e-7 * np.abs(S0).max()
    r = math.comb(2 * g + 1, g + 1)
    if alive.sum() < r:
        raise VanishingEvenThetaConstant(f"only {alive.sum()} nonzero even constants")
    return shift + 2 * r * pm.logdetY + _log_elementary(S0[alive] ** 8, r)


def rosenhain_sides(pm, tau, eps=1e-10):
    """(log LHS, log RHS) of the generalized Rosenhain formula for permutation tau."""
    g = pm.g
    first = [tau[i] for i in range(g)]
    w = np.array([pm.half_period(pm.char_of([first[i] for i in range(g) if i != k]) + pm.K)
                  for k in range(g)])
    lhs = float(J_norm_many(pm, w[None], eps)[0])
    chars = [pm.char_of(first + [tau[j]]) + pm.K for j in range(g, 2 * g + 2)]
    rhs = g * math.log(math.pi) + float(_theta_norm_at_chars(pm, chars, eps).sum())
    return lhs, rhs


def rosenhain_residual(pm, curve=None, tau=None, eps=1e-10):
    """|log||J||(W_tau(1..g)) - log(pi^g prod ||theta||(...))|; tau is 1-based."""
    if tau is None:
        tau = list(range(1, 2 * pm.g + 3))
    lhs, rhs = rosenhain_sides(pm, list(tau), eps)
    return abs(lhs - rhs)


def de_jong_residual(pm, eps=1e-10):
    """Both sides of prod_{U_g} ||J|| = pi^(binom(2g+2,g) g) ||phi_g||^((g+1)/4), in logs."""
    g = pm.g
    sets = list(combinations(range(1, 2 * g + 3), g))
    w = np.array([[pm.half_period(pm.char_of([s[i] for i in range(g) if i != k]) + pm.K)
                   for k in range(g)] for s in sets])
    lhs = float(J_norm_many(pm, w, eps).sum())
    rhs = math.comb(2 * g + 2, g) * g * math.log(math.pi) + (g + 1) / 4 * phi_g_log(pm, eps=eps)
    return abs(lhs - rhs)


def odd_constant_ratio(pm, eps=1e-10):
    """max |theta[odd](0)| / max |theta[even](0)|."""
    chars = list(all_characteristics(pm.g))
    vals = np.abs(theta_constants(pm, chars, eps))
    par = np.array([c.parity for c in chars])
    return float(vals[par == 1].max() / vals[par == 0].max())


def j_invariant(pm, eps=1e-12):
    """Klein's j of a genus-one period matrix via theta constants."""
    if pm.g != 1:
        raise ValueError("j is defined here for g = 1")
    t2, t3 = theta_constants(pm, [ThetaCharacteristic((1,), (0,)),
                                  ThetaCharacteristic((0,), (0,))], eps)
    lam = (t2 / t3) ** 4
    return complex(256 * (1 - lam + lam * lam) ** 3 / (lam * lam * (1 - lam) ** 2))

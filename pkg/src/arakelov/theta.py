"""Riemann theta functions with half-integer characteristics.

Sums are evaluated in a normalised form.  With ``Y = Im(Omega) = T^t T`` and
``c = Y^{-1} Im(z)`` one has

    theta[a,b](z) = exp(pi y^t Y^{-1} y) * sum_v exp(i*phase(v)) exp(-pi |T(v+c)|^2)

with ``v`` running over ``Z^g + a``.  The Gaussian factor is bounded by one,
so the normalised sum never overflows, and ``log||theta||`` is just
``logdet(Y)/4 + log|sum|``.  The same holds for the derivative sums used by
``||J||`` and ``||eta||``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from itertools import product

import numpy as np
from scipy.special import gammaincc, gammaln

from .numerics import cholesky

TWO_PI_I = 2j * np.pi
CENSOR_RATIO = 1e-12
MAX_POINTS = 10**9


class RadiusOverflow(RuntimeError):
    pass


class NotOnTheta(ValueError):
    pass


class PeriodMatrix:
    """Symmetric g x g complex matrix with positive definite imaginary part."""

    def __init__(self, omega):
        omega = np.atleast_2d(np.asarray(omega, dtype=complex))
        if omega.shape[0] != omega.shape[1]:
            raise ValueError("period matrix must be square")
        scale = 1.0 + float(np.max(np.abs(omega)))
        if np.max(np.abs(omega - omega.T)) >= 1e-8 * scale:
            raise ValueError("period matrix is not symmetric")
        self.omega = 0.5 * (omega + omega.T)
        self.g = omega.shape[0]
        self.X = self.omega.real.copy()
        self.Y = self.omega.imag.copy()
        self.chol = cholesky(self.Y)
        self.T = self.chol.L.T.copy()
        self.Yinv = np.linalg.inv(self.Y)
        self.Yinv = 0.5 * (self.Yinv + self.Yinv.T)
        self.logdetY = self.chol.logdet
        self._lattices = {}

    def __repr__(self):
        return f"PeriodMatrix(g={self.g})"

    @cached_property
    def shortest(self):
        """Length of the shortest nonzero vector of sqrt(pi)*T."""
        T = self.T * math.sqrt(math.pi)
        r = float(np.min(np.linalg.norm(T, axis=0))) * (1 + 1e-9)
        pts = _ellipsoid_points(T, r, np.zeros(self.g))
        norms = np.linalg.norm(pts @ T.T, axis=1)
        return float(np.min(norms[norms > 1e-12]))

    @cached_property
    def corner(self):
        return max(float(np.linalg.norm(self.T @ np.array(d)))
                   for d in product((-0.5, 0.5), repeat=self.g))

    def radius(self, eps, order=0):
        """Ellipsoid radius (in |T w| units) with Gaussian tail below eps."""
        g, rho = self.g, self.shortest
        lo = 0.5 * (math.sqrt(g) + rho)
        pref = math.log(g / 2.0) + g * math.log(2.0 / rho) + gammaln(g / 2.0)

        def tail(Rt):
            x = (Rt - rho / 2.0) ** 2
            q = gammaincc(g / 2.0, x)
            if q <= 0:
                return -np.inf
            # derivative terms grow like |2 pi v|^order
            grow = order * math.log(2 * math.pi * (Rt / math.sqrt(math.pi) + 2.0))
            return pref + math.log(q) + grow

        Rt = max(lo, 1.0)
        target = math.log(eps)
        while tail(Rt) > target:
            Rt *= 1.2
        return Rt / math.sqrt(math.pi)

    def lattice(self, eps, order=0):
        key = (float(eps), order)
        if key not in self._lattices:
            R = self.radius(eps, order) + self.corner
            vol = (math.pi ** (self.g / 2) * R ** self.g
                   / math.gamma(self.g / 2 + 1) / math.exp(self.logdetY / 2))
            if vol > MAX_POINTS:
                raise RadiusOverflow(f"about {vol:.2e} lattice points needed")
            self._lattices[key] = _ellipsoid_points(self.T, R, np.full(self.g, 0.5))
        return self._lattices[key]


def _ellipsoid_points(T, R, shift):
    """Integer n with |T (n + shift)| <= R, T upper triangular."""
    g = T.shape[0]
    pts = np.zeros((1, 0), dtype=np.int64)
    acc = np.zeros(1)
    # rows are filled from the last coordinate up; acc is the squared norm so far
    for i in range(g - 1, -1, -1):
        if pts.shape[1]:
            tail = (pts + shift[i + 1:]) @ T[i, i + 1:]
        else:
            tail = np.zeros(pts.shape[0])
        centre = -shift[i] - tail / T[i, i]
        room = np.sqrt(np.maximum(R * R - acc, 0.0)) / T[i, i]
        lo = np.ceil(centre - room).astype(np.int64)
        hi = np.floor(centre + room).astype(np.int64)
        count = np.maximum(hi - lo + 1, 0)
        idx = np.repeat(np.arange(len(lo)), count)
        offs = np.arange(count.sum()) - np.repeat(np.cumsum(count) - count, count)
        ni = lo[idx] + offs
        pts = np.column_stack([ni, pts[idx]]) if pts.shape[1] else ni[:, None]
        acc = acc[idx] + (T[i, i] * (ni + shift[i]) + tail[idx]) ** 2
    return pts


@dataclass(frozen=True)
class ThetaCharacteristic:
    """Half-integer characteristic [top; bottom], stored as integers 0/1 (halves)."""
    top: tuple
    bottom: tuple

    @classmethod
    def from_halves(cls, top, bottom):
        t = tuple(int(round(2 * float(x))) % 2 for x in top)
        b = tuple(int(round(2 * float(x))) % 2 for x in bottom)
        if len(t) != len(b):
            raise ValueError("characteristic rows differ in length")
        return cls(t, b)

    @classmethod
    def zero(cls, g):
        return cls((0,) * g, (0,) * g)

    @property
    def g(self):
        return len(self.top)

    @property
    def a(self):
        return 0.5 * np.array(self.top, dtype=float)

    @property
    def b(self):
        return 0.5 * np.array(self.bottom, dtype=float)

    @property
    def parity(self):
        return sum(x * y for x, y in zip(self.top, self.bottom)) % 2

    def __add__(self, other):
        return ThetaCharacteristic(tuple((x + y) % 2 for x, y in zip(self.top, other.top)),
                                   tuple((x + y) % 2 for x, y in zip(self.bottom, other.bottom)))

    def point(self, pm):
        """The half period Omega a + b."""
        return pm.omega @ self.a + self.b

    def __str__(self):
        f = lambda v: "".join(str(x) for x in v)
        return f"[{f(self.top)};{f(self.bottom)}]/2"


def all_characteristics(g):
    for bits in product((0, 1), repeat=2 * g):
        yield ThetaCharacteristic(bits[:g], bits[g:])


@dataclass(frozen=True)
class LogComplex:
    logmod: float
    phase: complex

    def value(self):
        if self.logmod == -np.inf:
            return 0j
        return complex(math.exp(self.logmod) * self.phase)

    def __mul__(self, other):
        return LogComplex(self.logmod + other.logmod, self.phase * other.phase)


@dataclass(frozen=True)
class ReducedPoint:
    x: np.ndarray
    y: np.ndarray

    def lift(self, pm):
        return self.x + pm.omega @ self.y


def reduce_point(pm, z):
    z = np.asarray(z, dtype=complex)
    y = pm.Yinv @ z.imag
    x = z.real - pm.X @ y
    y = y - np.floor(y)
    x = x - np.floor(x)
    # values within rounding of 1 wrap to 0
    x[x >= 1.0] = 0.0
    y[y >= 1.0] = 0.0
    return ReducedPoint(x, y)


def _char_arrays(char, g, n):
    if char is None:
        return np.zeros((n, g)), np.zeros((n, g))
    if isinstance(char, ThetaCharacteristic):
        return np.tile(char.a, (n, 1)), np.tile(char.b, (n, 1))
    a, b = char
    return (np.broadcast_to(np.asarray(a, float), (n, g)),
            np.broadcast_to(np.asarray(b, float), (n, g)))


def theta_sums(pm, z, char=None, order=0, eps=1e-10, reduce=False, chunk=2**20):
    """Normalised lattice sums at many points.

    Returns ``(S0, S1, S2, logmax, quad)`` where ``S1``/``S2`` are the first
    and second derivative sums (None below the requested order), ``logmax``
    is the log of the largest Gaussian weight and ``quad`` is
    ``pi y^t Y^{-1} y`` at the evaluation point.  With ``reduce=True`` the
    point is first moved by a lattice vector, which keeps magnitudes of
    ``||theta||`` (and of the derivative norms on the theta divisor) but not
    the phases.
    """
    z = np.atleast_2d(np.asarray(z, dtype=complex))
    n, g = z.shape
    if g != pm.g:
        raise ValueError("point dimension does not match genus")
    a, b = _char_arrays(char, g, n)
    c = z.imag @ pm.Yinv
    x = z.real.copy()
    if reduce:
        m = np.floor(c)
        c = c - m
        x = x - m @ pm.X
        x = x - np.round(x)
    quad = np.pi * np.einsum("ij,ij->i", c, z.imag if not reduce else c @ pm.Y)
    u = a + c
    fl = np.floor(u)
    uf = u - fl
    N = pm.lattice(eps, order).astype(float)
    M = N.shape[0]
    Y, X = pm.Y, pm.X
    # exponent(p, n) = alpha[n] + N[n].beta[p] + gamma[p]  with v = N + d, d = a - fl
    alpha = -np.pi * np.einsum("mi,ij,mj->m", N, Y, N) \
        + 1j * np.pi * np.einsum("mi,ij,mj->m", N, X, N)
    d = a - fl
    xb = x + b
    beta = -2 * np.pi * uf @ Y + 2j * np.pi * (d @ X + xb)
    gamma = -np.pi * np.einsum("pi,ij,pj->p", uf, Y, uf) \
        + 1j * np.pi * (np.einsum("pi,ij,pj->p", d, X, d) + 2 * np.einsum("pi,pi->p", d, xb))
    S0 = np.empty(n, complex)
    S1 = np.empty((n, g), complex) if order >= 1 else None
    S2 = np.empty((n, g, g), complex) if order >= 2 else None
    logmax = np.empty(n)
    NN = (N[:, :, None] * N[:, None, :]).reshape(M, g * g) if order >= 2 else None
    step = max(1, chunk // max(M, 1))
    for s in range(0, n, step):
        sl = slice(s, min(n, s + step))
        ex = beta[sl] @ N.T + alpha[None, :] + gamma[sl, None]
        logmax[sl] = ex.real.max(axis=1)
        term = np.exp(ex)
        s0 = term.sum(axis=1)
        S0[sl] = s0
        if order >= 1:
            sn = term @ N
            dd = d[sl]
            S1[sl] = TWO_PI_I * (sn + dd * s0[:, None])
        if order >= 2:
            snn = (term @ NN).reshape(-1, g, g)
            S2[sl] = TWO_PI_I ** 2 * (snn + dd[:, :, None] * sn[:, None, :]
                                      + sn[:, :, None] * dd[:, None, :]
                                      + dd[:, :, None] * dd[:, None, :] * s0[:, None, None])
    return S0, S1, S2, logmax, quad


def theta_log(pm, z, char=None, eps=1e-10):
    """theta[char](Omega; z) as a LogComplex."""
    S0, _, _, _, quad = theta_sums(pm, z, char, 0, eps)
    mod = abs(S0[0])
    if mod == 0.0:
        return LogComplex(-np.inf, 1.0 + 0j)
    return LogComplex(float(quad[0] + math.log(mod)), complex(S0[0] / mod))


def theta_norm_many(pm, z, char=None, eps=1e-10):
    """log||theta|| at many points, with the censoring floor applied.

    Returns ``(values, censored)``.  Censored points get
    ``logdet/4 + log(1e-12 * max term)``.
    """
    S0, _, _, logmax, _ = theta_sums(pm, z, char, 0, eps, reduce=True)
    mod = np.abs(S0)
    floor = CENSOR_RATIO * np.exp(logmax)
    cens = mod < floor
    with np.errstate(divide="ignore"):
        vals = 0.25 * pm.logdetY + np.log(np.where(cens, floor, mod))
    return vals, cens


def theta_norm_log(pm, z, char=None, eps=1e-10):
    """log||theta||(z + Omega a + b); -inf when the sum cancels to the floor."""
    vals, cens = theta_norm_many(pm, np.atleast_2d(z), char, eps)
    return -np.inf if cens[0] else float(vals[0])


def theta_derivs(pm, z, char=None, eps=1e-10):
    """Gradient and Hessian of theta[char] at z."""
    _, S1, S2, _, quad = theta_sums(pm, z, char, 2, eps)
    f = np.exp(quad[0])
    H = f * S2[0]
    return f * S1[0], 0.5 * (H + H.T)


def _logabsdet(M):
    # row scaling keeps LU well conditioned when rows differ by many orders
    scale = np.max(np.abs(M), axis=-1)
    scale = np.where(scale > 0, scale, 1.0)
    sign, ld = np.linalg.slogdet(M / scale[..., :, None])
    ld = ld + np.sum(np.log(scale), axis=-1)
    return np.where(sign == 0, -np.inf, ld)


def eta_norm_many(pm, z, eps=1e-10, guard=-12.0):
    """log||eta|| at points of the theta divisor."""
    z = np.atleast_2d(np.asarray(z, dtype=complex))
    g = pm.g
    S0, S1, S2, _, _ = theta_sums(pm, z, None, 2, eps, reduce=True)
    tn = 0.25 * pm.logdetY + np.log(np.maximum(np.abs(S0), 1e-300))
    if guard is not None and np.any(tn > guard):
        raise NotOnTheta(f"log||theta|| = {tn.max():.3f} above guard {guard}")
    B = np.zeros((z.shape[0], g + 1, g + 1), complex)
    B[:, :g, :g] = S2
    B[:, :g, g] = S1
    B[:, g, :g] = S1
    return (g + 5) / 4.0 * pm.logdetY + _logabsdet(B)


def eta_norm_log(pm, z, eps=1e-10):
    return float(eta_norm_many(pm, np.atleast_2d(z), eps)[0])


def J_norm_many(pm, w, eps=1e-10):
    """log||J|| for an array of shape (n, g, g): n tuples of g lifts."""
    w = np.asarray(w, dtype=complex)
    n, g, _ = w.shape
    _, S1, _, _, _ = theta_sums(pm, w.reshape(n * g, g), None, 1, eps, reduce=True)
    return (g + 2) / 4.0 * pm.logdetY + _logabsdet(S1.reshape(n, g, g))


def J_norm_log(pm, w, eps=1e-10):
    return float(J_norm_many(pm, np.asarray(w, complex)[None], eps)[0])


def autissier_constant(g):
    c = (g + 2) / 2.0
    if g >= 4:
        c *= ((g + 2) / (math.pi * math.sqrt(3))) ** (g / 2.0)
    return c


def autissier_margin(pm, z, eps=1e-10):
    """log c_g + logdet(Y)/4 - log||theta||(z); nonnegative by the bound."""
    vals, _ = theta_norm_many(pm, np.atleast_2d(z), None, eps)
    out = math.log(autissier_constant(pm.g)) + 0.25 * pm.logdetY - vals
    return float(out[0]) if np.ndim(z) == 1 else out

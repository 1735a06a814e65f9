"""Faltings delta, the Zhang-Kawazumi phi and friends, plus bound checks.

Closed-form routes use H and log||Delta_g||; Monte Carlo routes go through
the curve integrals in :mod:`arakelov.abeljacobi`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import abeljacobi as aj
from .hyperelliptic import CurvePoint, delta_g_log
from .numerics import Estimate, combine, exact, integrate
from .theta import autissier_constant, theta_norm_many

LOG2PI = math.log(2 * math.pi)


def H(pm, samples=200_000, seed=42, kind="low-discrepancy", eps=1e-10, batches=16):
    """Mean of log||theta|| over the torus, x + Omega y with (x, y) uniform."""
    g = pm.g

    def f(u):
        z = u[:, :g] + u[:, g:] @ pm.omega.T
        return theta_norm_many(pm, z, None, eps)

    return integrate(f, 2 * g, samples, seed, kind, batches)


def theta_square_mass(pm, samples=200_000, seed=42, kind="low-discrepancy", eps=1e-10):
    """Torus mean of ||theta||^2, which is 2^(-g/2)."""
    g = pm.g

    def f(u):
        z = u[:, :g] + u[:, g:] @ pm.omega.T
        vals, _ = theta_norm_many(pm, z, None, eps)
        return np.exp(2 * vals)

    return integrate(f, 2 * g, samples, seed, kind)


def _n(g):
    return math.comb(2 * g, g - 1)


def hyperelliptic_delta_phi(curve, pm, H=None, config=None, log_delta=None):
    """(delta, phi, log||Delta_g||) from H and the discriminant."""
    g = pm.g
    if g < 2:
        raise ValueError("needs g >= 2")
    if H is None:
        cfg = config or aj.MCConfig(samples=200_000)
        H = globals()["H"](pm, cfg.samples, cfg.seed, eps=cfg.eps)
    if log_delta is None:
        log_delta = delta_g_log(pm)
    n = _n(g)
    delta = H.scaled(-8 * (g - 1) / g, -log_delta / n - 8 * g * LOG2PI)
    phi = H.scaled(4 * (2 * g + 1) / g, -0.5 * log_delta / n)
    return delta, phi, log_delta


def affine_in_H(g, log_delta):
    """Closed-form invariants as (coefficient of H, constant)."""
    n = _n(g)
    d = (-8.0 * (g - 1) / g, -log_delta / n - 8 * g * LOG2PI)
    p = (4.0 * (2 * g + 1) / g, -0.5 * log_delta / n)
    out = {"H": (1.0, 0.0), "delta": d, "phi": p,
           "A": (p[0] / (2 * g) - 1.0, p[1] / (2 * g)),
           "Lambda": ((g - 1) - d[0] / 4 - p[0] / 2, -d[1] / 4 - p[1] / 2),
           "beta": (((2 * g - 2) * p[0] + (2 * g + 1) * d[0]) / 3,
                    ((2 * g - 2) * p[1] + (2 * g + 1) * d[1]) / 3)}
    return out


def closed_forms(pm, H_est=None, log_delta=None, samples=200_000, seed=42):
    """Hyperelliptic closed forms as estimates sharing one H.

    Differences of entries are not independent; use :func:`affine_in_H`
    when combining them.
    """
    if H_est is None:
        H_est = H(pm, samples, seed)
    if log_delta is None:
        log_delta = delta_g_log(pm)
    out = {k: H_est.scaled(c, k0) for k, (c, k0) in affine_in_H(pm.g, log_delta).items()}
    out["log_delta"] = exact(log_delta)
    return out


def with_H(H_est, pairs, const=0.0, others=()):
    """Estimate of sum c_i X_i + const where every X_i is affine in H.

    ``pairs`` holds (weight, (coef, const)) items; ``others`` extra
    independent (weight, Estimate) terms.
    """
    coef = sum(w * ab[0] for w, ab in pairs)
    k = const + sum(w * ab[1] for w, ab in pairs)
    return combine([(coef, H_est)] + list(others), k)


def delta_from_H_phi(g, H, phi):
    """delta = -24 H + 2 phi - 8 g log 2 pi; takes floats or estimates."""
    if isinstance(H, Estimate):
        phi = phi if isinstance(phi, Estimate) else exact(phi)
        return combine([(-24.0, H), (2.0, phi)], -8 * g * LOG2PI)
    return -24.0 * H + 2.0 * phi - 8 * g * LOG2PI


def genus_one_delta(pm, **kw):
    return H(pm, **kw).scaled(-24.0, -8 * LOG2PI)


def abelian_extensions(g, H, Lam):
    """(delta, phi, beta_g) of a ppav from H and Lambda."""
    d = combine([(2.0 * (g - 7), H), (-2.0, Lam)], -4 * g * LOG2PI)
    p = combine([(g + 5.0, H), (-1.0, Lam)], 2 * g * LOG2PI)
    b = combine([(2.0 * (g - 4) * (g + 1), H), (-2.0 * g, Lam)], -(4 * g * (g + 2) / 3) * LOG2PI)
    return d, p, b


def beta_from_delta_phi(g, delta, phi):
    return ((2 * g - 2) * phi + (2 * g + 1) * delta) / 3.0


def lambda_from_closed_forms(g, H, delta, phi):
    """Lambda = (g-1) H - delta/4 - phi/2, as a float (inputs share H's error)."""
    return (g - 1) * H - delta / 4.0 - phi / 2.0


def phi_from_S1(g, H, S1):
    return combine([(4.0 / g, H), (-4.0 / g, S1)])


def delta_from_SB(g, Sg, B):
    return combine([(8.0 * (g - 1), Sg), (-8.0, B)])


def phi_g_from_SB(g, Sg, B):
    """log||phi_g|| = 4 n ((g+1)/g B - (g-1) S_g - (g+1) log pi)."""
    n = _n(g)
    return combine([(4 * n * (g + 1) / g, B), (-4 * n * (g - 1), Sg)],
                   -4 * n * (g + 1) * math.log(math.pi))


def delta_via_green_integral(curve, pm, config=None, Q=None, H_est=None):
    """delta from the mu-average of the Theta + P - Q integral and H."""
    cfg = config or aj.MCConfig()
    g = pm.g
    if g < 2:
        raise ValueError("needs g >= 2")
    Q = Q or aj.default_Q(curve)
    if H_est is None:
        H_est = H(pm, max(cfg.samples, 100_000), cfg.seed, eps=cfg.eps)
    inner = aj.mean_theta_integral(curve, pm, Q, cfg)
    # (4g/g!) times the unnormalised Theta integral is 4g times the 1/g! one
    return combine([(-4.0 * g, inner), (4.0 * g - 24.0, H_est)], -8 * g * LOG2PI)


# ---------------------------------------------------------------- bounds

def ybound_margin(pm, H, s):
    g = pm.g
    return g * (s + 0.25) * math.log((4 * s + 1) / 2.0) - s * pm.logdetY - H


def theta_bound_rhs(g, r):
    return math.log(autissier_constant(g)) + g * (1 + r) / 4.0 * math.log((1 + r) / (2.0 * r))


def green_sup_bound(g, delta, r):
    return ((1 + r) / 24.0) * delta + (g * (1 + r) / 3.0) * LOG2PI + theta_bound_rhs(g, r)


def explicit_green_bound(g, delta):
    return max(6, g + 1) * delta / (24.0 * g) + 0.75 * g * math.log(g) + 4.0


def default_r(g):
    return max(6.0 / g - 1.0, 1.0) if g < 6 else 1.0


@dataclass
class Bound:
    name: str
    margin: float
    detail: str = ""

    @property
    def ok(self):
        return self.margin >= 0


def bounds_report(curve, pm, inv, r=None, s_values=(0.0, 0.25, 1.0), points=None,
                  green_values=None):
    """Margins of the standard inequalities; every margin should be >= 0.

    ``inv`` maps names to floats: H, and when available delta, phi,
    log_delta.  ``points`` is an array of torus points for the pointwise
    theta bounds; ``green_values`` a list of sampled g(P, Q).
    """
    g = pm.g
    r = default_r(g) if r is None else r
    out = []
    Hv = inv["H"]
    out.append(Bound("H < -(g/4) log 2", -(g / 4.0) * math.log(2) - Hv))
    for s in s_values:
        out.append(Bound(f"Ybound s={s:g}", ybound_margin(pm, Hv, s)))
    if points is not None:
        vals, _ = theta_norm_many(pm, points, None)
        out.append(Bound("Autissier", float(np.min(math.log(autissier_constant(g))
                                                   + 0.25 * pm.logdetY - vals)),
                         f"{len(vals)} points"))
        out.append(Bound(f"theta bound r={r:g}", float(theta_bound_rhs(g, r) - r * Hv - vals.max())))
    if "phi" in inv and g >= 2:
        out.append(Bound("phi > 0", inv["phi"]))
    if "delta" in inv:
        d = inv["delta"]
        out.append(Bound("delta > -2g log 2 pi^4", d + 2 * g * math.log(2 * math.pi ** 4)))
    if "log_delta" in inv and g >= 2:
        L = inv["log_delta"]
        n = _n(g)
        out.append(Bound("log||Delta|| upper", -2 * (2 * g + 1) * n * math.log(2) - L))
        if "delta" in inv:
            t = inv["delta"] + 8 * g * LOG2PI
            out.append(Bound("delta interval lower", t - (-L / n + 2 * (g - 1) * math.log(2))))
            out.append(Bound("delta interval upper", -(3 * g / ((2 * g + 1) * n)) * L - t))
    if green_values is not None and "delta" in inv:
        gmax = float(np.max(green_values))
        out.append(Bound(f"Green sup r={r:g}", green_sup_bound(g, inv["delta"], r) - gmax,
                         f"{len(green_values)} pairs"))
        out.append(Bound("Green explicit", explicit_green_bound(g, inv["delta"]) - gmax))
    return out


# ---------------------------------------------------------------- report

@dataclass
class Entry:
    value: float | None
    stderr: float | None
    provenance: str
    formula: str = ""

    def as_dict(self):
        return {"value": self.value, "stderr": self.stderr,
                "provenance": self.provenance, "formula": self.formula}


@dataclass
class InvariantReport:
    genus: int
    entries: dict = field(default_factory=dict)
    bounds: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def add(self, name, est, provenance, formula=""):
        if isinstance(est, Estimate):
            self.entries[name] = Entry(est.value, est.stderr, provenance, formula)
        else:
            self.entries[name] = Entry(float(est), None, provenance, formula)

    def value(self, name):
        return self.entries[name].value

    def as_dict(self):
        return {"genus": self.genus,
                "invariants": {k: e.as_dict() for k, e in self.entries.items()},
                "bounds": [{"name": b.name, "margin": b.margin, "ok": b.ok, "detail": b.detail}
                           for b in self.bounds],
                "config": self.config, "notes": self.notes}


def full_report(curve, pm, config=None, h_samples=200_000, kind="low-discrepancy",
                green_pairs=0, autissier_points=10_000):
    """Every invariant available for the input.

    With ``curve`` None only the period matrix is used: H, log||Delta_g||
    from the even theta constants (g <= 3), no Lambda.
    """
    cfg = config or aj.MCConfig()
    g = pm.g
    rep = InvariantReport(g, config={"samples": cfg.samples, "seed": cfg.seed, "eps": cfg.eps,
                                     "h_samples": h_samples, "kind": kind,
                                     "batches": cfg.batches})
    Hest = H(pm, h_samples, cfg.seed, kind, cfg.eps)
    rep.add("H", Hest, "MC", "torus mean of log||theta||")
    inv = {"H": Hest.value}
    if curve is None:
        if g >= 2 and g <= 3:
            L = delta_g_log(pm, "general-sum")
            rep.add("log_delta", L, "closed-form", "even theta constants, subset sums")
            inv["log_delta"] = L
        rep.notes.append("Lambda unavailable without a curve")
        for name in ("Lambda", "delta_ab", "phi_ab", "beta_ab"):
            rep.entries[name] = Entry(None, None, "unavailable", "Lambda unavailable")
        rng = np.random.default_rng(cfg.seed)
        u = rng.random((autissier_points, 2 * g))
        pts = u[:, :g] + u[:, g:] @ pm.omega.T
        rep.bounds = bounds_report(None, pm, inv, points=pts)
        return rep
    if g == 1:
        d = genus_one_delta(pm, samples=h_samples, seed=cfg.seed, kind=kind, eps=cfg.eps)
        rep.add("delta", d, "closed-form", "-24 H - 8 log 2pi")
        rep.add("phi", 0.0, "closed-form", "phi = 0 in genus one")
        inv.update(delta=d.value)
        rep.bounds = bounds_report(curve, pm, inv)
        return rep
    delta, phi, L = hyperelliptic_delta_phi(curve, pm, Hest)
    rep.add("log_delta", L, "closed-form", "product of even theta constants at Weierstrass classes")
    rep.add("delta", delta, "closed-form", "-(8(g-1)/g) H - log||Delta||/n - 8g log 2pi")
    rep.add("phi", phi, "closed-form", "(4(2g+1)/g) H - log||Delta||/(2n)")
    cf = closed_forms(pm, Hest, L)
    rep.add("beta", cf["beta"], "closed-form", "((2g-2) phi + (2g+1) delta)/3")
    rep.add("A", cf["A"], "closed-form", "phi/(2g) - H")
    S1 = aj.S_k(curve, pm, 1, config=cfg)
    Sg = aj.S_k(curve, pm, g, config=cfg)
    B = aj.B_invariant(curve, pm, config=cfg)
    Lam = aj.lambda_jacobian(curve, pm, config=cfg)
    rep.add("S_1", S1, "MC")
    rep.add("S_g", Sg, "MC")
    rep.add("B", B, "MC")
    rep.add("Lambda", Lam, "MC")
    d_ab, p_ab, b_ab = abelian_extensions(g, Hest, Lam)
    rep.add("delta_ab", d_ab, "MC", "2(g-7) H - 2 Lambda - 4g log 2pi")
    rep.add("phi_ab", p_ab, "MC", "(g+5) H - Lambda + 2g log 2pi")
    rep.add("beta_ab", b_ab, "MC", "2(g-4)(g+1) H - 2g Lambda - (4g(g+2)/3) log 2pi")
    inv.update(delta=delta.value, phi=phi.value, log_delta=L)
    rng = np.random.default_rng(cfg.seed)
    u = rng.random((autissier_points, 2 * g))
    pts = u[:, :g] + u[:, g:] @ pm.omega.T
    gv = None
    if green_pairs:
        A = closed_forms(pm, Hest, L)["A"]
        gv = green_sample(curve, pm, green_pairs, cfg, A)
    rep.bounds = bounds_report(curve, pm, inv, points=pts, green_values=gv)
    return rep


def green_sample(curve, pm, pairs, config, A):
    """Upper 3-sigma values of g(P, Q) at random mu-distributed pairs."""
    rng = aj._rng(config.seed + 7)
    x, y = aj.mu_sampler(pm).sample(rng, 2 * pairs)
    pts = [CurvePoint(complex(a), complex(b)) for a, b in zip(x, y)]
    est = aj.green_many(curve, pm, list(zip(pts[::2], pts[1::2])), config, A)
    return np.array([e.value + 3 * e.stderr for e in est])

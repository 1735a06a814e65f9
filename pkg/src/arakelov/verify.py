"""Property checks grouped into suites, shared by the CLI and the test-suite."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import chisquare

from . import abeljacobi as aj
from . import combinatorics as cb
from . import hyperelliptic as hy
from . import invariants as inv
from .numerics import combine
from .theta import (PeriodMatrix, autissier_constant, theta_derivs, theta_log,
                    theta_norm_many)

TABLE1 = {
    5: dict(log_delta=(-43.14, 0.05), H=(-0.485, 0.01), delta=(-16.68, 0.1), phi=(0.54, 0.05)),
    6: dict(log_delta=(-44.34, 0.05), H=(-0.495, 0.01), delta=(-16.34, 0.1), phi=(0.59, 0.05)),
    7: dict(log_delta=(-239.75, 0.3), H=(-0.706, 0.03), delta=(-24.36, 0.25), phi=(1.40, 0.15)),
    8: dict(log_delta=(-246.58, 0.3), H=(-0.719, 0.03), delta=(-23.84, 0.25), phi=(1.51, 0.15)),
}


@dataclass
class Check:
    name: str
    value: float
    tolerance: float
    ok: bool
    detail: str = ""

    def as_dict(self):
        return {"name": self.name, "value": self.value, "tolerance": self.tolerance,
                "pass": self.ok, "detail": self.detail}


def close(name, residual, tol, detail=""):
    r = float(abs(residual))
    return Check(name, r, tol, bool(r <= tol), detail)


def mc_zero(name, est, detail=""):
    """An estimate of something that should vanish: pass within 3 stderr."""
    tol = 3.0 * est.stderr
    return Check(name, abs(est.value), tol, bool(abs(est.value) <= tol),
                 detail or f"{est.value:.5g} +- {est.stderr:.2g}")


def margin(name, m, detail=""):
    return Check(name, float(m), 0.0, bool(m >= 0), detail)


@dataclass
class RunConfig:
    eps: float = 1e-10
    samples: int = 200_000
    mc_samples: int = 40_000
    seed: int = 42
    quad_order: int = 128
    kind: str = "low-discrepancy"

    def mc(self, offset=0, samples=None):
        return aj.MCConfig(samples=samples or self.mc_samples, seed=self.seed + offset,
                           eps=self.eps)


# ---------------------------------------------------------------- corpora

def random_curve(g, rng, min_gap=0.1):
    while True:
        pts = rng.normal(size=2 * g + 1) + 1j * rng.normal(size=2 * g + 1)
        d = np.abs(pts[:, None] - pts[None, :]) + np.eye(pts.size) * 10
        if d.min() > min_gap:
            return hy.HyperellipticCurve(pts, f"random-g{g}")


def random_corpus(genus, trials, seed):
    rng = np.random.default_rng(seed)
    return [random_curve(genus, rng) for _ in range(trials)]


def random_period_matrix(g, rng):
    """A random Omega with |Re| <= 1/2 and Im diagonally dominant, >= I."""
    X = rng.uniform(-0.5, 0.5, (g, g))
    X = 0.5 * (X + X.T)
    A = rng.uniform(-0.3, 0.3, (g, g))
    Y = np.eye(g) * (1.0 + rng.uniform(0, 1, g)) + 0.5 * (A + A.T) / g
    return PeriodMatrix(X + 1j * Y)


# ---------------------------------------------------------------- suites

def theta_suite(cfg, trials=3):
    rng = np.random.default_rng(cfg.seed)
    out = []
    for g in (1, 2, 3):
        for t in range(trials):
            pm = random_period_matrix(g, rng)
            z = rng.normal(size=g) * 0.5 + 1j * rng.normal(size=g) * 0.3
            grad, hess = theta_derivs(pm, z, eps=1e-14)
            h = 1e-5
            fd = np.zeros(g, complex)
            fdh = np.zeros((g, g), complex)
            for j in range(g):
                e = np.zeros(g)
                e[j] = h
                fd[j] = (theta_log(pm, z + e, eps=1e-14).value()
                         - theta_log(pm, z - e, eps=1e-14).value()) / (2 * h)
                fdh[:, j] = (theta_derivs(pm, z + e, eps=1e-14)[0]
                             - theta_derivs(pm, z - e, eps=1e-14)[0]) / (2 * h)
            scale = max(1.0, np.abs(grad).max())
            out.append(close(f"gradient FD g={g} #{t}", np.abs(fd - grad).max() / scale, 1e-5))
            scale = max(1.0, np.abs(hess).max())
            out.append(close(f"hessian FD g={g} #{t}", np.abs(fdh - hess).max() / scale, 1e-5))
            pts = rng.normal(size=(20, g)) + 1j * rng.normal(size=(20, g))
            a, _ = theta_norm_many(pm, pts, None, 1e-8)
            b, _ = theta_norm_many(pm, pts, None, 1e-13)
            out.append(close(f"truncation eps 1e-8 vs 1e-13 g={g} #{t}", np.abs(a - b).max(), 1e-6))
            n = rng.integers(-2, 3, g)
            m = rng.integers(-2, 3, g)
            c, _ = theta_norm_many(pm, pts + pm.omega @ n + m, None, 1e-13)
            out.append(close(f"lattice invariance g={g} #{t}", np.abs(c - b).max(), 1e-9))
        est = inv.theta_square_mass(pm, 2 ** 16, cfg.seed, cfg.kind)
        out.append(mc_zero(f"mean ||theta||^2 = 2^(-g/2), g={g}", est.scaled(1.0, -2 ** (-g / 2))))
    return out


def _periods_checks(curve, pm, tag):
    sym = float(np.max(np.abs(pm.omega - pm.omega.T)))
    eig = float(np.linalg.eigvalsh(pm.Y).min())
    return [close(f"{tag} symmetry", sym, 1e-10),
            margin(f"{tag} Im(Omega) positive", eig),
            close(f"{tag} odd theta constants vanish", hy.odd_constant_ratio(pm), 1e-8)]


def deterministic_suite(cfg, genus=None, trials=None):
    """Rosenhain, discriminant routes, de Jong, odd constants, Omega checks."""
    plans = [(2, 20), (3, 5)] if genus is None else [(genus, trials or 20)]
    out = []
    for g, n in plans:
        rng = np.random.default_rng(cfg.seed + g)
        for i, curve in enumerate(random_corpus(g, n, cfg.seed + 100 * g)):
            pm = hy.period_matrix(curve, cfg.quad_order)
            tag = f"g={g} #{i}"
            out += _periods_checks(curve, pm, tag)
            tau = list(rng.permutation(np.arange(1, 2 * g + 3)))
            out.append(close(f"{tag} Rosenhain tau={tau}", hy.rosenhain_residual(pm, tau=tau), 1e-5))
            out.append(close(f"{tag} Rosenhain identity", hy.rosenhain_residual(pm), 1e-5))
            out.append(close(f"{tag} discriminant via infinity vs all points",
                             hy.phi_g_log(pm, "infinity") - hy.phi_g_log(pm, "all"), 1e-5))
            if g <= 3:
                out.append(close(f"{tag} discriminant product vs even-constant sum",
                                 hy.delta_g_log(pm) - hy.delta_g_log(pm, "general-sum"), 1e-5))
            out.append(close(f"{tag} de Jong product", hy.de_jong_residual(pm), 1e-5))
    return out


def periods_suite(cfg, genus=2, trials=5):
    out = []
    for i, curve in enumerate(random_corpus(genus, trials, cfg.seed)):
        pm = hy.period_matrix(curve, cfg.quad_order)
        pm2 = hy.period_matrix(curve, 2 * cfg.quad_order)
        tag = f"g={genus} #{i}"
        out += _periods_checks(curve, pm, tag)
        out.append(close(f"{tag} quadrature order doubling", np.abs(pm.omega - pm2.omega).max(), 1e-10))
        res = 0.0
        for j in range(2 * genus + 1):
            P = hy.CurvePoint(curve.branch[j], 0j)
            v = aj.aj_point(curve, pm, P, start="inf", order=400)
            res = max(res, aj.lattice_residual(pm, v - pm.half_period(pm.weierstrass_chars[j]))[0])
        out.append(close(f"{tag} Weierstrass images are the half periods", res, 1e-6))
        rng = np.random.default_rng(cfg.seed + i)
        x = rng.normal(size=50) + 1j * rng.normal(size=50)
        y = np.sqrt(curve.f(x))
        a1, a2 = aj.aj_many(pm, x, y), aj.aj_many(pm, x, -y)
        out.append(close(f"{tag} AJ(P) + AJ(sigma P) = 0", aj.lattice_residual(pm, a1 + a2).max(), 1e-8))
        # additivity along a path: split at a waypoint via the forced-start routes
        P = hy.CurvePoint(x[0], y[0])
        v_inf = aj.aj_point(curve, pm, P, start="inf", order=600)
        out.append(close(f"{tag} AJ path independence", aj.lattice_residual(pm, v_inf - a1[0])[0], 1e-8))
    return out


def identities_suite(curve, cfg):
    """Monte Carlo identities on one curve; every check is within 3 stderr."""
    pm = hy.period_matrix(curve, cfg.quad_order)
    g = pm.g
    L = hy.delta_g_log(pm)
    af = inv.affine_in_H(g, L)
    H = inv.H(pm, cfg.samples, cfg.seed, cfg.kind, cfg.eps)
    S1 = aj.S_k(curve, pm, 1, config=cfg.mc(1))
    Sg = aj.S_k(curve, pm, g, config=cfg.mc(2))
    B = aj.B_invariant(curve, pm, config=cfg.mc(3))
    Lam = aj.lambda_jacobian(curve, pm, config=cfg.mc(4))
    out = []
    out.append(mc_zero("(g-1) H = g S_g - S_1",
                       combine([(g - 1.0, H), (-float(g), Sg), (1.0, S1)])))
    out.append(mc_zero("delta = 8(g-1) S_g - 8 B",
                       inv.with_H(H, [(1.0, af["delta"])], 0.0,
                                  [(-8.0 * (g - 1), Sg), (8.0, B)])))
    out.append(mc_zero("log||phi_g|| from B and S_g",
                       inv.phi_g_from_SB(g, Sg, B).scaled(1.0, -hy.phi_g_log(pm))))
    out.append(mc_zero("phi = (4/g)(H - S_1)",
                       inv.with_H(H, [(1.0, af["phi"]), (-4.0 / g, af["H"])], 0.0,
                                  [(4.0 / g, S1)])))
    out.append(mc_zero("Lambda = (g-1) H - delta/4 - phi/2",
                       inv.with_H(H, [(-1.0, af["Lambda"])], 0.0, [(1.0, Lam)])))
    d_ab = inv.with_H(H, [(2.0 * (g - 7), af["H"]), (-1.0, af["delta"])],
                      -4 * g * inv.LOG2PI, [(-2.0, Lam)])
    out.append(mc_zero("delta from (H, Lambda)", d_ab))
    Q = aj.default_Q(curve)
    rng = np.random.default_rng(cfg.seed + 5)
    xs, ys = aj.mu_sampler(pm).sample(rng, 2)
    P1, P2 = hy.CurvePoint(xs[0], ys[0]), hy.CurvePoint(xs[1], ys[1])
    a = aj.theta_divisor_integral(curve, pm, P1, P2, cfg.mc(6))
    b = aj.theta_divisor_integral(curve, pm, P2, P1, cfg.mc(7))
    out.append(mc_zero("Green symmetry g(P,Q) = g(Q,P)", a - b))
    m = aj.mean_theta_integral(curve, pm, Q, cfg.mc(8))
    out.append(mc_zero("Green mean zero over mu", inv.with_H(H, [(1.0, af["A"])], 0.0, [(1.0, m)])))
    if g >= 2:
        A = inv.closed_forms(pm, H, L)["A"]
        for t in range(10):
            xs, ys = aj.mu_sampler(pm).sample(rng, g)
            Ps = [hy.CurvePoint(complex(u), complex(v)) for u, v in zip(xs, ys)]
            r = aj.decomposition_residual(curve, pm, Ps, Q, Sg, A, cfg.mc(20 + t))
            out.append(mc_zero(f"theta decomposition, tuple {t}", r))
        e1, e2 = aj.h_alt_estimators(curve, pm, cfg.mc(9))
        out.append(mc_zero("H as X^g integral over P_1+..+P_g-Q", e1 - H))
        out.append(mc_zero("H as X^g integral over 2P_1+..-P_g", e2 - H))
        pair = aj.pair_theta_integral(curve, pm, cfg.mc(10))
        target = (af["phi"][0] / (2 * g * (g - 1)), af["phi"][1] / (2 * g * (g - 1)))
        out.append(mc_zero("Phi^* nu^g average of g(P_1, P_2) = phi/(2g(g-1))",
                           inv.with_H(H, [(1.0, af["A"]), (-1.0, target)], 0.0, [(1.0, pair)])))
        inner = aj.mean_theta_integral(curve, pm, Q, cfg.mc(11))
        dg = inv.with_H(H, [(4.0 * g - 24.0, af["H"]), (-1.0, af["delta"])],
                        -8 * g * inv.LOG2PI, [(-4.0 * g, inner)])
        out.append(mc_zero("delta via the Green double integral", dg))
    return out


def combinatorics_suite(cfg=None):
    out = []
    for g in range(1, 5):
        for k in range(0, g + 1):
            e, c = cb.enumerate_B(g, k), cb.closed_B(g, k)
            out.append(Check(f"B_{{{g},{k}}}", e, c, e == c, f"closed form {c}"))
    for k in range(2, 6):
        for v in ("A", "A'", "A''"):
            e, c = cb.enumerate_A(k, v), cb.closed_A(k, v)
            out.append(Check(f"{v}_{k}", e, c, e == c, f"closed form {c}"))
    rng = np.random.default_rng(0 if cfg is None else cfg.seed)
    for g in range(1, 21):
        coeffs = [int(c) for c in rng.integers(-9, 10, g)]
        r = cb.binom_identity_check(g, coeffs)
        out.append(Check(f"binomial identity g={g}", r, 0, r == 0))
    for g in range(3, 21):
        r = cb.alternating_pair_sum(g)
        out.append(Check(f"alternating binom(k-1,2) sum g={g}", r, 1, r == 1))
    return out


def bounds_for(curve, pm, cfg, green_pairs=0, h_samples=None, autissier_points=10_000):
    g = pm.g
    H = inv.H(pm, h_samples or cfg.samples, cfg.seed, cfg.kind, cfg.eps)
    invs = {"H": H.value}
    if g >= 2:
        d, p, L = inv.hyperelliptic_delta_phi(curve, pm, H)
        invs.update(delta=d.value, phi=p.value, log_delta=L)
    else:
        invs["delta"] = inv.genus_one_delta(pm, samples=h_samples or cfg.samples, seed=cfg.seed).value
    rng = np.random.default_rng(cfg.seed)
    u = rng.random((autissier_points, 2 * g))
    pts = u[:, :g] + u[:, g:] @ pm.omega.T
    gv = None
    if green_pairs and g >= 2:
        A = inv.closed_forms(pm, H, invs["log_delta"])["A"]
        gv = inv.green_sample(curve, pm, green_pairs, cfg.mc(samples=4000), A)
    return inv.bounds_report(curve, pm, invs, points=pts, green_values=gv)


def bounds_suite(cfg, curve=None, corpus=True, green_pairs=100):
    out = []
    curve = curve or hy.xn_plus_one(5)
    pm = hy.period_matrix(curve, cfg.quad_order)
    for b in bounds_for(curve, pm, cfg, green_pairs):
        out.append(margin(f"{curve.label}: {b.name}", b.margin, b.detail))
    if corpus:
        for g, n in ((2, 20), (3, 5)):
            for i, c in enumerate(random_corpus(g, n, cfg.seed + 100 * g)):
                p = hy.period_matrix(c, cfg.quad_order)
                for b in bounds_for(c, p, cfg, 0, h_samples=min(cfg.samples, 2 ** 15),
                                    autissier_points=2000):
                    out.append(margin(f"g={g} #{i}: {b.name}", b.margin, b.detail))
    return out


def genus_one_suite(cfg):
    out = []
    tau = 0.31 + 1.13j
    taus = {"tau": tau, "tau+1": tau + 1, "-1/tau": -1 / tau}
    est = {k: inv.genus_one_delta(PeriodMatrix([[t]]), samples=cfg.samples, seed=cfg.seed + i)
           for i, (k, t) in enumerate(taus.items())}
    out.append(mc_zero("delta(tau+1) = delta(tau)", est["tau+1"] - est["tau"]))
    out.append(mc_zero("delta(-1/tau) = delta(tau)", est["-1/tau"] - est["tau"]))
    curve = hy.HyperellipticCurve(-np.exp(2j * np.pi * np.arange(3) / 3), "x3+1")
    pm = hy.period_matrix(curve, cfg.quad_order)
    out.append(close("j(y^2 = x^3 + 1) = 0", abs(hy.j_invariant(pm)), 1e-5))
    x, y = aj.mu_sampler(pm).sample(np.random.default_rng(cfg.seed), 10_000)
    z = aj.aj_many(pm, x, y)[:, 0]
    q = z.imag / pm.Y[0, 0]
    p = z.real - q * pm.X[0, 0]
    cells = (np.floor(4 * (p % 1)) * 4 + np.floor(4 * (q % 1))).astype(int)
    pv = chisquare(np.bincount(cells, minlength=16)).pvalue
    out.append(Check("genus-1 mu is flat (chi-square p-value)", float(pv), 1e-3, bool(pv > 1e-3)))
    return out


def table1_rows(cfg, rows=(5, 6, 7, 8)):
    out = []
    for n in rows:
        curve = hy.xn_plus_one(n)
        pm = hy.period_matrix(curve, cfg.quad_order)
        H = inv.H(pm, cfg.samples, cfg.seed, cfg.kind, cfg.eps)
        d, p, L = inv.hyperelliptic_delta_phi(curve, pm, H)
        got = {"log_delta": L, "H": H.value, "delta": d.value, "phi": p.value}
        checks = {k: abs(got[k] - ref) <= tol for k, (ref, tol) in TABLE1[n].items()}
        out.append({"n": n, "genus": pm.g, "log_delta": L, "H": H.value, "H_stderr": H.stderr,
                    "delta": d.value, "phi": p.value,
                    "reference": {k: v[0] for k, v in TABLE1[n].items()},
                    "pass": all(checks.values()), "checks": checks})
    return out


SUITES = ("theta", "periods", "deterministic", "identities", "rosenhain", "combinatorics",
          "bounds", "genus1")

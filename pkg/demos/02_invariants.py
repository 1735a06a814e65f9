"""
Faltings delta and the phi invariant of a genus 2 curve
========================================================

H is the torus average of log||theta||.  Together with the discriminant
it gives delta and phi in closed form; Monte Carlo integrals over the
curve give the same numbers by a different route.
"""

from arakelov import abeljacobi as aj
from arakelov import hyperelliptic as hy
from arakelov import invariants as inv
from arakelov.numerics import combine

curve = hy.xn_plus_one(5)
pm = hy.period_matrix(curve)
g = pm.g

# low-discrepancy torus average, 2^17 points
H = inv.H(pm, samples=2 ** 17)
delta, phi, L = inv.hyperelliptic_delta_phi(curve, pm, H)
print(f"H     = {H.value:.5f} +- {H.stderr:.5f}")
print(f"delta = {delta.value:.4f} +- {delta.stderr:.4f}")
print(f"phi   = {phi.value:.4f} +- {phi.stderr:.4f}")

# the same phi from S_1, an integral over the curve against mu
cfg = aj.MCConfig(samples=40_000, seed=1)
S1 = aj.S_k(curve, pm, 1, config=cfg)
print(f"S_1   = {S1.value:.4f} +- {S1.stderr:.4f}")
print(f"phi from S_1 = {inv.phi_from_S1(g, H, S1).value:.4f}")

# delta from S_g and B
Sg = aj.S_k(curve, pm, g, config=aj.MCConfig(samples=40_000, seed=2))
B = aj.B_invariant(curve, pm, config=aj.MCConfig(samples=40_000, seed=3))
d2 = inv.delta_from_SB(g, Sg, B)
print(f"delta from S_g and B = {d2.value:.3f} +- {d2.stderr:.3f}")

# one of the linear relations; this should be zero within a few stderr
r = combine([(g - 1.0, H), (-float(g), Sg), (1.0, S1)])
print(f"(g-1)H - g S_g + S_1 = {r.value:.4f} +- {r.stderr:.4f}")

# the standard inequalities, reported as margins
for b in inv.bounds_report(curve, pm, {"H": H.value, "delta": delta.value,
                                        "phi": phi.value, "log_delta": L}):
    print(f"{b.name:28s} margin {b.margin:9.4f}")

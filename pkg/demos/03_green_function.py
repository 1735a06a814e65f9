"""
The Arakelov Green function
===========================

g(P, Q) is an integral of log||theta|| over a translate of the theta
divisor plus a constant.  We check its symmetry and that it averages to
zero against mu.
"""

import numpy as np

from arakelov import abeljacobi as aj
from arakelov import hyperelliptic as hy
from arakelov import invariants as inv

curve = hy.xn_plus_one(5)
pm = hy.period_matrix(curve)
A = inv.closed_forms(pm, samples=2 ** 16)["A"]
cfg = aj.MCConfig(samples=20_000, seed=7)

P = curve.point(0.3 + 0.5j)
Q = curve.point(-1.2 + 0.4j, sheet=-1)
gPQ = aj.green(curve, pm, P, Q, cfg, A=A)
gQP = aj.green(curve, pm, Q, P, aj.MCConfig(samples=20_000, seed=8), A=A)
print(f"g(P,Q) = {gPQ.value:.4f} +- {gPQ.stderr:.4f}")
print(f"g(Q,P) = {gQP.value:.4f} +- {gQP.stderr:.4f}")

# the Green function has a log singularity on the diagonal
for t in (1e-1, 1e-2, 1e-3):
    R = curve.point(P.x + t)
    e = aj.green(curve, pm, P, R, cfg, A=A)
    print(f"|x(P) - x(R)| = {t:g}: g = {e.value:7.3f}, g - log t = {e.value - np.log(t):7.3f}")

# average over Q drawn from mu
m = aj.mean_theta_integral(curve, pm, P, aj.MCConfig(samples=40_000, seed=9))
avg = inv.with_H(inv.H(pm, 2 ** 16), [(1.0, inv.affine_in_H(pm.g, hy.delta_g_log(pm))["A"])],
                 0.0, [(1.0, m)])
print(f"mu-average of g(., P) = {avg.value:.4f} +- {avg.stderr:.4f}")

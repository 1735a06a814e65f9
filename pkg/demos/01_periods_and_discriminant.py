"""
Period matrices and the discriminant modular form
=================================================

Build y^2 = x^5 + 1, compute its period matrix, and evaluate the
discriminant from even theta constants in two independent ways.
"""

import numpy as np

from arakelov import hyperelliptic as hy

# the branch points are the fifth roots of -1; infinity is the sixth
curve = hy.xn_plus_one(5)
pm = hy.period_matrix(curve)
print("genus", pm.g)
print("Omega =")
print(np.array2string(pm.omega, precision=6))

# symmetric with positive definite imaginary part
print("symmetry residual", np.abs(pm.omega - pm.omega.T).max())
print("smallest eigenvalue of Im(Omega)", np.linalg.eigvalsh(pm.Y).min())

# the Riemann constant for this basis, as a half-integer characteristic
print("Riemann constant", pm.K)

# log ||Delta_g||: product over the Weierstrass classes versus the
# subset sums of all even theta constants
a = hy.delta_g_log(pm)
b = hy.delta_g_log(pm, "general-sum")
print(f"log||Delta_2|| = {a:.10f} (product), {b:.10f} (subset sums)")

# the value does not depend on which branch point is sent to infinity
moved = hy.HyperellipticCurve(hy.move_to_infinity(curve.branch, 2))
print(f"after a Moebius move: {hy.delta_g_log(hy.period_matrix(moved)):.10f}")

# Rosenhain's identity ties first derivatives of odd thetas to even constants
print("Rosenhain residual", hy.rosenhain_residual(pm))

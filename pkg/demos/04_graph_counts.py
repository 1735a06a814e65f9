"""
Counting graphs by brute force
==============================

The coefficient computation for H reduces to weighted counts of
multigraphs built from tuples of loops and edges.  Small cases can be
enumerated outright and compared with the closed forms.
"""

from arakelov import combinatorics as cb

print(" g  k   enumerated   closed form")
for g in range(1, 5):
    for k in range(g + 1):
        print(f"{g:2d} {k:2d} {cb.enumerate_B(g, k):12d} {cb.closed_B(g, k):13d}")

print()
print(" k  variant  enumerated  closed form")
for k in range(2, 6):
    for v in ("A", "A'", "A''"):
        print(f"{k:2d}  {v:7s} {cb.enumerate_A(k, v):10d} {cb.closed_A(k, v):12d}")

# a graph and its invariants
G = cb.TupleGraph.of([("T", 1), ("D", 1, 2), ("D", 1, 2), ("D", 2, 3)], [1, 2, 3])
print()
print("degrees", dict(G.degree()), "betti", G.betti(), "bridge", G.has_bridge())

# alternating binomial sums kill polynomials of degree below g
print("sum (-1)^k (k^2 - 3k + 1) C(6, k) =", cb.binom_identity_check(6, [1, -3, 1]))

"""Exhaustive graph counts behind the coefficient computation for H.

A symbol is one of ``("T", j)`` (a loop at v_j) or ``("D", k, l)`` (an edge
v_k -- v_l, where l may be the extra vertex g+1).  A tuple of symbols gives a
multigraph; the counts below sum weights over all tuples.  Tuples are
enumerated as multisets and multiplied by the number of orderings, which is
exact because every weight is order independent.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, combinations_with_replacement


class ParameterTooLarge(ValueError):
    pass


class DegreeTooHigh(ValueError):
    pass


def symbols(n, g=None):
    """Symbols over n vertices; with ``g`` also the edges to v_{g+1}."""
    out = [("T", j) for j in range(1, n + 1)]
    if g is not None:
        out += [("D", j, g + 1) for j in range(1, n + 1)]
    out += [("D", k, l) for k in range(1, n + 1) for l in range(k + 1, n + 1)]
    return out


@dataclass
class TupleGraph:
    vertices: tuple
    edges: tuple  # pairs, loops as (v, v)

    @classmethod
    def of(cls, syms, vertices):
        edges = tuple((s[1], s[1]) if s[0] == "T" else (s[1], s[2]) for s in syms)
        return cls(tuple(vertices), edges)

    def degree(self):
        deg = Counter({v: 0 for v in self.vertices})
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    def components(self, skip=None):
        parent = {v: v for v in self.vertices}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for i, (a, b) in enumerate(self.edges):
            if i != skip:
                parent[find(a)] = find(b)
        return len({find(v) for v in self.vertices})

    def betti(self):
        return len(self.edges) - len(self.vertices) + self.components()

    def has_bridge(self):
        c = self.components()
        return any(self.components(skip=i) > c for i in range(len(self.edges))
                   if self.edges[i][0] != self.edges[i][1])


def orderings(multiset):
    out = math.factorial(len(multiset))
    for m in Counter(multiset).values():
        out //= math.factorial(m)
    return out


def _touched(syms, k):
    out = set()
    for s in syms:
        for v in s[1:]:
            if v <= k:
                out.add(v)
    return out


def b_weight(syms, g):
    """Weight of a tuple in the count B_{g,k}, k = len(syms)."""
    k = len(syms)
    for l in range(1, k + 1):
        for sub in combinations(syms, l):
            if len(_touched(sub, k)) <= l - 1:
                return 0
    G = TupleGraph.of(syms, range(1, g + 2))
    return (2 - 2 * g) ** G.betti() * (-1) ** G.degree()[g + 1]


def enumerate_B(g, k):
    """Sum of weights over all k-tuples of symbols on g vertices plus v_{g+1}."""
    if g > 4 or k > 4:
        raise ParameterTooLarge("enumeration is limited to g <= 4, k <= 4")
    if not 0 <= k <= g:
        raise ValueError("need 0 <= k <= g")
    return sum(orderings(ms) * b_weight(ms, g)
               for ms in combinations_with_replacement(symbols(g, g), k))


def closed_B(g, k):
    return (-1) ** k * math.factorial(k) * math.factorial(g) // math.factorial(g - k)


def classify(syms, n):
    """'A' (theta graph), "A'" (dumbbell), "A''" (figure eight) or None."""
    G = TupleGraph.of(syms, range(1, n + 1))
    if G.components() != 1:
        return None
    deg = sorted(G.degree().values())
    if any(d not in (2, 3, 4) for d in deg):
        return None
    if deg.count(4) == 1 and deg.count(2) == n - 1:
        return "A''"
    if deg.count(3) == 2 and deg.count(2) == n - 2:
        return "A'" if G.has_bridge() else "A"
    return None


_VARIANTS = {"A": "A", "A'": "A'", "A''": "A''", "Ap": "A'", "App": "A''"}


def enumerate_A(k, variant="A"):
    """Number of k-tuples of loop/edge symbols on k-1 vertices of the given shape."""
    if k > 5:
        raise ParameterTooLarge("enumeration is limited to k <= 5")
    want = _VARIANTS[variant]
    n = k - 1
    if n < 1:
        return 0
    return sum(orderings(ms) for ms in combinations_with_replacement(symbols(n), k)
               if classify(ms, n) == want)


def closed_A(k, variant="A"):
    v = _VARIANTS[variant]
    base = math.factorial(k) * math.factorial(k - 1)
    if v == "A":
        return math.comb(k - 1, 2) * base // 12
    if k == 2:
        return 0 if v == "A'" else 1
    if v == "A'":
        val = Fraction(base, 8) * Fraction(k * k + k - 4, 2)
    else:
        val = Fraction(base, 8) * (k + 1)
    if val.denominator != 1:
        raise ValueError(f"closed form is not an integer at k = {k}")
    return val.numerator


def binom_identity_check(g, coeffs):
    """sum_k (-1)^k f(k) binom(g, k) for f with integer coefficients (constant first)."""
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if len(coeffs) - 1 >= g:
        raise DegreeTooHigh(f"deg f = {len(coeffs) - 1} but g = {g}")
    if g > 20:
        raise ParameterTooLarge("g <= 20")

    def f(k):
        return sum(c * k ** i for i, c in enumerate(coeffs))

    return sum((-1) ** k * f(k) * math.comb(g, k) for k in range(g + 1))


def alternating_pair_sum(g):
    """sum_{k=3}^g (-1)^(k-1) binom(k-1, 2) binom(g, k); equals 1 for g >= 3."""
    return sum((-1) ** (k - 1) * math.comb(k - 1, 2) * math.comb(g, k) for k in range(3, g + 1))

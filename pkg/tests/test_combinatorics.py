import itertools

import pytest

from arakelov import combinatorics as cb


def test_B_examples():
    assert cb.enumerate_B(3, 0) == 1
    assert cb.enumerate_B(3, 1) == -3
    assert cb.enumerate_B(4, 2) == 24


def test_A_examples():
    assert cb.enumerate_A(3, "A") == 1
    assert cb.enumerate_A(4, "A") == 36
    assert cb.enumerate_A(2, "A'") == 0
    assert cb.enumerate_A(2, "A''") == 1


def test_limits():
    with pytest.raises(cb.ParameterTooLarge):
        cb.enumerate_B(5, 1)
    with pytest.raises(cb.ParameterTooLarge):
        cb.enumerate_A(6)
    with pytest.raises(cb.DegreeTooHigh):
        cb.binom_identity_check(3, [0, 0, 0, 1])


def test_binomial_identity():
    assert cb.binom_identity_check(3, [1]) == 0
    assert cb.binom_identity_check(7, [3, -1, 4, 1, -5, 9, 2]) == 0
    assert cb.alternating_pair_sum(5) == 1


def test_weights_are_order_independent():
    syms = cb.symbols(3, 3)
    for t in itertools.islice(itertools.product(syms, repeat=3), 0, None, 97):
        w = cb.b_weight(t, 3)
        for p in itertools.permutations(t):
            assert cb.b_weight(p, 3) == w
            assert cb.classify(p, 2) == cb.classify(t, 2) if all(
                max(s[1:]) <= 2 for s in t) else True


def test_graph_invariants():
    G = cb.TupleGraph.of([("T", 1), ("D", 1, 2), ("D", 1, 2)], [1, 2, 3])
    assert G.betti() == 2
    assert sum(G.degree().values()) == 2 * len(G.edges)
    assert not G.has_bridge()
    assert cb.TupleGraph.of([("T", 1), ("D", 1, 2), ("T", 2)], [1, 2]).has_bridge()

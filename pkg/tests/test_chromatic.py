import random

import pytest
from hypothesis import given, strategies as st

from oracles import brute_graph_colorings
from weavesheaf.chromatic import (
    IntPolynomial,
    _contract,
    chromatic_poly,
    eval_poly,
    falling_factorial,
    graph_chromatic_poly,
)
from weavesheaf.surface_map import build_named, face_adjacency

t = IntPolynomial.t()
K4 = [(a, b) for a in range(4) for b in range(a + 1, 4)]


def random_graph(rng, n, p):
    return [(a, b) for a in range(n) for b in range(a + 1, n) if rng.random() < p]


def test_examples():
    assert graph_chromatic_poly(1, []) == t
    assert graph_chromatic_poly(4, K4) == t * (t - 1) * (t - 2) * (t - 3)
    assert graph_chromatic_poly(2, [(0, 0)]).is_zero
    assert chromatic_poly(face_adjacency(build_named("loop"))).is_zero


def test_eval_examples():
    p = graph_chromatic_poly(4, K4)
    assert eval_poly(p, 3) == 0 and p(6) == 360
    assert IntPolynomial(()).is_zero and eval_poly(IntPolynomial(()), 9) == 0


def test_falling_factorial_and_factoring():
    assert falling_factorial(4) == graph_chromatic_poly(4, K4)
    assert graph_chromatic_poly(4, K4).factored_str() == "t*(t-1)*(t-2)*(t-3)"
    assert str(IntPolynomial((0, -1, 1))) == "t^2 - t"


def test_multi_edges_deduplicated():
    assert graph_chromatic_poly(2, [(0, 1), (1, 0), (0, 1)]) == t * (t - 1)


def test_polynomial_arithmetic():
    a, b = t - 1, t + 2
    assert (a * b)(5) == 4 * 7
    assert (a ** 3 - a * a * a).is_zero
    q, r = (a * b).divmod_linear(1)
    assert q == b and r == 0
    assert IntPolynomial((0, 0, 0)).degree == -1 or IntPolynomial((0, 0, 0)).is_zero


@given(st.integers(0, 10 ** 6))
def test_deletion_contraction(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 10)
    edges = random_graph(rng, n, 0.4)
    if not edges:
        edges = [(0, 1)]
    e = rng.choice(edges)
    rest = [x for x in edges if x != e]
    lhs = graph_chromatic_poly(n, edges)
    contracted = _contract(n, frozenset(tuple(sorted(x)) for x in rest), tuple(sorted(e)))
    rhs = graph_chromatic_poly(n, rest) - graph_chromatic_poly(n - 1, contracted)
    assert lhs == rhs


@given(st.integers(0, 10 ** 6))
def test_brute_force_equivalence(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 7)
    edges = random_graph(rng, n, 0.5)
    p = graph_chromatic_poly(n, edges)
    for tt in range(6):
        assert eval_poly(p, tt) == brute_graph_colorings(n, edges, tt)


@given(st.integers(0, 10 ** 6))
def test_degree_monic_alternating(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 9)
    p = graph_chromatic_poly(n, random_graph(rng, n, 0.4))
    assert p.degree == n and p.coeffs[-1] == 1
    for i, c in enumerate(p.coeffs):
        if c:
            assert (c > 0) == ((n - i) % 2 == 0)


@pytest.mark.parametrize("name", ["theta", "tetra", "bigon"])
def test_builtin_face_graphs(name):
    g = face_adjacency(build_named(name))
    p = chromatic_poly(g)
    for tt in range(6):
        assert p(tt) == brute_graph_colorings(g.n_faces, list(g.simple_adjacencies), tt)


def test_factored_str_finds_all_integer_roots():
    assert ((t - 2) ** 1).factored_str("q") == "(q-2)"
    assert (t * (t + 3) * (t * t + 1) * (t - 5)).factored_str() == "t*(t-5)*(t+3)*(t^2 + 1)"
    assert ((t - 1) ** 2 * (t - 2)).factored_str("q") == "(q-1)^2*(q-2)"

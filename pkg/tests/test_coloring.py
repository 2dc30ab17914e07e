import random

import pytest
from hypothesis import given, strategies as st

from oracles import brute_count
from weavesheaf.chromatic import chromatic_poly
from weavesheaf.coloring import (
    ColoringProblem,
    ColorSpace,
    FramingError,
    count_colorings,
    count_table,
    enumerate_colorings,
    framed_count,
    framed_problem,
)
from weavesheaf.surface_map import build_named, face_adjacency, random_planar_map
from weavesheaf.weave_moves import build_lambda, random_weave


def test_color_space():
    s = ColorSpace(4)
    assert s.size == 5 and len(s.colors) == 5
    assert len({s.zero, s.one, s.infinity}) == 3
    assert s.name(4) == "inf" and s.parse("∞") == 4 and s.parse("2") == 2
    assert s.is_prime_power and not ColorSpace(6).is_prime_power
    with pytest.raises(ValueError):
        ColorSpace(1)


def test_count_examples():
    assert count_colorings(ColoringProblem(build_named("bigon"), 3)) == 12
    assert count_colorings(ColoringProblem(build_named("tetra"), 2)) == 0
    assert framed_count(build_named("tetra"), 5) == 3


def test_framed_examples():
    for q in range(2, 10):
        assert framed_count(build_named("theta"), q) == 1
    assert framed_count(build_named("tetra"), 3) == 1
    assert framed_count(build_named("tetra"), 2) == 0
    with pytest.raises(FramingError):
        framed_count(build_named("bigon"), 3)


def test_enumeration_examples():
    e = enumerate_colorings(ColoringProblem(build_named("bigon"), 2), 20)
    assert e.total == 6 and len(e.assignments) == 6
    assert all(a[0] != a[1] for a in e.assignments)
    assert e.assignments == sorted(e.assignments, key=lambda a: (a[0], a[1]))
    e = enumerate_colorings(ColoringProblem(build_named("tetra"), 2), 10)
    assert e.assignments == [] and e.total == 0
    e = enumerate_colorings(framed_problem(build_named("theta"), 7), 10)
    assert e.assignments == [{0: 0, 1: 1, 2: 7}]


def test_count_table_examples():
    assert [c for _, c in count_table(build_named("tetra"), [2, 3, 4, 5], framed=True)] == \
        [0, 1, 2, 3]
    assert [c for _, c in count_table(build_named("bigon"), [2, 3])] == [6, 12]
    assert [c for _, c in count_table(build_named("theta"), [2, 3, 4])] == [6, 24, 60]


def test_loop_forces_zero():
    m = build_named("loop")
    p = ColoringProblem(m, 5)
    assert p.infeasibility() is not None
    assert all(count_colorings(ColoringProblem(m, q)) == 0 for q in range(2, 10))


def test_infeasible_fixed_assignment_counts_zero():
    p = ColoringProblem(build_named("bigon"), 3, fixed={0: 1, 1: 1})
    assert p.infeasibility() and count_colorings(p) == 0


@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3, 4]))
def test_matches_brute_force(seed, q):
    rng = random.Random(seed)
    m = random_planar_map(rng, rng.randint(1, 5), rng.randint(0, 3))
    assert count_colorings(ColoringProblem(m, q)) == brute_count(m, q)
    f = rng.randrange(m.F)
    c = rng.randrange(q + 1)
    assert count_colorings(ColoringProblem(m, q, fixed={f: c})) == brute_count(m, q, {f: c})


@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3, 5, 7]))
def test_oracle_equivalence(seed, q):
    rng = random.Random(seed)
    m = random_planar_map(rng, rng.randint(2, 8), rng.randint(0, 6))
    assert count_colorings(ColoringProblem(m, q)) == chromatic_poly(face_adjacency(m))(q + 1)


@given(st.integers(0, 10 ** 6))
def test_monotone_constraints(seed):
    rng = random.Random(seed)
    m = random_planar_map(rng, rng.randint(2, 6), rng.randint(0, 5))
    q = rng.choice([2, 3, 4, 5])
    fixed = {}
    last = count_colorings(ColoringProblem(m, q))
    for f in rng.sample(range(m.F), min(3, m.F)):
        fixed[f] = rng.randrange(q + 1)
        now = count_colorings(ColoringProblem(m, q, fixed=dict(fixed)))
        assert now <= last
        last = now


@pytest.mark.parametrize("m", [build_named("theta"), build_named("tetra"), build_lambda(2, 1),
                               build_lambda(3, 1), random_weave(random.Random(3), 4)])
def test_framing_consistency(m):
    for q in (2, 3, 4, 5, 7):
        total = count_colorings(ColoringProblem(m, q))
        framed = framed_count(m, q)
        if total:
            assert total == framed * (q + 1) * q * (q - 1)
        else:
            assert framed == 0


def test_non_prime_power_is_still_counted():
    assert framed_count(build_named("tetra"), 6) == 4

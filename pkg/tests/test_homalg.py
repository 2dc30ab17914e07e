import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import naive_homology, naive_matmul, naive_rank
from weavesheaf import homalg
from weavesheaf.homalg import ChainComplex, ChainMap, Homotopy, HomalgError


def rand_matrix(rng, r, c, p):
    return np.array([[rng.randrange(p) for _ in range(c)] for _ in range(r)], dtype=np.int64)


def test_d_squared_checked():
    d0 = np.array([[1]])
    d1 = np.array([[1]])
    with pytest.raises(HomalgError):
        ChainComplex(3, {0: 1, 1: 1, 2: 1}, {0: d0, 1: d1})
    with pytest.raises(HomalgError):
        ChainComplex(4, {0: 1})
    with pytest.raises(HomalgError):
        ChainComplex(3, {0: 1, 1: 2}, {0: np.array([[1, 0]])})


def test_cone_examples():
    C = ChainComplex(5, {0: 2, 1: 1}, {0: np.array([[1, 3]])})
    assert homalg.is_acyclic(homalg.cone(homalg.identity_map(C)))
    k = ChainComplex.concentrated(7, 1)
    assert homalg.homology_ranks(homalg.cone(homalg.zero_map(k, k))) == {0: 1, 1: 1}
    V = ChainComplex.concentrated(2, 2)
    f = ChainMap(V, V, {0: np.array([[1, 0], [0, 0]])})
    assert homalg.homology_ranks(homalg.cone(f)) == {0: 1, 1: 1}


def test_homology_examples():
    C = ChainComplex(3, {0: 2, 1: 3})
    assert homalg.homology_ranks(C) == {0: 2, 1: 3}
    E = ChainComplex(3, {0: 1, 1: 1}, {0: np.array([[1]])})
    assert homalg.homology_ranks(E) == {}


def test_quasi_iso_examples():
    C = ChainComplex(5, {0: 1, 1: 1})
    assert homalg.is_quasi_iso(homalg.identity_map(C))
    assert not homalg.is_quasi_iso(homalg.zero_map(C, C))
    one, two = ChainComplex.concentrated(3, 1), ChainComplex.concentrated(3, 2)
    inc = ChainMap(one, two, {0: np.array([[1], [0]])})
    assert not homalg.is_quasi_iso(inc)


def test_check_homotopy_examples():
    p = 2
    F = ChainComplex(p, {0: 1, 1: 1}, {0: np.array([[1]])})
    ident = homalg.identity_map(F)
    zero = homalg.zero_map(F, F)
    assert homalg.check_homotopy(Homotopy(F, F, {}), ident, ident, ident)
    # f02 - f12 f01 = id - 0 = dK + Kd with K^1 = 1
    K = Homotopy(F, F, {1: np.array([[1]])})
    assert homalg.check_homotopy(K, ident, zero, zero)
    assert not homalg.check_homotopy(Homotopy(F, F, {}), ident, zero, zero)
    G = ChainComplex(5, {0: 2})
    a = ChainMap(G, G, {0: np.array([[1, 0], [0, 2]])})
    assert not homalg.check_homotopy(Homotopy(G, G, {}), a, homalg.identity_map(G),
                                     homalg.identity_map(G))
    assert homalg.solve_homotopy(G, {0: (a - homalg.identity_map(G)).at(0)}) is None


def test_shift_and_sign():
    C = ChainComplex(5, {0: 1, 1: 1}, {0: np.array([[2]])})
    S = C.shift(1)
    assert S.dims == {-1: 1, 0: 1} and int(S.diff(-1)[0, 0]) == 3
    assert S.euler_char() == -C.euler_char()
    assert C.shift(2).shift(-2) == C


def test_euler_char_of_cone():
    rng = random.Random(3)
    for _ in range(50):
        p = rng.choice([2, 3, 5])
        A, B = homalg.random_complex(rng, p), homalg.random_complex(rng, p)
        f = homalg.random_chain_map(rng, A, B)
        # degree n of cone(f) is A^n (+) B^(n-1)
        assert homalg.cone(f).euler_char() == A.euler_char() - B.euler_char()
        # the unshifted mapping cone B (+) A[1]
        assert homalg.cone(f).shift(1).euler_char() == B.euler_char() - A.euler_char()


def test_cone_of_identity_random():
    rng = random.Random(11)
    for _ in range(100):
        C = homalg.random_complex(rng, rng.choice([2, 3, 5, 7]), max_pieces=4)
        assert homalg.is_acyclic(homalg.cone(homalg.identity_map(C)))


@given(st.integers(0, 10 ** 6))
def test_quasi_iso_invariant_under_isos(seed):
    rng = random.Random(seed)
    p = rng.choice([2, 3, 5])
    A, B = homalg.random_complex(rng, p), homalg.random_complex(rng, p)
    f = homalg.random_chain_map(rng, A, B)
    A2, u = homalg.conjugate(A, {n: homalg.random_invertible(rng, k, p) for n, k in A.dims.items()})
    B2, v = homalg.conjugate(B, {n: homalg.random_invertible(rng, k, p) for n, k in B.dims.items()})
    u_inv = ChainMap(A2, A, {n: homalg.inverse_mod(u.at(n), p) for n in A.dims})
    g = ChainMap(A2, B2, homalg.compose(v, homalg.compose(f, u_inv)).comps)
    assert homalg.is_quasi_iso(g) == homalg.is_quasi_iso(f)


@given(st.integers(0, 10 ** 6))
def test_linear_algebra_against_naive(seed):
    rng = random.Random(seed)
    p = rng.choice([2, 3, 5, 7])
    A, B = rand_matrix(rng, 6, 6, p), rand_matrix(rng, 6, 6, p)
    assert homalg.rank_mod(A, p) == naive_rank(A.tolist(), p)
    assert (A @ B % p).tolist() == naive_matmul(A.tolist(), B.tolist(), p)
    N = homalg.nullspace_mod(A, p)
    assert N.shape[1] == 6 - naive_rank(A.tolist(), p)
    assert not (A @ N % p).any()
    b = rand_matrix(rng, 6, 1, p)[:, 0]
    x = homalg.solve_mod(A, b, p)
    consistent = naive_rank(A.tolist(), p) == naive_rank(np.column_stack([A, b]).tolist(), p)
    assert (x is not None) == consistent
    if x is not None:
        assert ((A @ x - b) % p == 0).all()
    if homalg.is_invertible_mod(A, p):
        assert (A @ homalg.inverse_mod(A, p) % p == np.eye(6, dtype=np.int64)).all()


@given(st.integers(0, 10 ** 6))
def test_homology_against_naive(seed):
    rng = random.Random(seed)
    p = rng.choice([2, 3, 5])
    C = homalg.random_complex(rng, p, lo=-1, hi=2, max_pieces=5)
    d = {n: C.diff(n).tolist() for n in C.span()}
    assert homalg.homology_ranks(C) == naive_homology(C.dims, d, p)


def test_five_dim_complex_over_f5():
    rng = random.Random(0)
    for _ in range(20):
        C = homalg.random_complex(rng, 5, lo=0, hi=2, max_pieces=5)
        d = {n: C.diff(n).tolist() for n in C.span()}
        assert homalg.homology_ranks(C) == naive_homology(C.dims, d, 5)


@given(st.integers(0, 10 ** 6))
def test_d_squared_random(seed):
    rng = random.Random(seed)
    C = homalg.random_complex(rng, rng.choice([2, 3, 5]), max_pieces=5)
    for n in C.span():
        assert not (C.diff(n + 1) @ C.diff(n) % C.p).any()
    homalg.validate_complex(C)


def test_not_a_chain_map():
    C = ChainComplex(3, {0: 1, 1: 1}, {0: np.array([[1]])})
    with pytest.raises(HomalgError):
        ChainMap(C, C, {0: np.array([[1]])})


def test_induced_on_homology():
    V = ChainComplex.concentrated(5, 2)
    f = ChainMap(V, V, {0: np.array([[2, 0], [0, 3]])})
    assert (homalg.induced_on_homology(f, 0) == np.array([[2, 0], [0, 3]])).all()


def test_text_roundtrip():
    rng = random.Random(2)
    for _ in range(20):
        C = homalg.random_complex(rng, rng.choice([2, 3, 5]))
        assert homalg.parse_complex(homalg.serialize_complex(C)) == C
        f = homalg.random_chain_map(rng, C, C)
        g = homalg.parse_map(homalg.map_lines(f), C, C)
        assert g.equals(f)


def test_parse_errors():
    with pytest.raises(HomalgError):
        homalg.parse_complex("modulus 3\ndegrees 0 1\ndims 1\n")
    with pytest.raises(HomalgError):
        homalg.parse_complex("modulus 3\ndegrees 0 1\ndims 1 1\nd 0: 1 1\n")
    with pytest.raises(HomalgError):
        homalg.parse_complex("modulus 3\nwhat 1\n")


def test_identity_on_acyclic_is_null_homotopic():
    for p in (2, 3, 5):
        F = ChainComplex(p, {0: 1, 1: 1}, {0: np.array([[1]])})
        ident = homalg.identity_map(F)
        H = homalg.solve_homotopy(F, {n: ident.at(n) for n in F.span()})
        assert H is not None
        assert homalg.check_homotopy(H, ident, homalg.zero_map(F, F), homalg.zero_map(F, F))

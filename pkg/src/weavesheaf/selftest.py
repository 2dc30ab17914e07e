"""Randomised consistency checks behind ``weavesheaf selftest``."""

from __future__ import annotations

from . import homalg
from .chromatic import chromatic_poly
from .coloring import ColoringProblem, count_colorings, framed_count
from .elementary_cobordism import microstalk, random_datum
from .obstruct import les_chi, mv_chi
from .surface_map import face_adjacency, random_planar_map
from .weave_moves import build_lambda, lambda_prediction

QS = (2, 3, 4, 5, 7)


def _oracle(rng, rounds):
    for _ in range(rounds):
        m = random_planar_map(rng, rng.randint(2, 7), rng.randint(2, 6))
        poly = chromatic_poly(face_adjacency(m))
        for q in QS:
            if count_colorings(ColoringProblem(m, q)) != poly(q + 1):
                return False, f"mismatch at q={q} on a map with {m.F} faces"
    return True, f"{rounds} random maps, q in {list(QS)}"


def _lambda(rng, rounds):
    for g in range(4):
        for k in range(g + 1):
            m, pred = build_lambda(g, k), lambda_prediction(g, k)
            for q in (2, 3, 5):
                if framed_count(m, q) != pred(q):
                    return False, f"Lambda({g},{k}) at q={q}"
    return True, "framed counts of Lambda(g,k), g <= 3"


def _ranks(rng, rounds):
    for _ in range(rounds):
        d = random_datum(rng, rng.choice((2, 3, 5)))
        a, b, f = (homalg.homology_ranks(X) for X in (d.A, d.B, microstalk(d)))
        for n in set(a) | set(b) | set(f):
            if b.get(n, 0) != a.get(n, 0) + f.get(n, 0):
                return False, f"rank identity fails in degree {n}"
    return True, f"rk H(B) = rk H(A) + rk H(F) on {rounds} random data"


def _cones(rng, rounds):
    for _ in range(rounds):
        C = homalg.random_complex(rng, rng.choice((2, 3, 5)))
        if not homalg.is_acyclic(homalg.cone(homalg.identity_map(C))):
            return False, f"cone(id) not acyclic for {C}"
    return True, f"cone(id) acyclic on {rounds} random complexes"


def _triangles(rng, rounds):
    for _ in range(rounds):
        args = [rng.randint(-6, 6), rng.randint(-6, 6), rng.randint(0, 3), rng.randint(0, 3),
                rng.randint(-20, 20)]
        if les_chi(*args) != mv_chi(*args):
            return False, f"relative and Mayer-Vietoris forms disagree at {args}"
    return True, f"{rounds} random Euler characteristic checks"


CHECKS = [("oracle", _oracle), ("lambda", _lambda), ("ranks", _ranks), ("cones", _cones),
          ("triangles", _triangles)]


def run_selftest(rng, rounds: int = 20) -> list[tuple[str, bool, str]]:
    return [(name, *fn(rng, rounds)) for name, fn in CHECKS]

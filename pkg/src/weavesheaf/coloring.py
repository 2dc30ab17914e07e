"""Proper colorings of faces by the points of the projective line over a q-element set.

Colors are opaque tokens ``0, 1, ..., q-1, inf``; internally ``inf`` is the
integer ``q``.  Only cardinality and the three named points matter, so ``q``
need not be a prime power here; counts are numbers of F_q-points only when it
is.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping

from .surface_map import CombMap, FaceGraph, face_adjacency


class FramingError(ValueError):
    """No triple of pairwise adjacent faces is available to pin."""


INF_NAMES = ("inf", "∞", "oo")


@dataclass(frozen=True)
class ColorSpace:
    q: int

    def __post_init__(self):
        if self.q < 2:
            raise ValueError(f"q must be at least 2, got {self.q}")

    @property
    def size(self) -> int:
        return self.q + 1

    @property
    def colors(self) -> range:
        return range(self.q + 1)

    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return 1

    @property
    def infinity(self) -> int:
        return self.q

    @property
    def is_prime_power(self) -> bool:
        n, p = self.q, 2
        while p * p <= n and n % p:
            p += 1
        if p * p > n:
            return True
        while n % p == 0:
            n //= p
        return n == 1

    def name(self, c: int) -> str:
        return "inf" if c == self.q else str(c)

    def parse(self, token: str) -> int:
        token = token.strip()
        if token in INF_NAMES:
            return self.q
        c = int(token)
        if not 0 <= c < self.q:
            raise ValueError(f"color {token!r} outside 0..{self.q - 1} or inf")
        return c


@dataclass
class ColoringProblem:
    map: CombMap
    q: int
    fixed: dict[int, int] = field(default_factory=dict)
    framing: tuple[int, int, int] | None = None

    def __post_init__(self):
        self.space = ColorSpace(self.q)
        self.graph: FaceGraph = face_adjacency(self.map)
        for f, c in self.fixed.items():
            if not 0 <= f < self.graph.n_faces:
                raise ValueError(f"fixed face {f} does not exist")
            if c not in self.space.colors:
                raise ValueError(f"color {c} outside the color space for q={self.q}")
        if self.framing is not None:
            a, b, c = self.framing
            if len({a, b, c}) != 3 or not all(self.graph.adjacent(x, y)
                                              for x, y in ((a, b), (a, c), (b, c))):
                raise FramingError(f"framing faces {self.framing} are not pairwise adjacent")

    def pinned(self) -> dict[int, int]:
        """Fixed colors together with the framing pins (0, 1, inf)."""
        pins = dict(self.fixed)
        if self.framing is not None:
            for f, c in zip(self.framing, (0, 1, self.q)):
                if pins.get(f, c) != c:
                    pins[f] = -1  # conflicting requests; caught by infeasibility()
                else:
                    pins[f] = c
        return pins

    def infeasibility(self) -> str | None:
        """Reason the problem trivially has no solutions, or None."""
        if self.graph.has_loop:
            return "face graph has a loop (an edge with one face on both sides)"
        pins = self.pinned()
        for f, c in pins.items():
            if c == -1:
                return f"face {f} is pinned to two different colors"
        for a, b in self.graph.simple_adjacencies:
            if a in pins and b in pins and pins[a] == pins[b]:
                return f"adjacent faces {a} and {b} are both fixed to {self.space.name(pins[a])}"
        return None


def branching_order(graph: FaceGraph, pinned: Mapping[int, int]) -> list[int]:
    """Unpinned faces, most-constrained-first: descending count of already placed
    neighbours, ties broken by smaller face id."""
    placed = set(pinned)
    order = []
    remaining = set(graph.faces) - placed
    while remaining:
        f = min(remaining, key=lambda x: (-len(graph.neighbors[x] & placed), x))
        order.append(f)
        placed.add(f)
        remaining.remove(f)
    return order


def count_colorings(p: ColoringProblem) -> int:
    """Exact number of proper colorings extending the pinned faces.

    Backtracking treats all colors not yet used as interchangeable: a face may
    take one of the colors already present in the partial assignment or a
    fresh one, and the fresh branch is weighted by the number of fresh colors.
    """
    if p.infeasibility():
        return 0
    g = p.graph
    pins = p.pinned()
    order = branching_order(g, pins)
    color = dict(pins)
    used = sorted(set(pins.values()))
    total_colors = p.q + 1
    # neighbours that are colored before each face in the order
    earlier = {}
    seen = set(pins)
    for f in order:
        earlier[f] = [n for n in g.neighbors[f] if n in seen]
        seen.add(f)
    next_token = [total_colors]

    def rec(i: int) -> int:
        if i == len(order):
            return 1
        f = order[i]
        forbidden = {color[n] for n in earlier[f]}
        total = 0
        for c in list(used):
            if c not in forbidden:
                color[f] = c
                total += rec(i + 1)
        fresh = total_colors - len(used)
        if fresh > 0:
            token = next_token[0]
            next_token[0] += 1
            used.append(token)
            color[f] = token
            total += fresh * rec(i + 1)
            used.pop()
            next_token[0] -= 1
        color.pop(f, None)
        return total

    return rec(0)


def framing_triple(graph: FaceGraph) -> tuple[int, int, int]:
    for a, b, c in combinations(graph.faces, 3):
        if graph.adjacent(a, b) and graph.adjacent(a, c) and graph.adjacent(b, c):
            return a, b, c
    raise FramingError("no triple of pairwise adjacent faces to pin to (0, 1, inf)")


def framed_problem(m: CombMap, q: int) -> ColoringProblem:
    return ColoringProblem(m, q, framing=framing_triple(face_adjacency(m)))


def framed_count(m: CombMap, q: int) -> int:
    """Colorings with the canonical framing triple pinned to (0, 1, inf)."""
    return count_colorings(framed_problem(m, q))


@dataclass
class Enumeration:
    assignments: list[dict[int, int]]
    total: int


def enumerate_colorings(p: ColoringProblem, limit: int) -> Enumeration:
    """First ``limit`` solutions, lexicographic by face id then color order 0..q-1, inf."""
    if limit < 0:
        raise ValueError("limit must be non-negative")
    total = count_colorings(p)
    out: list[dict[int, int]] = []
    if total == 0 or limit == 0:
        return Enumeration(out, total)
    g = p.graph
    pins = p.pinned()
    color: dict[int, int] = {}
    n = g.n_faces

    def rec(f: int) -> bool:
        if f == n:
            out.append(dict(color))
            return len(out) >= limit
        options = [pins[f]] if f in pins else p.space.colors
        for c in options:
            if all(color.get(nb) != c for nb in g.neighbors[f]):
                color[f] = c
                if rec(f + 1):
                    return True
                del color[f]
        return False

    rec(0)
    return Enumeration(out, total)


def count_table(m: CombMap, qs: list[int], framed: bool = False) -> list[tuple[int, int]]:
    rows = []
    for q in qs:
        if framed:
            rows.append((q, framed_count(m, q)))
        else:
            rows.append((q, count_colorings(ColoringProblem(m, q))))
    return rows

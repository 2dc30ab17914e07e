"""Combinatorial maps for embedded 2-graphs on closed oriented surfaces.

A map is stored as two permutations on a finite set of non-negative integer
darts: ``alpha`` pairs darts into edges and ``sigma`` rotates counterclockwise
around each vertex.  Faces are the cycles of ``phi = sigma o alpha``, i.e.
``phi(d) = sigma[alpha[d]]``.

Vertices, edges and faces are numbered by the smallest dart they contain, so
every derived quantity is reproducible across runs.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping


class MapStructureError(ValueError):
    """Permutation data refers to darts that do not exist or is otherwise unreadable."""

    def __init__(self, message: str, dart: int | None = None, line: int | None = None,
                 token: str | None = None):
        super().__init__(message)
        self.dart = dart
        self.line = line
        self.token = token


class UnsupportedMapError(ValueError):
    """The map is valid but outside what an operation supports (e.g. not trivalent)."""


def perm_cycles(perm: Mapping[int, int]) -> list[tuple[int, ...]]:
    """Cycles of a permutation, each starting at its smallest element, sorted."""
    seen: set[int] = set()
    cycles = []
    for start in sorted(perm):
        if start in seen:
            continue
        cyc = []
        d = start
        while d not in seen:
            seen.add(d)
            cyc.append(d)
            d = perm[d]
        cycles.append(tuple(cyc))
    return cycles


@dataclass(frozen=True, eq=False)
class CombMap:
    alpha: dict[int, int]
    sigma: dict[int, int]
    vertex_labels: dict[int, str] = field(default_factory=dict)
    edge_labels: dict[int, str] = field(default_factory=dict)

    @classmethod
    def from_cycles(cls, alpha_pairs: Iterable[tuple[int, int]],
                    sigma_cycles: Iterable[Iterable[int]], *,
                    vertex_labels: Mapping[int, str] | None = None,
                    edge_labels: Mapping[int, str] | None = None) -> "CombMap":
        alpha: dict[int, int] = {}
        for a, b in alpha_pairs:
            if a in alpha or b in alpha:
                raise MapStructureError(f"dart {a if a in alpha else b} appears in two alpha pairs",
                                        dart=a if a in alpha else b)
            alpha[a] = b
            alpha[b] = a
        sigma: dict[int, int] = {}
        for cyc in sigma_cycles:
            cyc = list(cyc)
            for i, d in enumerate(cyc):
                if d in sigma:
                    raise MapStructureError(f"dart {d} appears in two sigma cycles", dart=d)
                sigma[d] = cyc[(i + 1) % len(cyc)]
        return cls(alpha, sigma, dict(vertex_labels or {}), dict(edge_labels or {}))

    @property
    def darts(self) -> list[int]:
        return sorted(self.sigma)

    @cached_property
    def vertices(self) -> list[tuple[int, ...]]:
        return perm_cycles(self.sigma)

    @cached_property
    def edges(self) -> list[tuple[int, int]]:
        return [c for c in perm_cycles(self.alpha)]  # type: ignore[misc]

    @cached_property
    def phi(self) -> dict[int, int]:
        return {d: self.sigma[self.alpha[d]] for d in self.sigma}

    @cached_property
    def faces(self) -> list[tuple[int, ...]]:
        return perm_cycles(self.phi)

    @cached_property
    def vertex_of(self) -> dict[int, int]:
        return {d: i for i, cyc in enumerate(self.vertices) for d in cyc}

    @cached_property
    def edge_of(self) -> dict[int, int]:
        return {d: i for i, cyc in enumerate(self.edges) for d in cyc}

    @cached_property
    def face_of(self) -> dict[int, int]:
        return {d: i for i, cyc in enumerate(self.faces) for d in cyc}

    @property
    def V(self) -> int:
        return len(self.vertices)

    @property
    def E(self) -> int:
        return len(self.edges)

    @property
    def F(self) -> int:
        return len(self.faces)

    @cached_property
    def components(self) -> int:
        parent = {d: d for d in self.sigma}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for perm in (self.alpha, self.sigma):
            for a, b in perm.items():
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
        return len({find(d) for d in self.sigma})

    @property
    def euler_char(self) -> int:
        return self.V - self.E + self.F

    @property
    def genus(self) -> int:
        """Total genus of the base surface (summed over connected components)."""
        twice = 2 * self.components - self.euler_char
        return twice // 2

    def degree(self, v: int) -> int:
        return len(self.vertices[v])

    def edge_faces(self, e: int) -> tuple[int, int]:
        a, b = self.edges[e]
        return self.face_of[a], self.face_of[b]

    def faces_around(self, v: int) -> list[int]:
        """Faces at the corners of vertex ``v``, in rotation order."""
        return [self.face_of[self.alpha[self.sigma_inv[d]]] for d in self.vertices[v]]

    @cached_property
    def sigma_inv(self) -> dict[int, int]:
        return {b: a for a, b in self.sigma.items()}

    def canonical_form(self) -> tuple:
        """Relabelling-invariant code of the orbit structure (labels ignored)."""
        comps: dict[int, list[int]] = {}
        seen: set[int] = set()
        for d in self.darts:
            if d in seen:
                continue
            stack, comp = [d], []
            seen.add(d)
            while stack:
                x = stack.pop()
                comp.append(x)
                for y in (self.alpha[x], self.sigma[x]):
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            comps[d] = comp
        return tuple(sorted(self._component_code(c) for c in comps.values()))

    def _component_code(self, comp: list[int]) -> tuple:
        best = None
        for start in comp:
            label = {start: 0}
            order = [start]
            i = 0
            while i < len(order):
                x = order[i]
                i += 1
                for y in (self.alpha[x], self.sigma[x]):
                    if y not in label:
                        label[y] = len(order)
                        order.append(y)
            code = tuple((label[self.alpha[x]], label[self.sigma[x]]) for x in order)
            if best is None or code < best:
                best = code
        return best

    def is_isomorphic(self, other: "CombMap") -> bool:
        return self.canonical_form() == other.canonical_form()

    def relabeled(self, mapping: Mapping[int, int]) -> "CombMap":
        return CombMap(
            {mapping[a]: mapping[b] for a, b in self.alpha.items()},
            {mapping[a]: mapping[b] for a, b in self.sigma.items()},
            {mapping[d]: s for d, s in self.vertex_labels.items()},
            {mapping[d]: s for d, s in self.edge_labels.items()},
        )

    def compacted(self) -> "CombMap":
        """Same map with darts renumbered 0..N-1 in increasing order."""
        return self.relabeled({d: i for i, d in enumerate(self.darts)})

    def __repr__(self) -> str:
        return f"CombMap(V={self.V}, E={self.E}, F={self.F}, darts={len(self.sigma)})"


@dataclass
class ValidationReport:
    accepted: bool
    violations: list[str]
    warnings: list[str]
    V: int = 0
    E: int = 0
    F: int = 0
    components: int = 0
    genus: int | None = None
    vertex_degrees: dict[int, int] = field(default_factory=dict)

    def summary(self) -> str:
        status = "accepted" if self.accepted else "rejected"
        lines = [f"{status}: V={self.V} E={self.E} F={self.F} genus={self.genus}"]
        lines += [f"violation: {v}" for v in self.violations]
        lines += [f"warning: {w}" for w in self.warnings]
        return "\n".join(lines)


def validate_map(m: CombMap) -> ValidationReport:
    darts = set(m.sigma)
    for d, img in m.sigma.items():
        if not isinstance(d, int) or d < 0:
            raise MapStructureError(f"dart id {d!r} is not a non-negative integer", dart=d)
        if img not in darts:
            raise MapStructureError(f"sigma({d}) = {img} is not a dart", dart=img)
    for d, img in m.alpha.items():
        if d not in darts:
            raise MapStructureError(f"alpha is defined on {d}, which lies in no vertex", dart=d)
        if img not in darts:
            raise MapStructureError(f"alpha({d}) = {img} is not a dart", dart=img)
    for d in m.vertex_labels:
        if d not in darts:
            raise MapStructureError(f"vertex label on unknown dart {d}", dart=d)
    for d in m.edge_labels:
        if d not in darts:
            raise MapStructureError(f"edge label on unknown dart {d}", dart=d)

    violations = []
    for d in sorted(darts):
        if d not in m.alpha:
            violations.append(f"dart {d} has no alpha partner")
        elif m.alpha[d] == d:
            violations.append(f"alpha fixes dart {d}")
        elif m.alpha[m.alpha[d]] != d:
            violations.append(f"alpha is not an involution at dart {d}")
    if len(set(m.sigma.values())) != len(m.sigma):
        counts = Counter(m.sigma.values())
        bad = sorted(d for d, c in counts.items() if c > 1)
        violations.append(f"sigma is not injective (darts {bad} hit twice)")

    report = ValidationReport(accepted=not violations, violations=violations, warnings=[])
    if violations:
        return report
    report.V, report.E, report.F = m.V, m.E, m.F
    report.components = m.components
    report.genus = m.genus
    report.vertex_degrees = {v: len(c) for v, c in enumerate(m.vertices)}
    for v, deg in report.vertex_degrees.items():
        if deg != 3:
            report.warnings.append(f"vertex {v} has degree {deg} (weaves need trivalent vertices)")
    return report


def ensure_valid(m: CombMap) -> CombMap:
    report = validate_map(m)
    if not report.accepted:
        raise MapStructureError("invalid map: " + "; ".join(report.violations))
    return m


@dataclass(frozen=True)
class FaceGraph:
    """Faces of a map with one adjacency entry per edge (loops and repeats kept)."""

    n_faces: int
    adjacencies: tuple[tuple[int, int], ...]

    @property
    def faces(self) -> range:
        return range(self.n_faces)

    @cached_property
    def simple_adjacencies(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted({(a, b) for a, b in self.adjacencies if a != b}))

    @property
    def has_loop(self) -> bool:
        return any(a == b for a, b in self.adjacencies)

    @cached_property
    def neighbors(self) -> list[set[int]]:
        nb: list[set[int]] = [set() for _ in range(self.n_faces)]
        for a, b in self.simple_adjacencies:
            nb[a].add(b)
            nb[b].add(a)
        return nb

    def adjacent(self, a: int, b: int) -> bool:
        return b in self.neighbors[a]


def face_adjacency(m: CombMap) -> FaceGraph:
    ensure_valid(m)
    adj = []
    for a, b in m.edges:
        fa, fb = m.face_of[a], m.face_of[b]
        adj.append((min(fa, fb), max(fa, fb)))
    return FaceGraph(m.F, tuple(adj))


@dataclass(frozen=True)
class WeaveEuler:
    euler_char: int
    genus: int | None


def weave_euler_char(m: CombMap) -> WeaveEuler:
    """Euler characteristic of the weave surface, the double cover of the base
    surface branched at the trivalent vertices: ``2 chi(base) - V``."""
    ensure_valid(m)
    bad = [v for v in range(m.V) if m.degree(v) != 3]
    if bad:
        raise UnsupportedMapError(f"weave needs trivalent vertices; vertex {bad[0]} has degree "
                                  f"{m.degree(bad[0])}")
    chi = 2 * m.euler_char - m.V
    genus = (2 - chi) // 2 if m.components == 1 and chi % 2 == 0 else None
    return WeaveEuler(chi, genus)


# -- builtin graphs ----------------------------------------------------------

def _theta() -> CombMap:
    # two vertices joined by three edges
    return CombMap.from_cycles([(0, 1), (2, 3), (4, 5)], [(0, 2, 4), (1, 5, 3)])


def _tetra() -> CombMap:
    # edges: 0-1:(0,1) 0-2:(2,3) 0-3:(4,5) 1-2:(6,7) 1-3:(8,9) 2-3:(10,11)
    # rotations from a planar drawing with vertex 0 in the centre
    return CombMap.from_cycles(
        [(0, 1), (2, 3), (4, 5), (6, 7), (8, 9), (10, 11)],
        [(0, 2, 4), (1, 8, 6), (3, 7, 10), (5, 11, 9)],
    )


def _bigon() -> CombMap:
    return CombMap.from_cycles([(0, 1), (2, 3)], [(0, 2), (1, 3)])


def _loop() -> CombMap:
    # a single edge with the same face on both sides; its face graph has a loop
    return CombMap.from_cycles([(0, 1)], [(0,), (1,)])


BUILTINS = {"theta": _theta, "tetra": _tetra, "bigon": _bigon, "loop": _loop}


def build_named(name: str) -> CombMap:
    try:
        return ensure_valid(BUILTINS[name]())
    except KeyError:
        raise KeyError(f"unknown builtin graph {name!r}; choose from {sorted(BUILTINS)}") from None


# -- text and structured formats --------------------------------------------

def serialize(m: CombMap) -> str:
    """Line-oriented text form; darts are renumbered 0..N-1 first."""
    c = m.compacted()
    lines = [f"darts {len(c.sigma)}"]
    for a, b in c.edges:
        lines.append(f"alpha: {a} {b}")
    for cyc in c.vertices:
        lines.append("sigma: " + " ".join(map(str, cyc)))
    for d, text in sorted(c.vertex_labels.items()):
        lines.append(f"label vertex {d} {text}")
    for d, text in sorted(c.edge_labels.items()):
        lines.append(f"label edge {d} {text}")
    return "\n".join(lines) + "\n"


def _int_token(tok: str, lineno: int) -> int:
    try:
        val = int(tok)
    except ValueError:
        raise MapStructureError(f"line {lineno}: expected a dart id, got {tok!r}",
                                line=lineno, token=tok) from None
    if val < 0:
        raise MapStructureError(f"line {lineno}: negative dart id {tok!r}", line=lineno, token=tok)
    return val


def parse(text: str) -> CombMap:
    """Parse the text format, or the JSON form when the text starts with ``{``."""
    if text.lstrip().startswith("{"):
        return from_structured(json.loads(text))
    n = None
    pairs: list[tuple[int, int]] = []
    cycles: list[list[int]] = []
    vlabels: dict[int, str] = {}
    elabels: dict[int, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        if head == "darts":
            n = _int_token(rest.strip(), lineno)
        elif head == "alpha:":
            toks = rest.split()
            if len(toks) != 2:
                raise MapStructureError(f"line {lineno}: alpha needs exactly two darts",
                                        line=lineno, token=rest)
            pairs.append((_int_token(toks[0], lineno), _int_token(toks[1], lineno)))
        elif head == "sigma:":
            toks = rest.replace("(", " ").replace(")", " ").replace(",", " ").split()
            if not toks:
                raise MapStructureError(f"line {lineno}: empty sigma cycle", line=lineno)
            cycles.append([_int_token(t, lineno) for t in toks])
        elif head == "label":
            toks = rest.split(None, 2)
            if len(toks) < 3 or toks[0] not in ("vertex", "edge"):
                raise MapStructureError(f"line {lineno}: expected 'label vertex|edge DART TEXT'",
                                        line=lineno, token=rest)
            target = vlabels if toks[0] == "vertex" else elabels
            target[_int_token(toks[1], lineno)] = toks[2]
        else:
            raise MapStructureError(f"line {lineno}: unknown directive {head!r}",
                                    line=lineno, token=head)
    if n is None:
        raise MapStructureError("missing 'darts N' header")
    m = CombMap.from_cycles(pairs, cycles, vertex_labels=vlabels, edge_labels=elabels)
    _check_dart_range(m, n)
    return m


def _check_dart_range(m: CombMap, n: int) -> None:
    mentioned = set(m.sigma) | set(m.alpha)
    for d in sorted(mentioned):
        if d >= n:
            raise MapStructureError(f"dart {d} out of range for 'darts {n}'", dart=d)
    missing = sorted(set(range(n)) - set(m.sigma))
    if missing:
        raise MapStructureError(f"dart {missing[0]} is in no sigma cycle", dart=missing[0])


def to_structured(m: CombMap) -> dict:
    c = m.compacted()
    out: dict = {
        "darts": len(c.sigma),
        "alpha": [list(e) for e in c.edges],
        "sigma": [list(v) for v in c.vertices],
    }
    if c.vertex_labels or c.edge_labels:
        out["labels"] = {
            "vertex": {str(d): s for d, s in sorted(c.vertex_labels.items())},
            "edge": {str(d): s for d, s in sorted(c.edge_labels.items())},
        }
    return out


def from_structured(data: Mapping) -> CombMap:
    try:
        n = int(data["darts"]) if "darts" in data else None
        pairs = [(int(a), int(b)) for a, b in data["alpha"]]
        cycles = [[int(d) for d in cyc] for cyc in data["sigma"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise MapStructureError(f"malformed structured map: {exc}") from None
    labels = data.get("labels", {})
    m = CombMap.from_cycles(
        pairs, cycles,
        vertex_labels={int(k): v for k, v in labels.get("vertex", {}).items()},
        edge_labels={int(k): v for k, v in labels.get("edge", {}).items()},
    )
    if n is not None:
        _check_dart_range(m, n)
    return m


def random_planar_map(rng, n_vertices: int, n_extra_edges: int) -> CombMap:
    """Random connected map on the sphere: a random plane tree, then extra edges
    drawn inside randomly chosen faces (each splits one face in two)."""
    alpha: dict[int, int] = {}
    at_vertex: list[list[int]] = [[] for _ in range(n_vertices)]
    nxt = 0
    for v in range(1, n_vertices):
        u = rng.randrange(v)
        alpha[nxt], alpha[nxt + 1] = nxt + 1, nxt
        at_vertex[u].append(nxt)
        at_vertex[v].append(nxt + 1)
        nxt += 2
    if n_vertices == 1:
        # a single vertex needs one loop to be a map with darts
        alpha[0], alpha[1] = 1, 0
        at_vertex[0] += [0, 1]
        nxt = 2
    sigma: dict[int, int] = {}
    for darts in at_vertex:
        rng.shuffle(darts)
        for i, d in enumerate(darts):
            sigma[d] = darts[(i + 1) % len(darts)]
    for _ in range(n_extra_edges):
        m = CombMap(alpha, sigma)
        face = m.faces[rng.randrange(m.F)]
        # a corner of the face sits after alpha(d) in the rotation, for d in the face
        i, j = rng.randrange(len(face)), rng.randrange(len(face))
        for corner, new in ((face[i], nxt), (face[j], nxt + 1)):
            u = alpha[corner]
            sigma[new] = sigma[u]
            sigma[u] = new
        alpha[nxt], alpha[nxt + 1] = nxt + 1, nxt
        nxt += 2
    return ensure_valid(CombMap(dict(alpha), dict(sigma)))

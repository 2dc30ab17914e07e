"""Local surgeries on 2-graphs: triangle and bigon insertion, disk patches, and
the genus-g family built from the theta graph.

Triangle insertion is the connected sum with the Clifford torus and bigon
insertion the connected sum with the unknotted torus.  Each adds one face
whose admissible colors, once its neighbours are colored, number ``q - 2``
(three distinct neighbours) or ``q - 1`` (two).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

from .chromatic import IntPolynomial
from .surface_map import (
    CombMap,
    MapStructureError,
    UnsupportedMapError,
    build_named,
    ensure_valid,
    perm_cycles,
)


class PatchError(ValueError):
    """Excised region is not a disk, or the boundary matching is inconsistent."""


@dataclass
class Patch:
    """Replace the disk around host vertices ``excise`` by ``sigma``/``alpha``.

    ``alpha`` is partial: patch darts without a partner are boundary darts and
    ``matching`` sends each host boundary dart (a dart at an excised vertex whose
    partner lies outside) to the patch boundary dart that takes its place.
    """

    excise: tuple[int, ...]
    sigma: dict[int, int]
    alpha: dict[int, int]
    matching: dict[int, int]

    @classmethod
    def from_cycles(cls, excise, sigma_cycles, alpha_pairs, matching) -> "Patch":
        sigma: dict[int, int] = {}
        for cyc in sigma_cycles:
            cyc = list(cyc)
            for i, d in enumerate(cyc):
                sigma[d] = cyc[(i + 1) % len(cyc)]
        alpha: dict[int, int] = {}
        for a, b in alpha_pairs:
            alpha[a] = b
            alpha[b] = a
        return cls(tuple(excise), sigma, alpha, dict(matching))


@dataclass
class WeaveMove:
    kind: Literal["triangle_insertion", "bigon_insertion", "patch"]
    site: int | None = None
    patch: Patch | None = None


@dataclass
class MovePrediction:
    factor: IntPolynomial | None
    genus_delta: int | None
    description: str


def _fresh(m: CombMap, n: int) -> list[int]:
    start = max(m.sigma, default=-1) + 1
    return list(range(start, start + n))


def insert_triangle(m: CombMap, v: int) -> CombMap:
    """Blow trivalent vertex ``v`` up into a 3-cycle bounding a new triangular face."""
    ensure_valid(m)
    if not 0 <= v < m.V:
        raise UnsupportedMapError(f"no vertex {v}")
    if m.degree(v) != 3:
        raise UnsupportedMapError(f"triangle insertion needs a trivalent vertex; vertex {v} "
                                  f"has degree {m.degree(v)}")
    d = list(m.vertices[v])
    fresh = _fresh(m, 6)
    a, b = fresh[:3], fresh[3:]  # edge i joins a[i] at corner i to b[i] at corner i+1
    alpha = dict(m.alpha)
    sigma = dict(m.sigma)
    for i in range(3):
        alpha[a[i]] = b[i]
        alpha[b[i]] = a[i]
        cyc = (d[i], a[i], b[i - 1])
        for j in range(3):
            sigma[cyc[j]] = cyc[(j + 1) % 3]
    return ensure_valid(CombMap(alpha, sigma, _drop_vertex_label(m, d), dict(m.edge_labels)))


def _drop_vertex_label(m: CombMap, darts) -> dict[int, str]:
    gone = set(darts)
    return {k: s for k, s in m.vertex_labels.items() if k not in gone}


def insert_bigon(m: CombMap, e: int) -> CombMap:
    """Put two new trivalent vertices on edge ``e`` joined by a parallel edge."""
    ensure_valid(m)
    if not 0 <= e < m.E:
        raise UnsupportedMapError(f"no edge {e}")
    x, y = m.edges[e]
    if m.face_of[x] == m.face_of[y]:
        raise UnsupportedMapError(f"edge {e} has face {m.face_of[x]} on both sides")
    a1, a2, a3, b1, b2, b3 = _fresh(m, 6)
    alpha = dict(m.alpha)
    sigma = dict(m.sigma)
    for s, t in ((x, a1), (a2, b2), (a3, b3), (b1, y)):
        alpha[s] = t
        alpha[t] = s
    for cyc in ((a1, a2, a3), (b1, b3, b2)):
        for j in range(3):
            sigma[cyc[j]] = cyc[(j + 1) % 3]
    edge_labels = {k: s for k, s in m.edge_labels.items() if k not in (x, y)}
    return ensure_valid(CombMap(alpha, sigma, dict(m.vertex_labels), edge_labels))


# -- disk patches -------------------------------------------------------------

def _boundary_cycles(darts: set[int], sigma: dict[int, int], alpha: dict[int, int]):
    """Walk the region: boundary darts act as fixed points of alpha.

    Returns (boundary cycles as lists of boundary darts, number of interior faces).
    """
    def a(x):
        y = alpha.get(x)
        return y if y is not None and y in darts else x

    boundary = {x for x in darts if a(x) == x}
    walk = {x: sigma[a(x)] for x in darts}
    cycles = []
    interior = 0
    for cyc in perm_cycles(walk):
        bd = [x for x in cyc if x in boundary]
        if bd:
            # the walk leaves a boundary dart x by rotating at its own vertex
            cycles.append(bd)
        else:
            interior += 1
    return cycles, interior


def _region_shape(darts: set[int], sigma: dict[int, int], alpha: dict[int, int]):
    cycles, interior = _boundary_cycles(darts, sigma, alpha)
    n_vertices = len(perm_cycles({x: sigma[x] for x in darts}))
    n_edges = sum(1 for x in darts if alpha.get(x) in darts and alpha[x] != x) // 2
    chi = n_vertices - n_edges + interior
    return cycles, chi


def _check_disk(what: str, darts: set[int], sigma, alpha) -> list[int]:
    cycles, chi = _region_shape(darts, sigma, alpha)
    if len(cycles) != 1 or chi != 1:
        raise PatchError(f"{what} is not a disk ({len(cycles)} boundary components, "
                         f"Euler characteristic {chi})")
    return cycles[0]


def _same_cyclic_order(seq: list[int], other: list[int]) -> bool:
    if len(seq) != len(other):
        return False
    if not seq:
        return True
    try:
        k = other.index(seq[0])
    except ValueError:
        return False
    return other[k:] + other[:k] == seq


def apply_patch(m: CombMap, move: WeaveMove | Patch) -> CombMap:
    patch = move.patch if isinstance(move, WeaveMove) else move
    if patch is None:
        raise PatchError("patch move without a patch payload")
    ensure_valid(m)
    for v in patch.excise:
        if not 0 <= v < m.V:
            raise PatchError(f"excised vertex {v} does not exist")
    host_darts = {d for v in set(patch.excise) for d in m.vertices[v]}
    if not host_darts:
        raise PatchError("nothing to excise")
    host_cycle = _check_disk("excised region", host_darts, m.sigma, m.alpha)

    pdarts = set(patch.sigma)
    for x, y in patch.alpha.items():
        if x not in pdarts or y not in pdarts or patch.alpha.get(y) != x or x == y:
            raise PatchError(f"patch alpha is not a partial fixed-point-free involution at {x}")
    if set(patch.sigma.values()) != pdarts:
        raise PatchError("patch sigma is not a permutation")
    patch_cycle = _check_disk("replacement", pdarts, patch.sigma, patch.alpha)

    if set(patch.matching) != set(host_cycle):
        raise PatchError(f"matching covers host darts {sorted(patch.matching)}, boundary is "
                         f"{sorted(host_cycle)} ({len(host_cycle)} darts vs "
                         f"{len(patch.matching)})")
    if sorted(patch.matching.values()) != sorted(patch_cycle):
        raise PatchError(f"matching targets {sorted(patch.matching.values())}, patch boundary "
                         f"is {sorted(patch_cycle)}")
    if not _same_cyclic_order([patch.matching[h] for h in host_cycle], patch_cycle):
        raise PatchError("boundary matching does not preserve the cyclic order of the boundary")

    fresh = dict(zip(sorted(pdarts), _fresh(m, len(pdarts))))
    alpha = {x: y for x, y in m.alpha.items() if x not in host_darts}
    sigma = {x: y for x, y in m.sigma.items() if x not in host_darts}
    for x, y in patch.alpha.items():
        alpha[fresh[x]] = fresh[y]
    for x, y in patch.sigma.items():
        sigma[fresh[x]] = fresh[y]
    for h, p in patch.matching.items():
        outside = m.alpha[h]
        alpha[outside] = fresh[p]
        alpha[fresh[p]] = outside
    out = CombMap(
        alpha, sigma,
        {k: s for k, s in m.vertex_labels.items() if k not in host_darts},
        {k: s for k, s in m.edge_labels.items() if k not in host_darts},
    )
    ensure_valid(out)
    if out.genus != m.genus:
        raise PatchError("patch changed the genus of the base surface")
    return out


def identity_patch(m: CombMap, excise) -> Patch:
    """A patch that puts the excised disk back unchanged (fresh patch dart ids)."""
    darts = sorted({d for v in set(excise) for d in m.vertices[v]})
    local = {d: i for i, d in enumerate(darts)}
    inside = set(darts)
    sigma = {local[d]: local[m.sigma[d]] for d in darts}
    alpha = {local[d]: local[m.alpha[d]] for d in darts if m.alpha[d] in inside}
    matching = {d: local[d] for d in darts if m.alpha[d] not in inside}
    return Patch(tuple(excise), sigma, alpha, matching)


def triangle_patch(m: CombMap, v: int) -> Patch:
    """The patch form of ``insert_triangle(m, v)``."""
    d = list(m.vertices[v])
    # patch darts: corner i has outer dart i, a-dart 3+i, b-dart 6+i
    sigma_cycles = [(i, 3 + i, 6 + (i - 1) % 3) for i in range(3)]
    alpha_pairs = [(3 + i, 6 + i) for i in range(3)]
    return Patch.from_cycles((v,), sigma_cycles, alpha_pairs, {d[i]: i for i in range(3)})


def apply_move(m: CombMap, move: WeaveMove) -> CombMap:
    if move.kind == "triangle_insertion":
        return insert_triangle(m, move.site)
    if move.kind == "bigon_insertion":
        return insert_bigon(m, move.site)
    if move.kind == "patch":
        return apply_patch(m, move)
    raise ValueError(f"unknown move kind {move.kind!r}")


def predict(move: WeaveMove) -> MovePrediction:
    q = IntPolynomial.t()
    if move.kind == "triangle_insertion":
        return MovePrediction(q - 2, 1, "new triangle face avoids its three distinct neighbours")
    if move.kind == "bigon_insertion":
        return MovePrediction(q - 1, 1, "new bigon face avoids its two distinct neighbours")
    return MovePrediction(None, None, "no prediction for patch moves")


# -- the Lambda(g, k) family ---------------------------------------------------

def triangle_vertices(before: CombMap, after: CombMap) -> list[int]:
    """Vertex ids in ``after`` that are new relative to ``before`` (by dart content)."""
    old = {frozenset(c) for c in before.vertices}
    return [i for i, c in enumerate(after.vertices) if frozenset(c) not in old]


def first_bigon_site(m: CombMap) -> int:
    for e, (x, y) in enumerate(m.edges):
        if m.face_of[x] != m.face_of[y]:
            return e
    raise UnsupportedMapError("no edge with distinct faces on its two sides")


def build_lambda(g: int, k: int) -> CombMap:
    """Theta seed, then ``k`` triangle insertions and ``g - k`` bigon insertions
    at canonical sites.  The weave has genus ``g``."""
    if g < 0 or k < 0 or k > g:
        raise ValueError(f"need 0 <= k <= g, got g={g}, k={k}")
    m = build_named("theta")
    site = 0
    for _ in range(k):
        nxt = insert_triangle(m, site)
        site = min(triangle_vertices(m, nxt))
        m = nxt
    for _ in range(g - k):
        m = insert_bigon(m, first_bigon_site(m))
    return m


def lambda_prediction(g: int, k: int) -> IntPolynomial:
    q = IntPolynomial.t()
    return (q - 2) ** k * (q - 1) ** (g - k)


def parse_patch(text: str) -> Patch:
    """Text form: ``excise V...``, ``darts N``, ``sigma:``/``alpha:`` lines for the
    replacement, and ``match: HOST_DART PATCH_DART`` lines."""
    excise: list[int] = []
    cycles: list[list[int]] = []
    pairs: list[tuple[int, int]] = []
    matching: dict[int, int] = {}
    n = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        try:
            toks = [int(t) for t in rest.replace("(", " ").replace(")", " ").split()]
        except ValueError:
            raise MapStructureError(f"line {lineno}: expected integers after {head!r}",
                                    line=lineno, token=rest) from None
        if head == "excise":
            excise.extend(toks)
        elif head == "darts":
            n = toks[0]
        elif head == "sigma:":
            cycles.append(toks)
        elif head == "alpha:":
            pairs.append((toks[0], toks[1]))
        elif head == "match:":
            matching[toks[0]] = toks[1]
        else:
            raise MapStructureError(f"line {lineno}: unknown directive {head!r}",
                                    line=lineno, token=head)
    patch = Patch.from_cycles(excise, cycles, pairs, matching)
    if n is not None and set(patch.sigma) != set(range(n)):
        raise MapStructureError(f"patch darts do not match 'darts {n}'")
    return patch


def serialize_patch(p: Patch) -> str:
    lines = ["excise " + " ".join(map(str, p.excise)), f"darts {len(p.sigma)}"]
    for cyc in perm_cycles(p.sigma):
        lines.append("sigma: " + " ".join(map(str, cyc)))
    for x, y in sorted(p.alpha.items()):
        if x < y:
            lines.append(f"alpha: {x} {y}")
    for h, d in sorted(p.matching.items()):
        lines.append(f"match: {h} {d}")
    return "\n".join(lines) + "\n"


def random_weave(rng, steps: int, seed_graph: str = "theta") -> CombMap:
    """Trivalent sphere map grown from a builtin by random triangle and bigon insertions."""
    m = build_named(seed_graph)
    for _ in range(steps):
        if rng.random() < 0.5:
            m = insert_triangle(m, rng.randrange(m.V))
        else:
            eligible = [e for e, (x, y) in enumerate(m.edges) if m.face_of[x] != m.face_of[y]]
            m = insert_bigon(m, rng.choice(eligible))
    return m

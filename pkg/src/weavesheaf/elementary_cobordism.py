"""Local sheaf data near a Lagrangian k-handle and what happens to it.

A front near the attaching region has stalk ``A`` outside and ``B`` inside,
with transition maps ``r: A -> B`` and ``s: B -> A`` normalised so that
``s o r = id``.  Then ``B = r(A) (+) ker(s)`` and ``ker(s)`` is quasi-isomorphic
to the microstalk ``F``, the total complex of ``r``.  Gluing across a 1-handle
is an automorphism ``f_F`` of ``F``, acting on ``B`` as ``(id_A, f_F)``; a
2-handle needs a homotopy ``H012`` between ``f02`` and ``f12 o f01``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import homalg
from .chromatic import IntPolynomial
from .homalg import ChainComplex, ChainMap, Homotopy, HomalgError


class CobordismError(ValueError):
    pass


class NormalizationError(CobordismError):
    """The retraction datum does not satisfy ``s o r = id``."""


class MissingMonodromyError(CobordismError):
    pass


@dataclass(eq=False)
class SheafDatum:
    A: ChainComplex
    B: ChainComplex
    r: ChainMap
    s: ChainMap
    k: int = 1
    F_prime: ChainComplex | None = None
    f01: ChainMap | None = None
    f12: ChainMap | None = None
    f02: ChainMap | None = None
    H012: Homotopy | None = None
    transition: ChainMap | None = None

    @property
    def p(self) -> int:
        return self.A.p


def validate_datum(d: SheafDatum) -> None:
    if d.A.p != d.B.p:
        raise HomalgError(f"modulus mismatch: {d.A.p} vs {d.B.p}")
    if d.k < 1:
        raise CobordismError(f"handle index must be at least 1, got {d.k}")
    if d.r.source.dims != d.A.dims or d.r.target.dims != d.B.dims:
        raise CobordismError("r must map A to B")
    if d.s.source.dims != d.B.dims or d.s.target.dims != d.A.dims:
        raise CobordismError("s must map B to A")
    if not homalg.compose(d.s, d.r).equals(homalg.identity_map(d.A)):
        raise NormalizationError("s o r is not the identity of A")


def microstalk(d: SheafDatum) -> ChainComplex:
    """Total complex of ``r``, placed so that ``H(B) = H(A) + H(F)`` degreewise.

    Degree ``n`` is ``A^{n+1} (+) B^n`` with ``d(a, b) = (-d_A a, d_B b - r a)``.
    """
    validate_datum(d)
    return homalg.cone(d.r).shift(1)


def _inclusion(d: SheafDatum, F: ChainComplex, n: int) -> np.ndarray:
    """``B^n -> F^n``, ``b -> (0, b)``."""
    a, b = d.A.dim(n + 1), d.B.dim(n)
    return np.concatenate([np.zeros((a, b), dtype=np.int64), np.eye(b, dtype=np.int64)], axis=0)


def _projection(d: SheafDatum, n: int) -> np.ndarray:
    """``F^n -> B^n``, ``(a, b) -> (1 - r s) b``."""
    a, b = d.A.dim(n + 1), d.B.dim(n)
    comp = np.eye(b, dtype=np.int64) - d.r.at(n) @ d.s.at(n)
    return comp @ np.concatenate([np.zeros((b, a), dtype=np.int64),
                                  np.eye(b, dtype=np.int64)], axis=1) % d.p


def transport_to_B(d: SheafDatum, f_F: ChainMap) -> ChainMap:
    """The map ``(id_A, f_F)`` on ``B = r(A) (+) ker(s)``."""
    F = f_F.source
    comps = {}
    for n in d.B.span():
        rs = d.r.at(n) @ d.s.at(n)
        ker_part = _projection(d, n) @ f_F.at(n) @ _inclusion(d, F, n)
        comps[n] = rs + ker_part @ (np.eye(d.B.dim(n), dtype=np.int64) - rs)
    return ChainMap(d.B, d.B, comps)


@dataclass
class Extendability:
    ok: bool
    reason: str
    homotopy: Homotopy | None = None

    def __bool__(self) -> bool:
        return self.ok


def _concentrated(ranks: dict[int, int]) -> bool:
    return len(ranks) <= 1


def _need_k2_maps(d: SheafDatum) -> tuple[ChainMap, ChainMap, ChainMap]:
    if d.f01 is None or d.f12 is None or d.f02 is None:
        raise MissingMonodromyError("2-handle data needs f01, f12 and f02 on the microstalk")
    return d.f01, d.f12, d.f02


def can_extend(d: SheafDatum, strict: bool = True) -> Extendability:
    """Whether the sheaf extends over the handle.

    ``strict`` solves ``H d + d H = f02 - f12 o f01`` for 2-handles; otherwise
    only the induced maps on homology are compared.
    """
    F = microstalk(d)
    if d.k == 1:
        if d.F_prime is None:
            raise MissingMonodromyError("1-handle data needs the microstalk F' of the second "
                                        "component")
        left, right = homalg.homology_ranks(F), homalg.homology_ranks(d.F_prime)
        if left == right:
            return Extendability(True, f"microstalk ranks agree: {left}")
        return Extendability(False, f"microstalk ranks differ: {left} vs {right}")
    if d.k == 2:
        f01, f12, f02 = _need_k2_maps(d)
        for name, g in (("f01", f01), ("f12", f12), ("f02", f02)):
            if g.source.dims != F.dims or g.target.dims != F.dims:
                raise CobordismError(f"{name} is not an endomorphism of the microstalk")
        comp = homalg.compose(f12, f01)
        if not strict:
            for n in F.span():
                if not np.array_equal(homalg.induced_on_homology(f02, n),
                                      homalg.induced_on_homology(comp, n)):
                    return Extendability(False, f"monodromy nontrivial on H^{n}")
            return Extendability(True, "f02 and f12 o f01 agree on homology")
        if d.H012 is not None and homalg.check_homotopy(d.H012, f02, f12, f01):
            return Extendability(True, "supplied H012 satisfies the homotopy equation", d.H012)
        diff = f02 - comp
        H = homalg.solve_homotopy(F, {n: diff.at(n) for n in F.span()})
        if H is None:
            return Extendability(False, "H d + d H = f02 - f12 o f01 has no solution")
        reason = "homotopy found by linear solve"
        if d.H012 is not None:
            reason += " (the supplied H012 does not satisfy the equation)"
        return Extendability(True, reason, H)
    ranks = homalg.homology_ranks(F)
    if _concentrated(ranks):
        return Extendability(True, f"microstalk concentrated in one degree {ranks}; "
                                   f"no higher monodromy over S^{d.k - 1}")
    raise CobordismError(f"{d.k}-handle with microstalk spread over degrees {sorted(ranks)} "
                         "needs higher coherence data, which is not modelled")


@dataclass
class AttachResult:
    datum_plus: SheafDatum
    gluing: ChainMap | Homotopy | None
    transition_record: ChainMap | dict[str, ChainMap] | None


def attach_handle(d: SheafDatum, choice: ChainMap | Homotopy | None = None) -> AttachResult:
    verdict = can_extend(d)
    if not verdict:
        raise CobordismError(f"sheaf does not extend over the {d.k}-handle: {verdict.reason}")
    F = microstalk(d)
    if d.k == 1:
        if not isinstance(choice, ChainMap):
            raise CobordismError("1-handle gluing needs an automorphism f_F of the microstalk")
        if choice.source.dims != F.dims or choice.target.dims != F.dims:
            raise CobordismError("f_F is not an endomorphism of the microstalk")
        if not homalg.is_quasi_iso(choice):
            raise CobordismError("f_F is not invertible on homology")
        f_B = transport_to_B(d, choice)
        plus = SheafDatum(d.A, d.B, d.r, d.s, d.k, d.F_prime, transition=f_B)
        return AttachResult(plus, choice, f_B)
    if d.k == 2:
        f01, f12, f02 = _need_k2_maps(d)
        H = choice if choice is not None else verdict.homotopy
        if not isinstance(H, Homotopy) or not homalg.check_homotopy(H, f02, f12, f01):
            raise CobordismError("H012 does not satisfy H d + d H = f02 - f12 o f01")
        record = {name: transport_to_B(d, g) for name, g in (("f01", f01), ("f12", f12),
                                                              ("f02", f02))}
        plus = SheafDatum(d.A, d.B, d.r, d.s, d.k, f01=f01, f12=f12, f02=f02, H012=H)
        return AttachResult(plus, H, record)
    if choice is not None:
        raise CobordismError(f"a {d.k}-handle takes no gluing choice")
    return AttachResult(SheafDatum(d.A, d.B, d.r, d.s, d.k), None, None)


# -- choices and moduli factors -------------------------------------------------------

def gl_order(r: int, q: int) -> int:
    out = 1
    for i in range(r):
        out *= q ** r - q ** i
    return out


def gl_order_poly(r: int) -> IntPolynomial:
    t = IntPolynomial.t()
    out = IntPolynomial.const(1)
    for i in range(r):
        out = out * (t ** r - t ** i)
    return out


def invertible_matrices(r: int, p: int):
    """All invertible ``r x r`` matrices over F_p, by exhaustive enumeration."""
    for entries in itertools.product(range(p), repeat=r * r):
        m = np.array(entries, dtype=np.int64).reshape(r, r)
        if homalg.is_invertible_mod(m, p):
            yield m


def admissible_choices(d: SheafDatum) -> list[dict[int, np.ndarray]]:
    """Gluing choices for a 1-handle up to homotopy: automorphisms of ``H(F)``,
    one invertible matrix per degree, enumerated exhaustively."""
    if d.k != 1:
        raise CobordismError("gluing choices are enumerated for 1-handles only")
    ranks = homalg.homology_ranks(microstalk(d))
    degrees = sorted(ranks)
    per_degree = [list(invertible_matrices(ranks[n], d.p)) for n in degrees]
    return [dict(zip(degrees, combo)) for combo in itertools.product(*per_degree)]


@dataclass(frozen=True)
class HandleDescriptor:
    k: int
    same_component: bool = True
    rank: int = 1


def moduli_factor(h: HandleDescriptor) -> IntPolynomial:
    """Factor by which the rank-r moduli count grows across the handle."""
    if h.k < 1 or h.rank < 1:
        raise CobordismError(f"unsupported handle descriptor {h}")
    if h.k == 1:
        return gl_order_poly(h.rank) if h.same_component else IntPolynomial.const(1)
    return IntPolynomial.const(1)


# -- text format -------------------------------------------------------------------------

_COMPLEX_SECTIONS = ("A", "B", "Fprime")
_MAP_SECTIONS = ("r", "s", "f01", "f12", "f02", "fF", "transition")


def _sections(text: str) -> tuple[dict[str, str], dict[str, list[str]]]:
    header: dict[str, str] = {}
    sections: dict[str, list[str]] = {}
    current = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("section "):
            current = line.split(None, 1)[1].strip()
            if current in sections:
                raise CobordismError(f"duplicate section {current!r}")
            sections[current] = []
        elif current is None:
            key, _, val = line.partition(" ")
            header[key] = val.strip()
        else:
            sections[current].append(line)
    return header, sections


def parse_datum(text: str) -> SheafDatum:
    header, sec = _sections(text)
    for name in ("A", "B", "r", "s"):
        if name not in sec:
            raise CobordismError(f"datum is missing section {name!r}")
    p = int(header["modulus"]) if "modulus" in header else None
    A = homalg.parse_complex(sec["A"], p)
    B = homalg.parse_complex(sec["B"], A.p)
    r = homalg.parse_map(sec["r"], A, B)
    s = homalg.parse_map(sec["s"], B, A)
    d = SheafDatum(A, B, r, s, k=int(header.get("k", 1)))
    if "Fprime" in sec:
        d.F_prime = homalg.parse_complex(sec["Fprime"], A.p)
    F = microstalk(d)
    for name in ("f01", "f12", "f02"):
        if name in sec:
            setattr(d, name, homalg.parse_map(sec[name], F, F))
    if "H012" in sec:
        d.H012 = homalg.parse_map(sec["H012"], F, F, homotopy=True)
    return d


def parse_gluing(text: str, d: SheafDatum) -> ChainMap | Homotopy | None:
    _, sec = _sections(text)
    F = microstalk(d)
    if "fF" in sec:
        return homalg.parse_map(sec["fF"], F, F)
    if "H012" in sec:
        return homalg.parse_map(sec["H012"], F, F, homotopy=True)
    return None


def serialize_datum(d: SheafDatum) -> str:
    lines = [f"modulus {d.p}", f"k {d.k}"]
    for name, C in (("A", d.A), ("B", d.B), ("Fprime", d.F_prime)):
        if C is not None:
            lines.append(f"section {name}")
            lines += homalg.complex_lines(C)[1:]
    for name in ("r", "s", "f01", "f12", "f02", "transition"):
        f = getattr(d, name)
        if f is not None:
            lines.append(f"section {name}")
            lines += homalg.map_lines(f)
    if d.H012 is not None:
        lines.append("section H012")
        lines += homalg.map_lines(d.H012)
    return "\n".join(lines) + "\n"


def split_datum(p: int, dims_A: dict[int, int], dims_F: dict[int, int],
                dA: dict[int, np.ndarray] | None = None,
                dF: dict[int, np.ndarray] | None = None) -> SheafDatum:
    """The standard datum ``B = A (+) F`` with ``r`` the inclusion and ``s`` the projection."""
    A = ChainComplex(p, dims_A, dA or {})
    Fc = ChainComplex(p, dims_F, dF or {})
    B = homalg.direct_sum(A, Fc)
    r_comps, s_comps = {}, {}
    for n in B.dims:
        a, f = A.dim(n), Fc.dim(n)
        inc = np.concatenate([np.eye(a, dtype=np.int64), np.zeros((f, a), dtype=np.int64)])
        r_comps[n] = inc
        s_comps[n] = inc.T.copy()
    return SheafDatum(A, B, ChainMap(A, B, r_comps), ChainMap(B, A, s_comps))


def random_datum(rng, p: int, k: int = 1) -> SheafDatum:
    """``B = A (+) F`` for random complexes, in a randomly changed basis of ``B``,
    with ``F'`` and 2-handle monodromies drawn at random where ``k`` needs them."""
    A = homalg.random_complex(rng, p)
    Fc = homalg.random_complex(rng, p)
    base = split_datum(p, A.dims, Fc.dims, A.d, Fc.d)
    P = {n: homalg.random_invertible(rng, m, p) for n, m in base.B.dims.items()}
    B, iso = homalg.conjugate(base.B, P)
    inv = ChainMap(B, base.B, {n: homalg.inverse_mod(P[n], p) for n in B.dims})
    d = SheafDatum(A, B, homalg.compose(iso, base.r), homalg.compose(base.s, inv), k=k)
    d.r = ChainMap(A, B, d.r.comps)
    d.s = ChainMap(B, A, d.s.comps)
    F = microstalk(d)
    if k == 1:
        d.F_prime = F if rng.random() < 0.5 else homalg.random_complex(rng, p)
    elif k == 2:
        d.f01, d.f12, d.f02 = (homalg.random_chain_map(rng, F, F) for _ in range(3))
    return d

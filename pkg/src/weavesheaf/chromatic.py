"""Integer polynomials and chromatic polynomials by deletion-contraction.

This is the counting oracle for the coloring engine: it never enumerates
colorings, so agreement between the two is a genuine cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt
from typing import Iterable

from .surface_map import FaceGraph


@dataclass(frozen=True)
class IntPolynomial:
    """Univariate polynomial with integer coefficients in ascending degree."""

    coeffs: tuple[int, ...] = ()

    def __post_init__(self):
        c = list(self.coeffs)
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(int(x) for x in c))

    @classmethod
    def const(cls, c: int) -> "IntPolynomial":
        return cls((c,))

    @classmethod
    def linear(cls, root: int) -> "IntPolynomial":
        """The polynomial ``t - root``."""
        return cls((-root, 1))

    @classmethod
    def t(cls) -> "IntPolynomial":
        return cls((0, 1))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, t: int) -> int:
        return eval_poly(self, t)

    def _coerce(self, other) -> "IntPolynomial":
        if isinstance(other, IntPolynomial):
            return other
        if isinstance(other, int):
            return IntPolynomial.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return IntPolynomial(tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self):
        return IntPolynomial(tuple(-x for x in self.coeffs))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        if self.is_zero() or other.is_zero():
            return IntPolynomial()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(other.coeffs):
                    out[i + j] += x * y
        return IntPolynomial(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = IntPolynomial.const(1)
        for _ in range(n):
            out = out * self
        return out

    def divmod_linear(self, root: int) -> tuple["IntPolynomial", int]:
        """Synthetic division by ``t - root``; returns quotient and remainder."""
        if self.is_zero():
            return IntPolynomial(), 0
        acc = 0
        quot = []
        for c in reversed(self.coeffs):
            acc = acc * root + c
            quot.append(acc)
        rem = quot.pop()
        return IntPolynomial(tuple(reversed(quot))), rem

    def integer_root_factors(self, roots: Iterable[int]) -> tuple[list[int], "IntPolynomial"]:
        """Pull out factors ``(t - r)`` for the candidate roots, with multiplicity."""
        found = []
        rest = self
        for r in roots:
            while rest.degree > 0:
                quot, rem = rest.divmod_linear(r)
                if rem:
                    break
                found.append(r)
                rest = quot
        return found, rest

    def factored_str(self, var: str = "t") -> str:
        if self.is_zero():
            return "0"
        low = next(c for c in self.coeffs if c)
        divisors = _divisors(abs(low))
        roots, rest = self.integer_root_factors([0] + divisors + [-d for d in divisors])
        parts = []
        for r in sorted(set(roots), key=lambda r: (r < 0, abs(r))):
            mult = roots.count(r)
            base = var if r == 0 else f"({var}-{r})" if r > 0 else f"({var}+{-r})"
            parts.append(base if mult == 1 else f"{base}^{mult}")
        if rest.coeffs != (1,):
            parts.append(f"({rest.to_str(var)})" if rest.degree > 0 else str(rest.coeffs[0]))
        return "*".join(parts) if parts else "1"

    def to_str(self, var: str = "t") -> str:
        if self.is_zero():
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if i == 0:
                body = str(mag)
            else:
                mono = var if i == 1 else f"{var}^{i}"
                body = mono if mag == 1 else f"{mag}*{mono}"
            terms.append((sign, body))
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self) -> str:
        return self.to_str()


def _divisors(n: int) -> list[int]:
    small = [d for d in range(1, isqrt(n) + 1) if n % d == 0]
    return sorted(set(small) | {n // d for d in small})


def eval_poly(p: IntPolynomial, t: int) -> int:
    acc = 0
    for c in reversed(p.coeffs):
        acc = acc * t + c
    return acc


def falling_factorial(n: int) -> IntPolynomial:
    """``t (t-1) ... (t-n+1)``, the chromatic polynomial of the complete graph K_n."""
    out = IntPolynomial.const(1)
    for i in range(n):
        out = out * IntPolynomial.linear(i)
    return out


# -- deletion-contraction ----------------------------------------------------

Edge = tuple[int, int]


def _canonical_key(n: int, edges: frozenset[Edge]) -> tuple:
    # degree-refined relabelling: sound for memoisation, not a full isomorphism test
    deg = [0] * n
    nbrs: list[list[int]] = [[] for _ in range(n)]
    for a, b in edges:
        deg[a] += 1
        deg[b] += 1
        nbrs[a].append(b)
        nbrs[b].append(a)
    sig = [(deg[v], tuple(sorted(deg[u] for u in nbrs[v]))) for v in range(n)]
    order = sorted(range(n), key=lambda v: (sig[v], v))
    pos = {v: i for i, v in enumerate(order)}
    return n, tuple(sorted((min(pos[a], pos[b]), max(pos[a], pos[b])) for a, b in edges))


class ChromaticSolver:
    """Deletion-contraction with a memo table keyed on a canonical edge list.

    The memo lives on the instance; share one solver inside a single worker only.
    """

    def __init__(self):
        self.memo: dict[tuple, IntPolynomial] = {}

    def poly(self, n: int, edges: Iterable[Edge]) -> IntPolynomial:
        es = set()
        for a, b in edges:
            if a == b:
                return IntPolynomial()
            es.add((min(a, b), max(a, b)))
        return self._solve(n, frozenset(es))

    def _solve(self, n: int, edges: frozenset[Edge]) -> IntPolynomial:
        touched = sorted({v for e in edges for v in e})
        isolated = n - len(touched)
        if isolated:
            relabel = {v: i for i, v in enumerate(touched)}
            inner = frozenset((relabel[a], relabel[b]) for a, b in edges)
            return IntPolynomial.t() ** isolated * self._solve(len(touched), inner)
        if not edges:
            return IntPolynomial.const(1)
        if len(edges) == n * (n - 1) // 2:
            return falling_factorial(n)
        key = _canonical_key(n, edges)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        # pick the edge at a minimum-degree vertex to keep contractions small
        deg = [0] * n
        for a, b in edges:
            deg[a] += 1
            deg[b] += 1
        e = min(edges, key=lambda ab: (min(deg[ab[0]], deg[ab[1]]), ab))
        deleted = edges - {e}
        result = self._solve(n, deleted) - self._solve(n - 1, _contract(n, deleted, e))
        self.memo[key] = result
        return result


def _contract(n: int, edges: frozenset[Edge], e: Edge) -> frozenset[Edge]:
    """Merge the endpoints of ``e`` (already removed from ``edges``); parallel edges merge."""
    keep, gone = e
    out = set()
    for a, b in edges:
        a = keep if a == gone else a
        b = keep if b == gone else b
        a = a - 1 if a > gone else a
        b = b - 1 if b > gone else b
        out.add((min(a, b), max(a, b)))
    return frozenset(out)


def graph_chromatic_poly(n: int, edges: Iterable[Edge]) -> IntPolynomial:
    return ChromaticSolver().poly(n, edges)


def chromatic_poly(g: FaceGraph) -> IntPolynomial:
    """Chromatic polynomial of a face graph; any loop gives the zero polynomial."""
    if g.has_loop:
        return IntPolynomial()
    return graph_chromatic_poly(g.n_faces, g.simple_adjacencies)

"""Finite cochain complexes over prime fields.

Grading is cohomological: ``d[n]`` maps degree ``n`` to degree ``n + 1`` and is
stored as a ``dims[n+1] x dims[n]`` integer matrix reduced mod ``p``.  Missing
differentials and missing map components are zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np


class HomalgError(ValueError):
    pass


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


# -- linear algebra mod p -------------------------------------------------------

def as_matrix(rows, p: int, shape: tuple[int, int] | None = None) -> np.ndarray:
    m = np.array(rows, dtype=np.int64)
    if shape is not None:
        m = m.reshape(shape)
    elif m.ndim != 2:
        m = m.reshape((m.shape[0] if m.ndim else 0, -1))
    return m % p


def rref_mod(M: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over F_p and the pivot columns."""
    R = np.array(M, dtype=np.int64) % p
    rows, cols = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + nz[0]
        if k != r:
            R[[r, k]] = R[[k, r]]
        R[r] = (R[r] * pow(int(R[r, c]), -1, p)) % p
        for i in range(rows):
            if i != r and R[i, c]:
                R[i] = (R[i] - R[i, c] * R[r]) % p
        pivots.append(c)
        r += 1
    return R, pivots


def rank_mod(M: np.ndarray, p: int) -> int:
    if M.size == 0:
        return 0
    return len(rref_mod(M, p)[1])


def nullspace_mod(M: np.ndarray, p: int) -> np.ndarray:
    """Basis of the kernel as columns of a ``cols x k`` matrix."""
    rows, cols = M.shape
    R, pivots = rref_mod(M, p) if rows else (np.zeros((0, cols), dtype=np.int64), [])
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((cols, len(free)), dtype=np.int64)
    for j, fc in enumerate(free):
        basis[fc, j] = 1
        for i, pc in enumerate(pivots):
            basis[pc, j] = (-R[i, fc]) % p
    return basis


def solve_mod(A: np.ndarray, b: np.ndarray, p: int) -> np.ndarray | None:
    """One solution ``x`` of ``A x = b`` over F_p, or None when inconsistent."""
    rows, cols = A.shape
    aug = np.concatenate([A % p, (b % p).reshape(rows, 1)], axis=1)
    R, pivots = rref_mod(aug, p)
    if cols in pivots:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for i, pc in enumerate(pivots):
        x[pc] = R[i, cols]
    return x


def is_invertible_mod(M: np.ndarray, p: int) -> bool:
    return M.shape[0] == M.shape[1] and rank_mod(M, p) == M.shape[0]


def inverse_mod(M: np.ndarray, p: int) -> np.ndarray:
    n = M.shape[0]
    R, pivots = rref_mod(np.concatenate([M % p, np.eye(n, dtype=np.int64)], axis=1), p)
    if pivots[:n] != list(range(n)):
        raise HomalgError("matrix is not invertible")
    return R[:, n:]


# -- complexes --------------------------------------------------------------------

def _zeros(r: int, c: int) -> np.ndarray:
    return np.zeros((r, c), dtype=np.int64)


@dataclass(eq=False)
class ChainComplex:
    p: int
    dims: dict[int, int]
    d: dict[int, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if not is_prime(self.p):
            raise HomalgError(f"modulus {self.p} is not prime")
        self.dims = {n: int(k) for n, k in self.dims.items() if k}
        self.d = {n: np.asarray(m, dtype=np.int64) % self.p for n, m in self.d.items()}
        for n, m in self.d.items():
            if m.shape != (self.dim(n + 1), self.dim(n)):
                raise HomalgError(f"d[{n}] has shape {m.shape}, expected "
                                  f"{(self.dim(n + 1), self.dim(n))}")
        for n in self.d:
            if n + 1 in self.d and (self.d[n + 1] @ self.d[n] % self.p).any():
                raise HomalgError(f"d[{n + 1}] o d[{n}] != 0")

    @classmethod
    def concentrated(cls, p: int, dim: int, degree: int = 0) -> "ChainComplex":
        return cls(p, {degree: dim})

    def dim(self, n: int) -> int:
        return self.dims.get(n, 0)

    def diff(self, n: int) -> np.ndarray:
        m = self.d.get(n)
        return m if m is not None else _zeros(self.dim(n + 1), self.dim(n))

    @property
    def degrees(self) -> list[int]:
        return sorted(self.dims)

    def span(self) -> range:
        """Degrees in which anything (space or differential) can live."""
        if not self.dims:
            return range(0)
        return range(min(self.dims), max(self.dims) + 1)

    def euler_char(self) -> int:
        return sum((-1) ** (n % 2) * k for n, k in self.dims.items())

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def shift(self, k: int) -> "ChainComplex":
        """``C[k]``: degree n holds ``C^{n+k}``, differential multiplied by ``(-1)^k``."""
        sign = -1 if k % 2 else 1
        return ChainComplex(self.p, {n - k: v for n, v in self.dims.items()},
                            {n - k: sign * m for n, m in self.d.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, ChainComplex) or self.p != other.p or self.dims != other.dims:
            return False
        return all(np.array_equal(self.diff(n), other.diff(n)) for n in self.span())

    def __repr__(self) -> str:
        return f"ChainComplex(p={self.p}, dims={dict(sorted(self.dims.items()))})"


def validate_complex(C: ChainComplex) -> None:
    """Re-check shapes and ``d o d = 0`` (the constructor already does this)."""
    ChainComplex(C.p, C.dims, C.d)


def homology_ranks(C: ChainComplex) -> dict[int, int]:
    """``dim H^n = dim ker d_n - rank d_{n-1}``, zero entries omitted."""
    out = {}
    for n in C.span():
        ker = C.dim(n) - rank_mod(C.diff(n), C.p)
        img = rank_mod(C.diff(n - 1), C.p)
        if ker - img:
            out[n] = ker - img
    return out


def is_acyclic(C: ChainComplex) -> bool:
    return not homology_ranks(C)


def direct_sum(*cs: ChainComplex) -> ChainComplex:
    p = cs[0].p
    degs = sorted({n for c in cs for n in c.dims})
    dims = {n: sum(c.dim(n) for c in cs) for n in degs}
    d = {}
    for n in degs:
        blocks = [c.diff(n) for c in cs]
        d[n] = _block_diag(blocks)
    return ChainComplex(p, dims, d)


def _block_diag(blocks: list[np.ndarray]) -> np.ndarray:
    r = sum(b.shape[0] for b in blocks)
    c = sum(b.shape[1] for b in blocks)
    out = _zeros(r, c)
    i = j = 0
    for b in blocks:
        out[i:i + b.shape[0], j:j + b.shape[1]] = b
        i += b.shape[0]
        j += b.shape[1]
    return out


# -- maps ---------------------------------------------------------------------------

@dataclass(eq=False)
class ChainMap:
    source: ChainComplex
    target: ChainComplex
    comps: dict[int, np.ndarray] = field(default_factory=dict)
    check: bool = True

    def __post_init__(self):
        if self.source.p != self.target.p:
            raise HomalgError(f"modulus mismatch: {self.source.p} vs {self.target.p}")
        p = self.source.p
        self.comps = {n: np.asarray(m, dtype=np.int64) % p for n, m in self.comps.items()}
        for n, m in self.comps.items():
            if m.shape != (self.target.dim(n), self.source.dim(n)):
                raise HomalgError(f"component {n} has shape {m.shape}, expected "
                                  f"{(self.target.dim(n), self.source.dim(n))}")
        if self.check:
            bad = self.commutation_defect()
            if bad is not None:
                raise HomalgError(f"not a chain map: d f != f d in degree {bad}")

    @property
    def p(self) -> int:
        return self.source.p

    def at(self, n: int) -> np.ndarray:
        m = self.comps.get(n)
        return m if m is not None else _zeros(self.target.dim(n), self.source.dim(n))

    def degrees(self) -> range:
        lo = min([*self.source.span(), *self.target.span()], default=0)
        hi = max([*self.source.span(), *self.target.span()], default=-1)
        return range(lo, hi + 1)

    def commutation_defect(self) -> int | None:
        for n in self.degrees():
            lhs = self.target.diff(n) @ self.at(n)
            rhs = self.at(n + 1) @ self.source.diff(n)
            if ((lhs - rhs) % self.p).any():
                return n
        return None

    def __matmul__(self, other: "ChainMap") -> "ChainMap":
        """``self o other``."""
        return compose(self, other)

    def __sub__(self, other: "ChainMap") -> "ChainMap":
        return ChainMap(self.source, self.target,
                        {n: self.at(n) - other.at(n) for n in self.degrees()}, check=False)

    def __add__(self, other: "ChainMap") -> "ChainMap":
        return ChainMap(self.source, self.target,
                        {n: self.at(n) + other.at(n) for n in self.degrees()}, check=False)

    def scaled(self, c: int) -> "ChainMap":
        return ChainMap(self.source, self.target,
                        {n: c * m for n, m in self.comps.items()}, check=False)

    def equals(self, other: "ChainMap") -> bool:
        return all(not ((self.at(n) - other.at(n)) % self.p).any() for n in self.degrees())

    def is_iso(self) -> bool:
        return all(is_invertible_mod(self.at(n), self.p) if self.source.dim(n) or
                   self.target.dim(n) else True for n in self.degrees())


def identity_map(C: ChainComplex) -> ChainMap:
    return ChainMap(C, C, {n: np.eye(k, dtype=np.int64) for n, k in C.dims.items()})


def zero_map(A: ChainComplex, B: ChainComplex) -> ChainMap:
    return ChainMap(A, B, {})


def compose(g: ChainMap, f: ChainMap) -> ChainMap:
    """``g o f``."""
    if f.target.dims != g.source.dims:
        raise HomalgError("cannot compose: target of f differs from source of g")
    comps = {n: g.at(n) @ f.at(n) for n in f.degrees()}
    return ChainMap(f.source, g.target, comps, check=False)


@dataclass(eq=False)
class Homotopy:
    """Components ``H[n]``: degree ``n`` of ``source`` to degree ``n - 1`` of ``target``."""

    source: ChainComplex
    target: ChainComplex
    comps: dict[int, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        p = self.source.p
        self.comps = {n: np.asarray(m, dtype=np.int64) % p for n, m in self.comps.items()}
        for n, m in self.comps.items():
            if m.shape != (self.target.dim(n - 1), self.source.dim(n)):
                raise HomalgError(f"homotopy component {n} has shape {m.shape}, expected "
                                  f"{(self.target.dim(n - 1), self.source.dim(n))}")

    def at(self, n: int) -> np.ndarray:
        m = self.comps.get(n)
        return m if m is not None else _zeros(self.target.dim(n - 1), self.source.dim(n))


# -- cones and quasi-isomorphisms ---------------------------------------------------

def cone(f: ChainMap) -> ChainComplex:
    """Total complex of ``f: A -> B`` with ``A`` in column 0 and ``B`` in column 1.

    Degree ``n`` is ``A^n (+) B^{n-1}`` and ``d(a, b) = (d_A a, f a - d_B b)``, so
    ``cone(f)`` is the usual mapping cone shifted by ``[-1]``.
    """
    A, B = f.source, f.target
    p = A.p
    lo = min([*A.span(), *(n + 1 for n in B.span())], default=0)
    hi = max([*A.span(), *(n + 1 for n in B.span())], default=-1)
    dims = {n: A.dim(n) + B.dim(n - 1) for n in range(lo, hi + 1)}
    d = {}
    for n in range(lo, hi + 1):
        top = np.concatenate([A.diff(n), _zeros(A.dim(n + 1), B.dim(n - 1))], axis=1)
        bottom = np.concatenate([f.at(n), -B.diff(n - 1)], axis=1)
        d[n] = np.concatenate([top, bottom], axis=0)
    return ChainComplex(p, dims, d)


def is_quasi_iso(f: ChainMap) -> bool:
    return is_acyclic(cone(f))


def induced_on_homology(f: ChainMap, n: int) -> np.ndarray:
    """Matrix of ``H^n(f)`` in bases of complements of the image inside the kernel.

    Bases are chosen canonically from row reductions, so the matrices of two
    maps with the same source and target can be compared entrywise.
    """
    return _homology_basis_map(f, n)[0]


def _homology_data(C: ChainComplex, n: int):
    p = C.p
    Z = nullspace_mod(C.diff(n), p)  # cycles, as columns
    Bm = C.diff(n - 1)  # boundaries span its columns
    # extend a basis of B to one of Z: reduce [B | Z] and keep the pivot columns from Z
    nb = Bm.shape[1]
    _, piv = rref_mod(np.concatenate([Bm, Z], axis=1), p)
    b_piv = [c for c in piv if c < nb]
    h_piv = [c - nb for c in piv if c >= nb]
    reps = Z[:, h_piv]
    return Bm[:, b_piv], reps


def _homology_basis_map(f: ChainMap, n: int):
    p = f.p
    _, src_reps = _homology_data(f.source, n)
    tgt_bound, tgt_reps = _homology_data(f.target, n)
    k_src, k_tgt = src_reps.shape[1], tgt_reps.shape[1]
    out = _zeros(k_tgt, k_src)
    basis = np.concatenate([tgt_bound, tgt_reps], axis=1)
    nb = tgt_bound.shape[1]
    for j in range(k_src):
        img = f.at(n) @ src_reps[:, j] % p
        x = solve_mod(basis, img, p)
        if x is None:
            raise HomalgError("image of a cycle is not a cycle; f is not a chain map")
        out[:, j] = x[nb:]
    return out, src_reps


def euler_char(C: ChainComplex) -> int:
    return C.euler_char()


def check_homotopy(H: Homotopy, f02: ChainMap, f12: ChainMap, f01: ChainMap) -> bool:
    """Whether ``H d_F - d_{F[-1]} H = f02 - f12 o f01`` holds in every degree.

    ``H`` lands in ``F[-1]``, whose differential is ``-d_F``, so degreewise this
    reads ``H^{n+1} d^n + d^{n-1} H^n = (f02 - f12 f01)^n``: the usual statement
    that ``f02`` and ``f12 o f01`` are chain homotopic.
    """
    F = f02.source
    for g in (f02, f12, f01):
        if g.source.dims != F.dims or g.target.dims != F.dims:
            raise HomalgError("homotopy check needs endomorphisms of one complex")
    if H.source.dims != F.dims or H.target.dims != F.dims:
        raise HomalgError("homotopy has the wrong shape")
    p = F.p
    rhs = f02 - compose(f12, f01)
    for n in F.span():
        lhs = H.at(n + 1) @ F.diff(n) + F.diff(n - 1) @ H.at(n)
        if ((lhs - rhs.at(n)) % p).any():
            return False
    return True


def solve_homotopy(F: ChainComplex, target: Mapping[int, np.ndarray]) -> Homotopy | None:
    """Find ``H`` with ``H d + d H = target`` (a degree-0 endomorphism), or None.

    Unknowns are the entries of every ``H^n`` (row-major); each degree gives
    ``dim(F^n)^2`` linear equations.
    """
    p = F.p
    span = list(F.span())
    blocks = {}
    offset = 0
    for n in span:
        size = F.dim(n - 1) * F.dim(n)
        blocks[n] = (offset, F.dim(n - 1), F.dim(n))
        offset += size
    if span:
        n_top = span[-1] + 1
        blocks[n_top] = (offset, F.dim(n_top - 1), F.dim(n_top))
    rows = []
    rhs = []
    for n in span:
        k = F.dim(n)
        d_n = F.diff(n)        # dim(n+1) x dim(n)
        d_prev = F.diff(n - 1)  # dim(n) x dim(n-1)
        T = np.asarray(target.get(n, _zeros(k, k)), dtype=np.int64)
        for i in range(k):
            for j in range(k):
                row = np.zeros(offset, dtype=np.int64)
                # (H^{n+1} d^n)[i, j] = sum_m H^{n+1}[i, m] d^n[m, j]
                off, r1, c1 = blocks.get(n + 1, (None, 0, 0))
                if off is not None:
                    for m in range(c1):
                        row[off + i * c1 + m] += d_n[m, j]
                # (d^{n-1} H^n)[i, j] = sum_m d^{n-1}[i, m] H^n[m, j]
                off, r0, c0 = blocks[n]
                for m in range(r0):
                    row[off + m * c0 + j] += d_prev[i, m]
                rows.append(row % p)
                rhs.append(int(T[i, j]) % p)
    if not rows:
        return Homotopy(F, F, {})
    x = solve_mod(np.array(rows, dtype=np.int64).reshape(len(rows), offset),
                  np.array(rhs, dtype=np.int64), p)
    if x is None:
        return None
    comps = {}
    for n, (off, r, c) in blocks.items():
        if r and c:
            comps[n] = x[off:off + r * c].reshape(r, c)
    return Homotopy(F, F, comps)


# -- text format ----------------------------------------------------------------------

def _matrix_str(m: np.ndarray) -> str:
    return " ; ".join(" ".join(str(int(x)) for x in row) for row in m)


def _parse_matrix(text: str, shape: tuple[int, int], p: int, where: str) -> np.ndarray:
    rows = [r.split() for r in text.split(";")] if text.strip() else []
    try:
        vals = [[int(x) for x in r] for r in rows if r]
    except ValueError as exc:
        raise HomalgError(f"{where}: {exc}") from None
    if shape[0] == 0 or shape[1] == 0:
        if vals:
            raise HomalgError(f"{where}: expected an empty matrix of shape {shape}")
        return _zeros(*shape)
    if len(vals) != shape[0] or any(len(r) != shape[1] for r in vals):
        raise HomalgError(f"{where}: expected a {shape[0]}x{shape[1]} matrix")
    return np.array(vals, dtype=np.int64) % p


def complex_lines(C: ChainComplex) -> list[str]:
    lines = [f"modulus {C.p}"]
    span = C.span()
    if span:
        lines.append(f"degrees {span.start} {span.stop - 1}")
        lines.append("dims " + " ".join(str(C.dim(n)) for n in span))
        for n in span:
            m = C.diff(n)
            if m.size and m.any():
                lines.append(f"d {n}: {_matrix_str(m)}")
    else:
        lines.append("degrees 0 -1")
        lines.append("dims")
    return lines


def serialize_complex(C: ChainComplex) -> str:
    return "\n".join(complex_lines(C)) + "\n"


def parse_complex(text: str | Iterable[str], p: int | None = None) -> ChainComplex:
    lines = text.splitlines() if isinstance(text, str) else list(text)
    lo = hi = None
    dims_list: list[int] | None = None
    raw_d: dict[int, str] = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        if head == "modulus":
            p = int(rest)
        elif head == "degrees":
            lo, hi = (int(x) for x in rest.split())
        elif head == "dims":
            dims_list = [int(x) for x in rest.split()]
        elif head == "d":
            deg, _, body = rest.partition(":")
            raw_d[int(deg)] = body
        else:
            raise HomalgError(f"line {lineno}: unknown directive {head!r}")
    if p is None or lo is None or dims_list is None:
        raise HomalgError("complex needs 'modulus', 'degrees' and 'dims' lines")
    if len(dims_list) != hi - lo + 1:
        raise HomalgError(f"'dims' lists {len(dims_list)} entries for degrees {lo}..{hi}")
    dims = {lo + i: k for i, k in enumerate(dims_list)}
    d = {n: _parse_matrix(body, (dims.get(n + 1, 0), dims.get(n, 0)), p, f"d {n}")
         for n, body in raw_d.items()}
    return ChainComplex(p, dims, d)


def map_lines(f: ChainMap | Homotopy) -> list[str]:
    out = []
    for n in sorted(f.comps):
        m = f.comps[n]
        if m.size and m.any():
            out.append(f"{n}: {_matrix_str(m)}")
    return out


def parse_map(lines: Iterable[str], source: ChainComplex, target: ChainComplex,
              homotopy: bool = False) -> ChainMap | Homotopy:
    comps = {}
    p = source.p
    for raw in lines:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        deg, _, body = line.partition(":")
        n = int(deg)
        shape = ((target.dim(n - 1) if homotopy else target.dim(n)), source.dim(n))
        comps[n] = _parse_matrix(body, shape, p, f"component {n}")
    if homotopy:
        return Homotopy(source, target, comps)
    return ChainMap(source, target, comps)


# -- random instances -------------------------------------------------------------------

def random_invertible(rng, n: int, p: int) -> np.ndarray:
    while True:
        m = np.array([[rng.randrange(p) for _ in range(n)] for _ in range(n)], dtype=np.int64)
        if is_invertible_mod(m, p):
            return m


def random_complex(rng, p: int, lo: int = -1, hi: int = 1, max_pieces: int = 3) -> ChainComplex:
    """Sum of random one-term and acyclic two-term pieces in degrees ``lo..hi``,
    disguised by a random change of basis in each degree."""
    pieces = []
    for _ in range(rng.randint(1, max_pieces)):
        n = rng.randint(lo, hi)
        if n < hi and rng.random() < 0.5:
            pieces.append(ChainComplex(p, {n: 1, n + 1: 1}, {n: np.ones((1, 1), dtype=np.int64)}))
        else:
            pieces.append(ChainComplex(p, {n: 1}))
    C = direct_sum(*pieces)
    return conjugate(C, {n: random_invertible(rng, k, p) for n, k in C.dims.items()})[0]


def conjugate(C: ChainComplex, P: Mapping[int, np.ndarray]) -> tuple[ChainComplex, ChainMap]:
    """Transport ``C`` along the degreewise bases change ``P``; returns the new
    complex and the isomorphism ``C -> C'``."""
    p = C.p
    inv = {n: inverse_mod(P[n], p) for n in C.dims}
    d = {n: P[n + 1] @ m @ inv[n] % p for n, m in C.d.items() if n in P and n + 1 in P}
    D = ChainComplex(p, C.dims, d)
    return D, ChainMap(C, D, dict(P))


def chain_map_space(A: ChainComplex, B: ChainComplex) -> tuple[np.ndarray, list]:
    """Basis (as columns) of all chain maps ``A -> B``, with the (degree, shape)
    layout of the unknowns."""
    p = A.p
    degs = sorted(set(A.dims) & set(B.dims))
    layout, off = [], 0
    pos = {}
    for n in degs:
        pos[n] = off
        layout.append((n, (B.dim(n), A.dim(n))))
        off += B.dim(n) * A.dim(n)
    rows = []
    for n in sorted(set(A.span()) | set(B.span())):
        dB, dA = B.diff(n), A.diff(n)
        for i in range(B.dim(n + 1)):
            for j in range(A.dim(n)):
                row = np.zeros(off, dtype=np.int64)
                if n in pos:  # (d_B f^n)[i, j]
                    c = A.dim(n)
                    for m in range(B.dim(n)):
                        row[pos[n] + m * c + j] += dB[i, m]
                if n + 1 in pos:  # (f^{n+1} d_A)[i, j]
                    c = A.dim(n + 1)
                    for m in range(c):
                        row[pos[n + 1] + i * c + m] -= dA[m, j]
                rows.append(row % p)
    M = np.array(rows, dtype=np.int64).reshape(len(rows), off)
    return nullspace_mod(M, p), layout


def random_chain_map(rng, A: ChainComplex, B: ChainComplex) -> ChainMap:
    basis, layout = chain_map_space(A, B)
    p = A.p
    x = np.zeros(basis.shape[0], dtype=np.int64)
    for j in range(basis.shape[1]):
        x = (x + rng.randrange(p) * basis[:, j]) % p
    comps, off = {}, 0
    for n, (r, c) in layout:
        comps[n] = x[off:off + r * c].reshape(r, c)
        off += r * c
    return ChainMap(A, B, comps)

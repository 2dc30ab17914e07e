"""Count-based obstructions to fillings, caps and cobordisms, plus the Euler
characteristic bookkeeping of the exact triangles.

Every verdict is one-sided: ``consistent`` means the counts do not rule the
cobordism out, never that one exists.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

from .coloring import ColoringProblem, FramingError, count_colorings, framed_count
from .surface_map import CombMap

RULE_FILLING = ("a filling quantizes to a rank-1 sheaf over every coefficient field, so a "
                "vanishing count over F_q forbids it")
RULE_COBORDISM = ("with H^1(L) -> H^1(Lambda_-) surjective and Maslov class zero, the moduli of "
                  "Lambda_- embeds into that of Lambda_+ by a fibre product, so "
                  "count(Lambda_-) <= count(Lambda_+)")
RULE_HYPOTHESIS = "cobordism check needs Maslov class zero and H^1-surjectivity"
RULE_CAP = ("flexible ambient gives Gamma(muhom(F+, F+)) = 0; the Mayer-Vietoris square then "
            "forces H^0(muhom(F-, F-)) = 0, so id = 0 on a nonzero object")


@dataclass
class CobordismHypothesis:
    maslov_zero: bool = False
    h1_surjective: bool = False
    filling: bool = False
    h1_data: tuple[int, int, int] | None = None  # b1(Lambda_-), b1(Lambda_+), b1(L)


@dataclass
class Verdict:
    status: Literal["obstructed", "consistent", "inconclusive"]
    rule: str
    witness: tuple[int, int, int | None] | None = None  # (q, count_minus, count_plus)
    counts: list[tuple[int, int, int | None]] = field(default_factory=list)

    @property
    def obstructed(self) -> bool:
        return self.status == "obstructed"


def moduli_count(m: CombMap, q: int) -> int:
    """Framed count, or the unframed count for maps without a framing triple
    (the two vanish together)."""
    try:
        return framed_count(m, q)
    except FramingError:
        return count_colorings(ColoringProblem(m, q))


def check_filling(m: CombMap, qs: list[int]) -> Verdict:
    counts = []
    witness = None
    for q in qs:
        c = moduli_count(m, q)
        counts.append((q, c, None))
        if c == 0 and witness is None:
            witness = (q, 0, None)
    if witness is not None:
        return Verdict("obstructed", RULE_FILLING, witness, counts)
    return Verdict("consistent", RULE_FILLING, None, counts)


def check_cobordism(minus: CombMap | None, plus: CombMap, hyp: CobordismHypothesis,
                    qs: list[int]) -> Verdict:
    if hyp.filling or minus is None:
        return check_filling(plus, qs)
    if not (hyp.maslov_zero and hyp.h1_surjective):
        return Verdict("inconclusive", RULE_HYPOTHESIS)
    counts = []
    witness = None
    for q in qs:
        cm, cp = moduli_count(minus, q), moduli_count(plus, q)
        counts.append((q, cm, cp))
        if cm > cp and witness is None:
            witness = (q, cm, cp)
    if witness is not None:
        return Verdict("obstructed", RULE_COBORDISM, witness, counts)
    return Verdict("consistent", RULE_COBORDISM, None, counts)


# -- exact triangles as Euler characteristic identities ----------------------------------

def triangle_third(chi_x: int | None, chi_y: int | None, chi_z: int | None) -> int:
    """For an exact triangle ``X -> Y -> Z ->``, ``chi(X) - chi(Y) + chi(Z) = 0``;
    return whichever of the three is passed as None."""
    missing = [v is None for v in (chi_x, chi_y, chi_z)]
    if sum(missing) != 1:
        raise ValueError("exactly one Euler characteristic must be unknown")
    if chi_x is None:
        return chi_y - chi_z
    if chi_y is None:
        return chi_x + chi_z
    return chi_y - chi_x


def les_chi(chi_L: int, chi_Lminus: int, rF: int, rG: int, chi_minus: int) -> int:
    """chi of ``Gamma(muhom(F+, G+))`` from the relative triangle
    ``Gamma(+) -> Gamma(-) -> C*(L, Lambda_-; Hom(F, G))[1] ->``."""
    if rF < 0 or rG < 0:
        raise ValueError("ranks must be non-negative")
    hom = rF * rG
    chi_rel = hom * (chi_L - chi_Lminus)
    # a shift by one negates the Euler characteristic
    return triangle_third(None, chi_minus, -chi_rel)


def mv_chi(chi_L: int, chi_Lminus: int, rF: int, rG: int, chi_minus: int) -> int:
    """Same quantity from the Mayer-Vietoris triangle
    ``Gamma(+) -> Gamma(-) (+) C*(L; Hom) -> C*(Lambda_-; Hom) ->``."""
    if rF < 0 or rG < 0:
        raise ValueError("ranks must be non-negative")
    hom = rF * rG
    return triangle_third(None, chi_minus + hom * chi_L, hom * chi_Lminus)


@dataclass
class CapReport:
    status: Literal["obstructed", "no contradiction", "inconclusive"]
    forced_h0: int | None
    detail: str
    rule: str = RULE_CAP


def cap_contradiction(chi_Lminus: int, rF: int, h0_agree: bool,
                      b0_Lminus: int = 1) -> CapReport:
    """Degree-0 bookkeeping for a cap of a connected ``Lambda_-``.

    With ``Gamma(muhom(F+, F+)) = 0`` the triangle splits and
    ``dim H^0 muhom(F-, F-) = dim H^0(Lambda_-; End F) - dim H^0(L; End F)``,
    which vanishes when the two H^0 terms agree.
    """
    if rF < 0:
        raise ValueError("rank must be non-negative")
    end = rF * rF
    chi_boundary = end * chi_Lminus
    if rF == 0:
        return CapReport("no contradiction", 0, "zero object: id = 0 holds trivially")
    if not h0_agree:
        return CapReport("inconclusive", None,
                         "H^0(L; End F) -> H^0(Lambda_-; End F) not known to be an iso")
    h0_boundary = end * b0_Lminus
    h0_L = h0_boundary
    forced = h0_boundary - h0_L
    return CapReport(
        "obstructed", forced,
        f"dim H^0(muhom(F-, F-)) forced to {forced}, yet it contains the identity of a "
        f"rank-{rF} object (End F has rank {end}; chi of C*(Lambda_-; End F) = {chi_boundary})")

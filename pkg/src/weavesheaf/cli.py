"""Command line entry point.

Graph arguments accept a file path, ``-`` for stdin, a builtin name (theta,
tetra, bigon, loop) or ``lambda:G,K`` for the genus-G member with K Clifford
summands.  All numbers printed are exact integers.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import homalg
from .chromatic import chromatic_poly
from .coloring import (
    ColoringProblem,
    ColorSpace,
    FramingError,
    count_colorings,
    framed_count,
    framing_triple,
)
from .elementary_cobordism import (
    CobordismError,
    attach_handle,
    can_extend,
    microstalk,
    parse_datum,
    parse_gluing,
    serialize_datum,
)
from .obstruct import CobordismHypothesis, cap_contradiction, check_cobordism, check_filling, \
    les_chi, mv_chi
from .surface_map import (
    BUILTINS,
    MapStructureError,
    UnsupportedMapError,
    build_named,
    face_adjacency,
    parse,
    serialize,
    validate_map,
    weave_euler_char,
)
from .weave_moves import (
    PatchError,
    WeaveMove,
    apply_move,
    build_lambda,
    lambda_prediction,
    parse_patch,
    predict,
)

RECORDS_HEADER = "# weavesheaf-records v1"
Q_ENV = "WEAVESHEAF_Q"
DEFAULT_Q = "2,3,4,5,7,8,9"

EXIT_OK, EXIT_OBSTRUCTED, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    args: argparse.Namespace
    out: list[str] = field(default_factory=list)


def load_graph(ref: str | None, stdin=None):
    if ref is None or ref == "-":
        text = (stdin or sys.stdin).read()
        return parse(text)
    if ref in BUILTINS:
        return build_named(ref)
    if ref.startswith("lambda:"):
        try:
            g, k = (int(x) for x in ref[len("lambda:"):].split(","))
        except ValueError:
            raise InputError(f"bad lambda reference {ref!r}; use lambda:G,K") from None
        return build_lambda(g, k)
    path = Path(ref)
    if not path.exists():
        raise InputError(f"graph {ref!r} is neither a file nor a builtin "
                         f"({', '.join(sorted(BUILTINS))}, lambda:G,K)")
    return parse(path.read_text())


def parse_q_list(text: str | None) -> list[int]:
    text = text or os.environ.get(Q_ENV) or DEFAULT_Q
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if ".." in tok:
            lo, hi = tok.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(tok))
    if any(q < 2 for q in out):
        raise InputError("every q must be at least 2")
    return out


def table(headers: list[str], rows: list[list]) -> list[str]:
    cells = [headers] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    return ["  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() for r in cells]


def records(kind: str, rows: list[dict]) -> list[str]:
    out = [RECORDS_HEADER]
    for r in rows:
        out.append(" ".join([f"kind={kind}"] + [f"{k}={v}" for k, v in r.items()]))
    return out


# -- subcommands -----------------------------------------------------------------------

def cmd_count(cfg: RunConfig) -> int:
    a = cfg.args
    m = load_graph(a.graph)
    qs = parse_q_list(a.q)
    rows = []
    for q in qs:
        space = ColorSpace(q)
        fixed = {}
        for spec in a.fix or []:
            face, _, color = spec.partition("=")
            fixed[int(face)] = space.parse(color)
        if a.framed:
            if fixed:
                p = ColoringProblem(m, q, fixed=fixed, framing=framing_triple(face_adjacency(m)))
                c = count_colorings(p)
            else:
                c = framed_count(m, q)
        else:
            c = count_colorings(ColoringProblem(m, q, fixed=fixed))
        rows.append({"q": q, "count": c, "prime_power": "yes" if space.is_prime_power else "no"})
    label = "framed" if a.framed else "count"
    if a.format == "records":
        cfg.out += records("count", [{"q": r["q"], "framed": int(a.framed), "count": r["count"]}
                                     for r in rows])
    else:
        cfg.out += table(["q", label], [[r["q"], r["count"]] for r in rows])
        odd = [str(r["q"]) for r in rows if r["prime_power"] == "no"]
        if odd:
            cfg.out.append(f"# q = {', '.join(odd)} not a prime power: combinatorial count only")
    return EXIT_OK


def cmd_chromatic(cfg: RunConfig) -> int:
    a = cfg.args
    m = load_graph(a.graph)
    poly = chromatic_poly(face_adjacency(m))
    qs = parse_q_list(a.q)
    if a.format == "records":
        rows = [{"coefficients": ",".join(map(str, poly.coeffs)) or "0"}]
        rows += [{"q": q, "t": q + 1, "value": poly(q + 1)} for q in qs]
        cfg.out += records("chromatic", rows)
        return EXIT_OK
    cfg.out.append(f"P(t) = {poly}")
    cfg.out.append(f"     = {poly.factored_str()}")
    cfg.out.append("coefficients (ascending): " + (" ".join(map(str, poly.coeffs)) or "0"))
    cfg.out += table(["q", "t=q+1", "P(t)"], [[q, q + 1, poly(q + 1)] for q in qs])
    return EXIT_OK


def _emit_graph(cfg: RunConfig, m, comments: list[str]) -> None:
    text = "".join(f"# {c}\n" for c in comments) + serialize(m)
    if cfg.args.out:
        Path(cfg.args.out).write_text(text)
        cfg.out += [f"# {c}" for c in comments] + [f"# wrote {cfg.args.out}"]
    else:
        cfg.out += text.rstrip("\n").split("\n")


def cmd_move(cfg: RunConfig) -> int:
    a = cfg.args
    m = load_graph(a.graph)
    if a.triangle is not None:
        move = WeaveMove("triangle_insertion", a.triangle)
    elif a.bigon is not None:
        move = WeaveMove("bigon_insertion", a.bigon)
    else:
        move = WeaveMove("patch", patch=parse_patch(Path(a.patch).read_text()))
    out = apply_move(m, move)
    pred = predict(move)
    comments = [f"move: {move.kind}" + (f" at {move.site}" if move.site is not None else "")]
    if pred.factor is not None:
        comments.append(f"prediction: framed count x {pred.factor.factored_str('q')}, "
                        f"weave genus +{pred.genus_delta}")
    else:
        comments.append(f"prediction: {pred.description}")
    comments.append(f"V={out.V} E={out.E} F={out.F}")
    _emit_graph(cfg, out, comments)
    return EXIT_OK


def cmd_build_lambda(cfg: RunConfig) -> int:
    a = cfg.args
    m = build_lambda(a.g, a.k)
    w = weave_euler_char(m)
    comments = [f"Lambda({a.g},{a.k}): weave genus {w.genus}",
                 f"framed count prediction: {lambda_prediction(a.g, a.k).factored_str('q')}"]
    _emit_graph(cfg, m, comments)
    return EXIT_OK


def cmd_cobordism_act(cfg: RunConfig) -> int:
    a = cfg.args
    d = parse_datum(Path(a.datum).read_text())
    if a.k is not None:
        d.k = a.k
    verdict = can_extend(d, strict=not a.homology_level)
    F = microstalk(d)
    lines = [f"k {d.k}",
             f"microstalk ranks {dict(sorted(homalg.homology_ranks(F).items()))}",
             f"extendable {'yes' if verdict.ok else 'no'}",
             f"reason {verdict.reason}"]
    cfg.out += [f"# {x}" for x in lines]
    if not verdict.ok:
        return EXIT_OBSTRUCTED if a.fail_on_obstructed else EXIT_OK
    choice = parse_gluing(Path(a.gluing).read_text(), d) if a.gluing else None
    if choice is None and d.k == 1:
        choice = homalg.identity_map(F)
    result = attach_handle(d, choice)
    cfg.out += serialize_datum(result.datum_plus).rstrip("\n").split("\n")
    return EXIT_OK


def _load_map_file(path: str) -> homalg.ChainMap:
    from .elementary_cobordism import _sections

    header, sec = _sections(Path(path).read_text())
    p = int(header["modulus"]) if "modulus" in header else None
    for name in ("source", "target", "map"):
        if name not in sec:
            raise InputError(f"map file needs section {name!r}")
    src = homalg.parse_complex(sec["source"], p)
    tgt = homalg.parse_complex(sec["target"], src.p)
    return homalg.parse_map(sec["map"], src, tgt)


def cmd_homalg(cfg: RunConfig) -> int:
    a = cfg.args
    if a.action == "homology":
        C = homalg.parse_complex(Path(a.input).read_text())
        ranks = homalg.homology_ranks(C)
        cfg.out += table(["degree", "dim", "rank H"],
                         [[n, C.dim(n), ranks.get(n, 0)] for n in C.span()])
        cfg.out.append(f"euler characteristic {C.euler_char()}")
        return EXIT_OK
    f = _load_map_file(a.input)
    if a.action == "cone":
        C = homalg.cone(f)
        cfg.out += homalg.serialize_complex(C).rstrip("\n").split("\n")
        cfg.out.append(f"# homology {dict(sorted(homalg.homology_ranks(C).items()))}")
    else:
        cfg.out.append("quasi-isomorphism: " + ("yes" if homalg.is_quasi_iso(f) else "no"))
    return EXIT_OK


def _verdict_lines(cfg: RunConfig, kind: str, v) -> None:
    if cfg.args.format == "records":
        row = {"status": v.status}
        if v.witness:
            row["q"] = v.witness[0]
            row["count_minus"] = v.witness[1]
            if v.witness[2] is not None:
                row["count_plus"] = v.witness[2]
        row["rule"] = '"' + v.rule + '"'
        cfg.out += records(kind, [row])
        return
    cfg.out.append(f"verdict: {v.status}")
    if v.witness:
        q, cm, cp = v.witness
        if cp is None:
            cfg.out.append(f"witness: q={q} count={cm}")
        else:
            cfg.out.append(f"witness: q={q} {cm}>{cp}")
    if v.counts:
        if v.counts[0][2] is None:
            cfg.out += table(["q", "count"], [[q, c] for q, c, _ in v.counts])
        else:
            cfg.out += table(["q", "minus", "plus"], [list(r) for r in v.counts])
    cfg.out.append(f"rule: {v.rule}")


def cmd_obstruct(cfg: RunConfig) -> int:
    a = cfg.args
    if a.kind == "filling":
        v = check_filling(load_graph(a.graph), parse_q_list(a.q))
        _verdict_lines(cfg, "filling", v)
    elif a.kind == "cobordism":
        hyp = CobordismHypothesis(maslov_zero=not a.no_maslov_zero,
                                  h1_surjective=a.h1_surjective)
        v = check_cobordism(load_graph(a.minus), load_graph(a.plus), hyp, parse_q_list(a.q))
        _verdict_lines(cfg, "cobordism", v)
    elif a.kind == "les":
        rel = les_chi(a.chi_l, a.chi_lminus, a.rf, a.rg, a.chi_minus)
        mv = mv_chi(a.chi_l, a.chi_lminus, a.rf, a.rg, a.chi_minus)
        cfg.out.append(f"chi_plus (relative triangle) = {rel}")
        cfg.out.append(f"chi_plus (Mayer-Vietoris)    = {mv}")
        return EXIT_OK
    else:
        rep = cap_contradiction(a.chi_lminus, a.rf, a.h0_agree)
        cfg.out.append(f"cap: {rep.status}")
        cfg.out.append(rep.detail)
        return EXIT_OBSTRUCTED if (rep.status == "obstructed" and a.fail_on_obstructed) \
            else EXIT_OK
    if v.obstructed and a.fail_on_obstructed:
        return EXIT_OBSTRUCTED
    return EXIT_OK


def cmd_validate(cfg: RunConfig) -> int:
    m = load_graph(cfg.args.graph)
    rep = validate_map(m)
    cfg.out += rep.summary().split("\n")
    return EXIT_OK if rep.accepted else EXIT_INPUT


def cmd_selftest(cfg: RunConfig) -> int:
    from .selftest import run_selftest

    results = run_selftest(random.Random(cfg.args.seed), cfg.args.rounds)
    for name, ok, detail in results:
        cfg.out.append(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_OBSTRUCTED


# -- parser ------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="weavesheaf", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="subcommand", required=True)

    def fmt(p):
        p.add_argument("--format", choices=["text", "records"], default="text")

    p = sub.add_parser("count", help="count proper P^1 colorings of faces")
    p.add_argument("--graph", default="-")
    p.add_argument("--q", help=f"comma list or a..b (default ${Q_ENV} or {DEFAULT_Q})")
    p.add_argument("--framed", action="store_true")
    p.add_argument("--fix", action="append", metavar="FACE=COLOR")
    fmt(p)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("chromatic", help="chromatic polynomial of the face graph")
    p.add_argument("--graph", default="-")
    p.add_argument("--q")
    fmt(p)
    p.set_defaults(func=cmd_chromatic)

    p = sub.add_parser("move", help="apply a triangle, bigon or patch move")
    p.add_argument("--graph", default="-")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--triangle", type=int, metavar="V")
    g.add_argument("--bigon", type=int, metavar="E")
    g.add_argument("--patch", metavar="PATCHFILE")
    p.add_argument("--out")
    p.set_defaults(func=cmd_move)

    p = sub.add_parser("build-lambda", help="the genus-g weave with k Clifford summands")
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_build_lambda)

    p = sub.add_parser("cobordism-act", help="push a local sheaf datum across a handle")
    p.add_argument("--datum", required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--gluing")
    p.add_argument("--homology-level", action="store_true",
                   help="decide 2-handles on homology instead of solving for H012")
    p.add_argument("--fail-on-obstructed", action="store_true")
    p.set_defaults(func=cmd_cobordism_act)

    p = sub.add_parser("homalg", help="chain complex utilities")
    p.add_argument("action", choices=["homology", "cone", "quasi-iso"])
    p.add_argument("input", help="complex file (homology) or map file (cone, quasi-iso)")
    p.set_defaults(func=cmd_homalg)

    p = sub.add_parser("obstruct", help="count-based obstructions")
    osub = p.add_subparsers(dest="kind", required=True)
    o = osub.add_parser("filling")
    o.add_argument("--graph", default="-")
    o.add_argument("--q")
    o.add_argument("--fail-on-obstructed", action="store_true")
    fmt(o)
    o = osub.add_parser("cobordism")
    o.add_argument("--minus", required=True)
    o.add_argument("--plus", required=True)
    o.add_argument("--q")
    o.add_argument("--h1-surjective", action="store_true")
    o.add_argument("--no-maslov-zero", action="store_true")
    o.add_argument("--fail-on-obstructed", action="store_true")
    fmt(o)
    o = osub.add_parser("les")
    o.add_argument("--chi-l", type=int, required=True)
    o.add_argument("--chi-lminus", type=int, default=0)
    o.add_argument("--rf", type=int, default=1)
    o.add_argument("--rg", type=int, default=1)
    o.add_argument("--chi-minus", type=int, default=0)
    o = osub.add_parser("cap")
    o.add_argument("--chi-lminus", type=int, required=True)
    o.add_argument("--rf", type=int, default=1)
    o.add_argument("--h0-agree", action="store_true")
    o.add_argument("--fail-on-obstructed", action="store_true")
    p.set_defaults(func=cmd_obstruct)

    p = sub.add_parser("validate", help="check map axioms and report V, E, F, genus")
    p.add_argument("--graph", default="-")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("selftest", help="randomised consistency checks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rounds", type=int, default=20)
    p.set_defaults(func=cmd_selftest)
    return ap


def dispatch(argv: list[str]) -> tuple[int, str, str]:
    """Run one command; returns (exit status, stdout text, stderr text)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_INPUT, "", ""
    cfg = RunConfig(args.subcommand, args)
    try:
        status = args.func(cfg)
    except MapStructureError as exc:
        where = ""
        if exc.line is not None and f"line {exc.line}" not in str(exc):
            where = f" (line {exc.line}, token {exc.token!r})"
        return EXIT_INPUT, "", f"error: malformed graph: {exc}{where}\n"
    except (InputError, UnsupportedMapError, FramingError, PatchError, CobordismError,
            homalg.HomalgError, KeyError, ValueError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        return EXIT_INPUT, "", f"error: {msg}\n"
    text = "\n".join(cfg.out) + ("\n" if cfg.out else "")
    return status, text, ""


def main(argv: list[str] | None = None) -> int:
    status, out, err = dispatch(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(out)
    sys.stderr.write(err)
    return status


if __name__ == "__main__":
    sys.exit(main())

"""Command-line driver: ``opseq verify|pages|converge|chart|gen``.

Exit codes: 0 success, 2 unreadable or malformed input, 3 a violated law
(tower axioms, closure or well-definedness), 4 a mismatch between the two
page constructions.
"""
from __future__ import annotations

import argparse
import inspect
import json
import sys

from ..convergence import (Unsupported, WellDefinednessViolation, associated_graded, check_gamma_multiplicative,
                           colimit, gamma_map)
from ..couple import LiftFailed, tower_steps
from ..operads import check_operad
from ..spectral import (ROUTES, ClosureViolation, SpectralSequence, cross_check, detect_stabilization, e_infinity,
                        page_via_cycles, page_via_derivation)
from . import generators
from .chart import GRADINGS, cell_text, chart_document, display_keys, render_ascii, render_svg
from .document import DocumentError, load, serialize

EXIT_OK, EXIT_PARSE, EXIT_VIOLATION, EXIT_MISMATCH = 0, 2, 3, 4


class CommandFailed(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _load(path):
    try:
        doc = load(path)
        return doc, doc.to_tower()
    except FileNotFoundError:
        raise CommandFailed(EXIT_PARSE, f"error: no such file: {path}") from None
    except (OSError, UnicodeDecodeError) as exc:
        raise CommandFailed(EXIT_PARSE, f"error: cannot read {path}: {exc}") from None
    except DocumentError as exc:
        raise CommandFailed(EXIT_PARSE, f"parse error: {exc}") from None
    except (ValueError, KeyError) as exc:
        raise CommandFailed(EXIT_PARSE, f"invalid tower: {exc}") from None


def verify_steps(tower):
    """Operad laws followed by the tower checks, as (name, thunk) pairs."""
    return [("operad", lambda: check_operad(tower.operad))] + tower_steps(tower)


def _run_verify(tower, out):
    for name, step in verify_steps(tower):
        rep = step()
        if not rep:
            out.append(f"FAIL {name}: {rep.violation}")
            raise CommandFailed(EXIT_VIOLATION, "\n".join(out))
        out.append(f"ok   {name} ({rep.checked} checks)")


def cmd_verify(args, out):
    _, tower = _load(args.file)
    _run_verify(tower, out)
    out.append("verified")


def _matrix_text(ring, M):
    return "[" + ", ".join("[" + ", ".join(ring.format(x) for x in row) + "]" for row in M.T) + "]"


def _page_lines(page):
    ring = page.ring
    lines = [f"page {page.r}"]
    for p, q in display_keys(page):
        E = page.E(p, q)
        if E.ngens == 0:
            continue
        lines.append(f"  E({p},{q}) = {cell_text(page.invariants(p, q))}  reps {_matrix_text(ring, E.gens)}")
    for p, q in display_keys(page):
        tgt = (p - page.r, q - 1)
        if page.E(p, q).ngens and page.E(*tgt).ngens and not ring.is_zero(page.E(*tgt).reduce(page.d(p, q))):
            lines.append(f"  d_{page.r}: ({p},{q}) -> ({tgt[0]},{tgt[1]})")
    return lines


def cmd_pages(args, out):
    _, tower = _load(args.file)
    _run_verify(tower, [])
    ss = SpectralSequence(tower, args.rmax)
    stab = detect_stabilization(ss)
    last = min(stab.level, args.rmax) if stab.stable else args.rmax
    mismatch = None
    for r in range(1, last + 1):
        try:
            if args.route in ("derivation", "both"):
                out.extend(_page_lines(page_via_derivation(ss, r)))
            cyc = page_via_cycles(ss, r) if args.route in ("cycles", "both") else None
            if args.route == "cycles":
                out.extend(_page_lines(cyc))
            if args.route == "both":
                rep = cross_check(ss, r, cyc)
                out.append(f"  cross-check: {rep}")
                if not rep and mismatch is None:
                    mismatch = r
        except LiftFailed as exc:
            raise CommandFailed(EXIT_VIOLATION, "\n".join(out + [f"FAIL page {r}: {exc}"])) from None
    out.append(str(stab))
    if mismatch is not None:
        raise CommandFailed(EXIT_MISMATCH, "\n".join(out + [f"routes disagree at page {mismatch}"]))


def cmd_converge(args, out):
    _, tower = _load(args.file)
    _run_verify(tower, [])
    ss = SpectralSequence(tower, args.rmax)
    try:
        einf = e_infinity(ss)
    except ClosureViolation as exc:
        raise CommandFailed(EXIT_VIOLATION, f"FAIL E-infinity action: {exc}") from None
    out.append(f"E-infinity: {einf.stabilization}")
    for p, q in display_keys(einf.page):
        if einf.page.E(p, q).ngens:
            out.append(f"  E({p},{q}) = {cell_text(einf.page.invariants(p, q))}")
    try:
        cd = colimit(tower)
    except Unsupported:
        out.append("colimit unsupported; E^∞ only")
        return
    for q in cd.q_values():
        H = cd.H(q)
        if H.ngens:
            out.append(f"H_{q} = {cell_text(H.invariants())}")
    out.append("associated graded")
    for p, q in cd.keys():
        g = cd.graded(p, q)
        if g.ngens:
            out.append(f"  gr({p},{q}) = {cell_text(g.invariants())}")
    try:
        gr = associated_graded(cd, verify=True)
    except WellDefinednessViolation as exc:
        raise CommandFailed(EXIT_VIOLATION, "\n".join(out + [f"FAIL associated graded: {exc}"])) from None
    gm = gamma_map(cd, ss)
    verdict = "isomorphism" if gm.bijective else ("injective" if gm.injective else "NOT injective")
    out.append(f"gamma: {verdict}")
    mult = check_gamma_multiplicative(cd, ss, gr, gm)
    out.append(f"gamma multiplicative: {mult}")
    if not gm.injective or not mult:
        raise CommandFailed(EXIT_VIOLATION, "\n".join(out))


def cmd_chart(args, out):
    _, tower = _load(args.file)
    _run_verify(tower, [])
    ss = SpectralSequence(tower, args.rmax)
    chart = chart_document(ss, args.grading, args.rmax)
    text = render_svg(chart) if args.format == "svg" else render_ascii(chart)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        out.append(f"wrote {args.out}")
    else:
        out.append(text.rstrip("\n"))


def _param(text):
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError("parameters are written key=value")
    try:
        return key, json.loads(value)
    except json.JSONDecodeError:
        return key, value


def cmd_gen(args, out):
    if args.name not in generators.GENERATORS:
        raise CommandFailed(EXIT_PARSE, f"error: unknown generator {args.name!r}; "
                                        f"choose from {', '.join(generators.GENERATORS)}")
    params = dict(args.param or [])
    fn = getattr(generators, {"random": "random_tower"}.get(args.name, args.name))
    if args.seed is not None and "seed" in inspect.signature(fn).parameters:
        params["seed"] = args.seed
    for k, v in params.items():
        if isinstance(v, list):
            params[k] = tuple(v)
    try:
        doc = generators.gen_example(args.name, **params)
    except (TypeError, ValueError) as exc:
        raise CommandFailed(EXIT_PARSE, f"error: {exc}") from None
    text = serialize(doc)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        out.append(f"wrote {args.out}")
    else:
        out.append(text.rstrip("\n"))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="opseq", description="Spectral sequences of towers of dg operad algebras.")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="check the operad, complexes, maps, exactness, algebra laws and conditions")
    v.add_argument("file")
    v.set_defaults(func=cmd_verify)

    p = sub.add_parser("pages", help="dump pages up to stabilization")
    p.add_argument("file")
    p.add_argument("--rmax", type=int, default=16)
    p.add_argument("--route", choices=ROUTES + ("both",), default="derivation")
    p.set_defaults(func=cmd_pages)

    c = sub.add_parser("converge", help="abutment, associated graded and the comparison with E-infinity")
    c.add_argument("file")
    c.add_argument("--rmax", type=int, default=16)
    c.set_defaults(func=cmd_converge)

    ch = sub.add_parser("chart", help="draw the pages")
    ch.add_argument("file")
    ch.add_argument("--format", choices=("ascii", "svg"), default="ascii")
    ch.add_argument("--grading", choices=GRADINGS, default="paper")
    ch.add_argument("--rmax", type=int, default=16)
    ch.add_argument("--out")
    ch.set_defaults(func=cmd_chart)

    g = sub.add_parser("gen", help="write a generated tower document")
    g.add_argument("name")
    g.add_argument("--seed", type=int)
    g.add_argument("--param", type=_param, action="append", metavar="KEY=VALUE",
                   help="generator keyword argument; values are read as JSON when possible")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = []
    try:
        args.func(args, out)
    except CommandFailed as exc:
        print(str(exc), file=sys.stdout if exc.code in (EXIT_VIOLATION, EXIT_MISMATCH) else sys.stderr)
        return exc.code
    print("\n".join(out))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

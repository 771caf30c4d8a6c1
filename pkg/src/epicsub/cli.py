"""Command-line interface: ``epicsub COMMAND ...``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .certificates import delta_formula, format_certificate, parse_certificate, verify_witness
from .clone import find_majority_term, find_nu_term, find_pixley_term, free_algebra
from .epic import MODES, S_CLASSES, RunConfig, decide_surjective_epis, is_epic, report_dict
from .homs import homs
from .io import dump_json, emit_algebra, load_document, parse_elements
from .limits import Limits, ResourceLimitExceeded
from .structure import canonical_form, congruences, is_closed, subuniverses

EXIT_LIMIT = 3
EXIT_USAGE = 4


def _globals() -> argparse.ArgumentParser:
    # SUPPRESS lets the flags appear before or after the subcommand
    g = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    g.add_argument("--limit-time", type=float, metavar="SECS", help="wall-clock budget per command")
    g.add_argument("--limit-size", type=int, metavar="N", help="cap on closure size and subalgebra count")
    g.add_argument("--threads", type=int, metavar="N", help="worker threads for epic checks")
    g.add_argument("--cache", metavar="DIR", help="cache directory for computed classes")
    g.add_argument("--seed", type=int, metavar="N", help="seed for randomized helpers")
    g.add_argument("--json-out", metavar="PATH", help="write the machine-readable report here")
    return g


def build_parser() -> argparse.ArgumentParser:
    common = _globals()
    p = argparse.ArgumentParser(prog="epicsub", parents=[common],
                                description="Epic substructures and surjectivity of epimorphisms in finite algebras.")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decide", parents=[common], help="decide surjectivity of epimorphisms")
    d.add_argument("--mode", choices=MODES, required=True)
    d.add_argument("--nu-arity", type=int, default=3, metavar="N")
    d.add_argument("--fold", type=int, default=None, metavar="K")
    d.add_argument("--s-class", choices=S_CLASSES, default="qrsi")
    d.add_argument("files", nargs="+", metavar="FILES")

    e = sub.add_parser("epic-check", parents=[common], help="test whether A is epic in B")
    e.add_argument("--b", required=True, metavar="FILE")
    e.add_argument("--a", required=True, metavar="ELEMENTS")
    e.add_argument("--targets", nargs="+", required=True, metavar="FILES")
    e.add_argument("--emit-certificate", metavar="PATH")

    v = sub.add_parser("certificate-verify", parents=[common], help="check a Δ-certificate")
    v.add_argument("--b", required=True, metavar="FILE")
    v.add_argument("--a", required=True, metavar="ELEMENTS")
    v.add_argument("--cert", required=True, metavar="PATH")
    v.add_argument("--targets", nargs="+", required=True, metavar="FILES")

    h = sub.add_parser("homs", parents=[common], help="list homomorphisms SRC -> DST")
    h.add_argument("src")
    h.add_argument("dst")
    h.add_argument("--count-only", action="store_true")

    s = sub.add_parser("subalgebras", parents=[common], help="list subuniverses")
    s.add_argument("file")
    c = sub.add_parser("congruences", parents=[common], help="list congruences")
    c.add_argument("file")

    f = sub.add_parser("free", parents=[common], help="free algebra of the generated variety")
    f.add_argument("--gens", type=int, required=True, metavar="K")
    f.add_argument("files", nargs="+", metavar="FILES")

    t = sub.add_parser("find-term", parents=[common], help="search the clone for a term")
    t.add_argument("kind", choices=("nu", "pixley", "majority"))
    t.add_argument("--arity", type=int, default=3, help="arity for nu terms")
    t.add_argument("files", nargs="+", metavar="FILES")

    k = sub.add_parser("canon", parents=[common], help="canonical form")
    k.add_argument("file")
    return p


def _limits(args) -> Limits:
    size = getattr(args, "limit_size", None)
    kw = {}
    if size is not None:
        kw = {"max_closure_size": size, "max_subalgebras": size}
    return Limits(time_budget=getattr(args, "limit_time", None), **kw).start()


def _load(paths):
    return [load_document(p) for p in paths]


def _cmd_decide(args, limits, out):
    algs = [d.algebra for d in _load(args.files)]
    config = RunConfig(mode=args.mode, nu_arity=args.nu_arity, fold=args.fold, s_class=args.s_class,
                       limits=limits, threads=getattr(args, "threads", 1),
                       cache_dir=getattr(args, "cache", None))
    report = decide_surjective_epis(algs, config)
    data = report_dict(report, emit_algebra)
    out(f"verdict: {report.verdict}")
    if report.term:
        out(f"{report.term_kind} term: {report.term}")
    if report.reason:
        out(f"reason: {report.reason}")
    if report.conditional:
        out(f"note: {report.conditional}")
    if report.s_choice:
        out(f"class S ({report.s_choice}): {len(report.s_class)} members, sizes "
            f"{[m.algebra.size for m in report.s_class]}")
    for lim in report.limits_hit:
        out(f"limit hit: {lim}")
    if report.witness is not None:
        w = report.witness
        out(f"witness: B of size {w.b.size} from {w.provenance}")
        out(emit_algebra(w.b).rstrip())
        out(f"A = {list(w.a.members)}")
        out(format_certificate(w.certificate).rstrip())
    st = report.statistics
    if st:
        out("statistics: " + ", ".join(f"{k}={st[k]}" for k in sorted(st)))
    return report.exit_code, data


def _cmd_epic_check(args, limits, out):
    bdoc = load_document(args.b)
    a = parse_elements(args.a, bdoc)
    b = bdoc.algebra
    if not a or not is_closed(b, a):
        raise ValueError(f"{sorted(set(a))} is not a nonempty subuniverse of B")
    targets = [d.algebra for d in _load(args.targets)]
    res = is_epic(b, a, targets, limits)
    data = {"epic": res.epic, "a": sorted(set(a)), "counterexample": None, "certificate": None}
    if res.epic:
        cert = delta_formula(b, a)
        text = format_certificate(cert)
        data["certificate"] = text
        out("epic")
        out(text.rstrip())
        if args.emit_certificate:
            Path(args.emit_certificate).write_text(text)
        return 0, data
    cx = res.counterexample
    data["counterexample"] = {"target": cx.target, "g": list(cx.g), "g2": list(cx.g2), "element": cx.element}
    out("not epic")
    out(f"homs into {args.targets[cx.target]} agree on A but differ at {bdoc.label(cx.element)}:")
    out(f"  g  = {list(cx.g)}")
    out(f"  g' = {list(cx.g2)}")
    return 1, data


def _cmd_certificate_verify(args, limits, out):
    bdoc = load_document(args.b)
    a = parse_elements(args.a, bdoc)
    cert_text = Path(args.cert).read_text()
    targets = [d.algebra for d in _load(args.targets)]
    try:
        cert = parse_certificate(cert_text)
    except ValueError as exc:
        out(f"rejected: malformed ({exc})")
        return 1, {"ok": False, "reason": "malformed", "detail": str(exc)}
    check = verify_witness(bdoc.algebra, a, cert, targets, limits)
    out("ok" if check.ok else f"rejected: {check.reason}" + (f" ({check.detail})" if check.detail else ""))
    return (0 if check.ok else 1), {"ok": check.ok, "reason": check.reason, "detail": check.detail}


def _cmd_homs(args, limits, out):
    src, dst = load_document(args.src).algebra, load_document(args.dst).algebra
    hs = homs(src, dst, limits=limits)
    out(f"{len(hs)} homomorphisms")
    if not args.count_only:
        for h in hs:
            out(" ".join(map(str, h)))
    data = {"count": len(hs)}
    if not args.count_only:
        data["homs"] = [list(h) for h in hs]
    return 0, data


def _cmd_subalgebras(args, limits, out):
    doc = load_document(args.file)
    subs = subuniverses(doc.algebra, limits)
    out(f"{len(subs)} subuniverses")
    for s in subs:
        out(" ".join(doc.label(x) for x in s.members))
    return 0, {"count": len(subs), "subuniverses": [list(s.members) for s in subs]}


def _cmd_congruences(args, limits, out):
    doc = load_document(args.file)
    cons = congruences(doc.algebra, limits)
    out(f"{len(cons)} congruences")
    for c in cons:
        out(" | ".join(" ".join(doc.label(x) for x in blk) for blk in c.blocks()))
    return 0, {"count": len(cons), "congruences": [c.blocks() for c in cons]}


def _cmd_free(args, limits, out):
    algs = [d.algebra for d in _load(args.files)]
    fa = free_algebra(algs, args.gens, limits)
    out(f"free algebra on {args.gens} generators: {len(fa)} elements")
    terms = [str(fa.term(i)) for i in range(len(fa))]
    for i, t in enumerate(terms):
        out(f"{i}: {t}")
    return 0, {"size": len(fa), "terms": terms, "algebra": emit_algebra(fa.algebra)}


def _cmd_find_term(args, limits, out):
    algs = [d.algebra for d in _load(args.files)]
    if args.kind == "majority":
        t = find_majority_term(algs, limits)
    elif args.kind == "pixley":
        t = find_pixley_term(algs, limits)
    else:
        t = find_nu_term(algs, args.arity, limits)
    out(str(t) if t is not None else f"no {args.kind} term")
    return (0 if t is not None else 1), {"kind": args.kind, "term": None if t is None else str(t)}


def _cmd_canon(args, limits, out):
    alg = load_document(args.file).algebra
    cf = canonical_form(alg, limits=limits)
    canon = cf.apply(alg)
    canon.name = alg.name
    out(f"encoding {cf.encoding.hex()}")
    out(f"relabeling {' '.join(map(str, cf.perm))}")
    out(emit_algebra(canon).rstrip())
    return 0, {"encoding": cf.encoding.hex(), "perm": list(cf.perm), "algebra": emit_algebra(canon)}


COMMANDS = {
    "decide": _cmd_decide, "epic-check": _cmd_epic_check, "certificate-verify": _cmd_certificate_verify,
    "homs": _cmd_homs, "subalgebras": _cmd_subalgebras, "congruences": _cmd_congruences,
    "free": _cmd_free, "find-term": _cmd_find_term, "canon": _cmd_canon,
}


def main(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)

    def out(line: str = "") -> None:
        print(line, file=stdout)

    try:
        limits = _limits(args)
        code, data = COMMANDS[args.command](args, limits, out)
    except ResourceLimitExceeded as exc:
        out(f"limit hit: {exc}")
        code, data = EXIT_LIMIT, {"limits_hit": [str(exc)]}
    except (OSError, ValueError) as exc:
        print(f"epicsub: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    json_out = getattr(args, "json_out", None)
    if json_out:
        Path(json_out).write_text(dump_json(data))
    return code


if __name__ == "__main__":
    sys.exit(main())

"""Command-line driver.

    lowterm verify LIB-1 [--variant] [--json report.json]
    lowterm chase LIB-1 --position left [--enumerate]
    lowterm cohomology LIB-2 --degree 2
    lowterm ext LIB-1 --t 1 --degree 2
    lowterm lowterm LIB-3 --t 2
    lowterm report LIB-0

Exit codes: 0 all checks pass, 1 a verification failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Optional, Sequence

from .diagrams import (
    InfiniteNode,
    build_main_diagram,
    build_variant_diagram,
    canonical_variants,
    enumerate_chases,
    stalk0_comparison,
    verify,
    CHASES,
    CompatibilityError,
    chase_left,
    chase_right,
)
from .grpmod import inflation
from .resolutions import ext_groups, group_cohomology
from .scenario import ParseError, Scenario, SemanticError, load_scenario
from .spectral import WindowExceeded

OK, FAIL, BAD_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _load(ref: str) -> Scenario:
    try:
        return load_scenario(ref)
    except OSError as exc:
        raise InputError(f"cannot read scenario {ref!r}: {exc.strerror or exc}") from None
    except (ParseError, SemanticError) as exc:
        raise InputError(f"{ref}: {exc}") from None


def _mark(ok: bool) -> str:
    return "ok" if ok else "FAIL"


def cmd_verify(args) -> int:
    sc = _load(args.scenario)
    S = sc.spectral(args.resolution)
    t0 = time.perf_counter()
    main = build_main_diagram(S, sc.name)
    rep = verify(main)
    reports = [rep]
    print(main.render())
    print(f"main diagram: {len(rep.checks)} checks, {_mark(rep.passed)}")
    for c in rep.flagged():
        print(f"  square {c.pos} anticommutes (expected)")
    for c in rep.failures():
        print(f"  failed {c.kind} at {c.pos} {c.detail}")
    ok = rep.passed
    if args.variant:
        for label, (B, f) in canonical_variants(S).items():
            d, vd = build_variant_diagram(S, B, f, f"{sc.name}/variant:{label}")
            vr = verify(d)
            if label == "stalk0":
                vr.checks.extend(stalk0_comparison(S, main, d, vd))
            reports.append(vr)
            ok = ok and vr.passed
            print(f"variant {label}: {len(vr.checks)} checks, {_mark(vr.passed)}")
            for c in vr.failures():
                print(f"  failed {c.kind} at {c.pos} {c.detail}")
    print(f"elapsed {time.perf_counter() - t0:.2f}s")
    if args.json:
        payload = reports[0].to_json() if len(reports) == 1 else [r.to_json() for r in reports]
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return OK if ok else FAIL


def cmd_chase(args) -> int:
    sc = _load(args.scenario)
    d = build_main_diagram(sc.spectral(args.resolution), sc.name)
    if args.enumerate:
        try:
            summ = enumerate_chases(d, args.position)
        except InfiniteNode:
            summ = enumerate_chases(d, args.position, sample=args.sample)
        print(f"{args.position} chase: {summ.pairs} pairs, {summ.compatible} compatible, "
              f"{summ.successes} solved, {summ.rejected} rejected"
              + (" (sampled)" if summ.sampled else ""))
        return OK if summ.ok else FAIL
    P = CHASES[args.position]
    Gb, Gg = d.nodes[P["beta"]], d.nodes[P["gamma"]]
    pairs = ((b, g) for b in Gb.enumerate_elements() for g in Gg.enumerate_elements()) \
        if Gb.is_finite() and Gg.is_finite() else iter(())
    best = None
    for b, g in pairs:
        try:
            cert = (chase_left if args.position == "left" else chase_right)(d, b, g)
        except CompatibilityError:
            continue
        best = cert
        if any(cert.beta) or any(cert.gamma):
            break
    if best is None:
        print("no compatible pair found")
        return FAIL
    print(f"{args.position} chase certificate (sign {best.sign:+d}):")
    for key in ("beta", "gamma", "alpha", "a", "b", "c"):
        print(f"  {key:5} = {list(getattr(best, key))}")
    ok = best.validate(d)
    print(f"re-validated: {_mark(ok)}")
    return OK if ok else FAIL


def cmd_cohomology(args) -> int:
    sc = _load(args.scenario)
    q = args.degree
    if q < 0:
        raise InputError("degree must be non-negative")
    H = group_cohomology(sc.G, sc.M, q + 2, kind=args.resolution_kind)[q]
    print(f"H^{q}({sc.G.name}, M) = {H}")
    return OK


def cmd_ext(args) -> int:
    sc = _load(args.scenario)
    S = sc.spectral(args.resolution)
    i, t = args.degree, args.t
    try:
        hyper = S.E(t, i)
    except WindowExceeded as exc:
        raise InputError(str(exc)) from None
    ext = ext_groups(inflation(S.T[t], sc.qd), sc.M, max(sc.d, i + 2))[i]
    same = hyper.shape == ext.shape
    print(f"hyper-Ext^{i}(T_{t}, D) = {hyper}")
    print(f"Ext^{i}_G(inf T_{t}, M) = {ext}   [{_mark(same)}]")
    return OK if same else FAIL


def _print_seq(seq) -> bool:
    for lab, obj in zip(seq.labels, seq.objects):
        print(f"  {lab:10} {obj}")
    ex = seq.exactness()
    print("  exact at interior nodes: " + " ".join(_mark(x) for x in ex))
    return seq.is_exact()


def cmd_lowterm(args) -> int:
    sc = _load(args.scenario)
    S = sc.spectral(args.resolution)
    print(f"low-term sequence of {sc.name}, t = {args.t}:")
    return OK if _print_seq(S.low_term_sequence(args.t)) else FAIL


def cmd_report(args) -> int:
    sc = _load(args.scenario)
    S = sc.spectral(args.resolution)
    print(f"scenario {sc.name}: |G| = {sc.G.order}, |N| = {sc.N.order}, M = {sc.M.underlying}")
    print(f"coefficients: A = {sc.ses.A.underlying}, B = {sc.ses.B.underlying}, "
          f"C = {sc.ses.C.underlying}")
    ok = True
    for t in (1, 2, 3):
        print(f"t = {t}: E2 page (rows q, columns p)")
        for q in range(3, -1, -1):
            print("  " + "  ".join(f"{str(S.E2(t, p, q)):>8}" for p in range(4 - q)))
        ok = _print_seq(S.low_term_sequence(t)) and ok
    rep = verify(build_main_diagram(S, sc.name))
    print(f"main diagram: {_mark(rep.passed)}")
    return OK if ok and rep.passed else FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lowterm", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def scen(sp):
        sp.add_argument("scenario", help="builtin name (LIB-0..3) or scenario file")
        sp.add_argument("--resolution", choices=("reduced", "bar"), default="reduced",
                        help="resolution of G used to build D")
        return sp

    v = scen(sub.add_parser("verify", help="build and verify the diagrams"))
    v.add_argument("--variant", action="store_true", help="also verify the cone variants")
    v.add_argument("--json", metavar="OUT", help="write the JSON report here")
    c = scen(sub.add_parser("chase", help="zig-zag chase"))
    c.add_argument("--position", choices=("left", "right"), required=True)
    c.add_argument("--enumerate", action="store_true", help="try every (beta, gamma) pair")
    c.add_argument("--sample", type=int, default=200, help="pairs to draw for infinite nodes")
    h = scen(sub.add_parser("cohomology", help="H^q(G, M)"))
    h.add_argument("--degree", type=int, required=True)
    h.add_argument("--resolution-kind", choices=("bar", "reduced"), default="bar")
    e = scen(sub.add_parser("ext", help="hyper-Ext against Ext over Z[G]"))
    e.add_argument("--degree", type=int, required=True)
    e.add_argument("--t", type=int, choices=(1, 2, 3), default=1)
    lt = scen(sub.add_parser("lowterm", help="the seven-term sequence"))
    lt.add_argument("--t", type=int, choices=(1, 2, 3), required=True)
    scen(sub.add_parser("report", help="E2 page, low-term sequences, diagram status"))
    return p


COMMANDS = {"verify": cmd_verify, "chase": cmd_chase, "cohomology": cmd_cohomology,
            "ext": cmd_ext, "lowterm": cmd_lowterm, "report": cmd_report}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return BAD_INPUT if exc.code else OK
    try:
        return COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT


def run(command: str, args: Sequence[str] = ()) -> int:
    return main([command, *args])


if __name__ == "__main__":
    sys.exit(main())

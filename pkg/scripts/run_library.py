"""Verify every builtin scenario: main diagram, cone variants and exhaustive chases.

    python scripts/run_library.py [--resolution bar] [--json-dir out/]

Prints one line per scenario with timings; exits non-zero if anything fails.
"""

import argparse
import json
import os
import sys
import time

from lowterm.diagrams import (
    build_main_diagram,
    build_variant_diagram,
    canonical_variants,
    enumerate_chases,
    stalk0_comparison,
    verify,
)
from lowterm.scenario import builtin_scenarios


def run_one(sc, resolution):
    t0 = time.perf_counter()
    S = sc.spectral(resolution)
    main = build_main_diagram(S, sc.name)
    reports = [verify(main)]
    for label, (B, f) in canonical_variants(S).items():
        d, vd = build_variant_diagram(S, B, f, f"{sc.name}/variant:{label}")
        rep = verify(d)
        if label == "stalk0":
            rep.checks.extend(stalk0_comparison(S, main, d, vd))
        reports.append(rep)
    chases = {p: enumerate_chases(main, p) for p in ("left", "right")}
    return reports, chases, time.perf_counter() - t0


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--resolution", choices=("reduced", "bar"), default="reduced")
    ap.add_argument("--json-dir", help="write one JSON report list per scenario here")
    args = ap.parse_args()
    ok, total = True, 0.0
    for name, sc in builtin_scenarios().items():
        reports, chases, dt = run_one(sc, args.resolution)
        total += dt
        passed = all(r.passed for r in reports) and all(c.ok for c in chases.values())
        ok = ok and passed
        chase_txt = ", ".join(f"{p} {c.successes}/{c.compatible}" for p, c in chases.items())
        print(f"{name}: {'pass' if passed else 'FAIL'}  diagrams {len(reports)}  "
              f"chases {chase_txt}  {dt:.2f}s")
        if args.json_dir:
            os.makedirs(args.json_dir, exist_ok=True)
            with open(os.path.join(args.json_dir, f"{name}.json"), "w", encoding="utf-8") as fh:
                json.dump([r.to_json() for r in reports], fh, indent=2)
    print(f"total {total:.2f}s")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())

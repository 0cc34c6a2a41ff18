#!/usr/bin/env python3
"""Run a randomized adequacy campaign.

Generates seeded random closed terms of the tester-argument type, computes
the step engine's certified lower bound and the domain evaluator's
guaranteed mass for each, and tallies the comparison verdicts. Any
violation is printed with the offending term and makes the exit status
nonzero, so the script doubles as a long-running soak check.

Examples:

    python3 scripts/adequacy_campaign.py --count 500
    python3 scripts/adequacy_campaign.py --count 200 --rec-probability 0.3 \
        --omega-weight 1 --max-depth 6 --seed 3
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction

from cbpvdp.harness import GenPolicy, TermGen, adequacy_check
from cbpvdp.surface import print_term
from cbpvdp.syntax import FVUNIT


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=300,
                    help="number of random terms (default 300)")
    ap.add_argument("--max-depth", type=int, default=7,
                    help="generator depth budget (default 7)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--rec-probability", type=float, default=0.0,
                    help="chance of a rec binder at eligible positions")
    ap.add_argument("--omega-weight", type=int, default=0,
                    help="leaf weight of the diverging constant")
    ap.add_argument("--epsilon", type=Fraction, default=Fraction(1, 10 ** 6),
                    help="gap at which the engine stops tightening")
    ap.add_argument("--max-budget", type=int, default=100_000)
    ap.add_argument("--rec-depths", type=int, nargs="+",
                    default=[8, 16, 32, 64],
                    help="evaluator unfolding depths, tried in order")
    ap.add_argument("--show-terms", action="store_true",
                    help="print every term with its verdict")
    args = ap.parse_args(argv)

    policy = GenPolicy(max_depth=args.max_depth, seed=args.seed,
                       rec_probability=args.rec_probability,
                       omega_weight=args.omega_weight)
    gen = TermGen(policy)

    tally: dict = {}
    violations = []
    started = time.perf_counter()
    for i in range(args.count):
        term = gen.term(FVUNIT)
        report = adequacy_check(term, epsilon=args.epsilon,
                                max_budget=args.max_budget,
                                rec_depths=tuple(args.rec_depths))
        tally[report.verdict] = tally.get(report.verdict, 0) + 1
        if args.show_terms:
            print(f"[{i:4d}] {report.verdict:12s} "
                  f"op={report.op_lower} den={report.den_mass} "
                  f"{print_term(term)}")
        if report.verdict == "violation":
            violations.append((term, report))
    elapsed = time.perf_counter() - started

    print(f"terms: {args.count}  seed: {args.seed}  "
          f"depth: {args.max_depth}  rec_p: {args.rec_probability}  "
          f"time: {elapsed:.1f}s")
    for verdict in ("exact-match", "convergent", "inconclusive", "violation"):
        if verdict in tally:
            print(f"  {verdict:12s} {tally[verdict]}")

    for term, report in violations:
        print("VIOLATION:", report.detail)
        print("  term:", print_term(term))
        print(f"  op_lower={report.op_lower} (exact={report.op_exact})  "
              f"den_mass={report.den_mass} (exact={report.den_exact})")
    return 1 if violations else 0


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""Check the semantic operator laws on randomized inputs.

Every law is an exact rational identity, so a single mismatch is a bug,
not noise. The producer-level lift is exercised with function denotations
taken from randomly generated terms (term-definable functions are
monotone, which the generator-set normalization needs); the
distribution-level lift is exercised with arbitrary lookup tables, where
no monotonicity holds or is needed.

    python3 scripts/operator_laws.py --trials 1000 --seed 0
"""

from __future__ import annotations

import argparse
import random
import sys

from cbpvdp.harness import LAW_TRIALS


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=1000,
                    help="random inputs per law family (default 1000)")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    failures = 0
    for name, trial in LAW_TRIALS:
        rng = random.Random(f"{args.seed}:{name}")
        bad = 0
        for i in range(args.trials):
            try:
                trial(rng)
            except AssertionError as exc:
                bad += 1
                if bad <= 3:
                    print(f"{name} trial {i}: {exc}")
        status = "ok" if bad == 0 else f"{bad} FAILED"
        print(f"{name:18s} {args.trials} trials  {status}")
        failures += bad
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface.

Subcommands: check, run, eval, adequacy, expand, fuzz, trace. Input terms
come from a file path or from stdin when the path is '-'. Flags can also be
set through CBPVDP_-prefixed environment variables (for example
CBPVDP_EPSILON=1/1000 or CBPVDP_FORMAT=records).

Exit codes: 0 success, 1 type or semantic failure, 2 parse failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from . import densem, harness, opsem, surface, typecheck
from .syntax import FVUNIT

EXIT_OK = 0
EXIT_SEMANTIC = 1
EXIT_PARSE = 2


def _env(name: str, default):
    return os.environ.get(f"CBPVDP_{name}", default)


def _fraction(text) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from e


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cbpvdp",
        description="Typecheck, run, and evaluate call-by-push-value "
                    "programs with probabilistic and demonic choice.")
    ap.add_argument("--epsilon", type=_fraction,
                    default=_env("EPSILON", "1/1000000"),
                    help="stop widening budgets once successive lower bounds "
                         "differ by less than this (0 disables; default "
                         "1/1000000)")
    ap.add_argument("--max-budget", type=int,
                    default=int(_env("MAX_BUDGET", 10 ** 6)),
                    help="largest step budget tried (default 1000000)")
    ap.add_argument("--rec-depth", type=int,
                    default=int(_env("REC_DEPTH", 64)),
                    help="iterations per recursion in the evaluator "
                         "(default 64)")
    ap.add_argument("--seed", type=int, default=int(_env("SEED", 0)),
                    help="generator seed (default 0)")
    ap.add_argument("--format", choices=("human", "records"),
                    default=_env("FORMAT", "human"),
                    help="output style (default human)")

    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse and typecheck a term")
    p.add_argument("path")

    p = sub.add_parser("run", help="certified lower bound on termination "
                                   "probability (term must have type F V unit)")
    p.add_argument("path")
    p.add_argument("--trace", action="store_true",
                   help="print the deterministic rule spine first")

    p = sub.add_parser("eval", help="denotational value of a term")
    p.add_argument("path")

    p = sub.add_parser("adequacy", help="random differential comparison of "
                                        "the step engine and the evaluator")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--max-depth", type=int, default=6)
    p.add_argument("--rec-probability", type=float, default=0.0)

    p = sub.add_parser("expand", help="parse, elaborate, and reprint a term")
    p.add_argument("path")

    p = sub.add_parser("fuzz", help="generate random well-typed terms and "
                                    "check machine invariants on them")
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--max-depth", type=int, default=6)
    p.add_argument("--print-terms", action="store_true")

    p = sub.add_parser("trace", help="print the deterministic rule spine "
                                     "of a run")
    p.add_argument("path")
    p.add_argument("--max-steps", type=int, default=1000)

    return ap


def _read_source(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _fmt_fraction(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x)


def _decimal(x: Fraction) -> str:
    return f"{float(x):.6f}"


def emit(args, human_text: str, **fields):
    if args.format == "records":
        for k, v in fields.items():
            print(f"{k}={v}")
        print()
    else:
        print(human_text)


def _load_term(args):
    text = _read_source(args.path)
    return surface.parse(text)


def cmd_check(args) -> int:
    term = _load_term(args)
    _core, ty = typecheck.elaborate(term)
    emit(args, f"ok: {ty}", status="ok", type=ty)
    return EXIT_OK


def cmd_run(args) -> int:
    term = _load_term(args)
    if args.trace:
        for entry in opsem.trace(term, max_steps=10000):
            if entry.config is None:
                print(f"  {entry.rule}")
            else:
                print(f"  {entry.rule:14s} "
                      f"{surface.print_term(entry.config.focus)}")
    res = opsem.pr_limit(term, epsilon=args.epsilon,
                         max_budget=args.max_budget)
    emit(args,
         f"lower bound {_fmt_fraction(res.lower)} ({_decimal(res.lower)}), "
         f"{'exact' if res.exact else 'not known exact'}, "
         f"{res.steps_used} steps",
         lower=_fmt_fraction(res.lower),
         lower_decimal=_decimal(res.lower),
         exact=str(res.exact).lower(),
         steps=res.steps_used)
    return EXIT_OK


def cmd_eval(args) -> int:
    term = _load_term(args)
    out = densem.evaluate(term, rec_depth=args.rec_depth)
    fields = dict(value=densem.render_value(out.value),
                  type=out.ty,
                  exact=str(out.exact).lower())
    extra = ""
    if out.ty == FVUNIT:
        mass = densem.hstar(out.value)
        fields["mass"] = _fmt_fraction(mass)
        fields["mass_decimal"] = _decimal(mass)
        extra = (f"; guaranteed mass {_fmt_fraction(mass)}"
                 f" ({_decimal(mass)})")
    emit(args,
         f"{densem.render_value(out.value)} : {out.ty} "
         f"({'exact' if out.exact else 'approximant'}){extra}",
         **fields)
    return EXIT_OK


def cmd_expand(args) -> int:
    term = _load_term(args)
    core, ty = typecheck.elaborate(term)
    emit(args, f"{surface.print_term(core)}\n: {ty}",
         core=surface.print_term(core), type=ty)
    return EXIT_OK


def cmd_trace(args) -> int:
    term = _load_term(args)
    entries = opsem.trace(term, max_steps=args.max_steps)
    if args.format == "records":
        for e in entries:
            print(f"rule={e.rule}")
            if e.config is not None:
                print(f"focus={surface.print_term(e.config.focus)}")
                print(f"frames={len(e.config.ctx.frames)}")
            print()
    else:
        for e in entries:
            if e.config is None:
                print(e.rule)
            else:
                print(f"{e.rule:14s} {surface.print_term(e.config.focus)}")
    return EXIT_OK


def cmd_adequacy(args) -> int:
    policy = harness.GenPolicy(max_depth=args.max_depth, seed=args.seed,
                               rec_probability=args.rec_probability)
    reports = harness.adequacy_campaign(args.count, policy,
                                        epsilon=args.epsilon,
                                        max_budget=args.max_budget)
    tally = {}
    for r in reports:
        tally[r.verdict] = tally.get(r.verdict, 0) + 1
    if args.format == "records":
        for r in reports:
            print(f"verdict={r.verdict}")
            print(f"op_lower={_fmt_fraction(r.op_lower)}")
            print(f"op_exact={str(r.op_exact).lower()}")
            print(f"den_mass={_fmt_fraction(r.den_mass)}")
            print(f"den_exact={str(r.den_exact).lower()}")
            print()
        print(f"total={len(reports)}")
        for k in sorted(tally):
            print(f"{k.replace('-', '_')}={tally[k]}")
    else:
        for k in sorted(tally):
            print(f"{k}: {tally[k]}")
        print(f"total: {len(reports)}")
    violations = tally.get("violation", 0)
    if violations:
        for r in reports:
            if r.verdict == "violation":
                print(f"violating term: {surface.print_term(r.term)}",
                      file=sys.stderr)
        return EXIT_SEMANTIC
    return EXIT_OK


def cmd_fuzz(args) -> int:
    policy = harness.GenPolicy(max_depth=args.max_depth, seed=args.seed)
    gen = harness.TermGen(policy)
    failures = 0
    for i in range(args.count):
        term = gen.term(FVUNIT)
        if args.print_terms:
            print(surface.print_term(term))
        try:
            core = typecheck.check(term, FVUNIT)
            cfg = opsem.initial_config(core)
            for _ in range(200):
                hole = typecheck.check_context(cfg.ctx)
                typecheck.check(cfg.focus, hole)
                out = opsem.step(cfg)
                if not isinstance(out, opsem.Det):
                    break
                cfg = out.next
        except Exception as e:
            failures += 1
            print(f"fuzz case {i} failed: {e}", file=sys.stderr)
            print(f"  term: {surface.print_term(term)}", file=sys.stderr)
    emit(args, f"fuzz: {args.count - failures}/{args.count} ok",
         ok=args.count - failures, total=args.count)
    return EXIT_OK if failures == 0 else EXIT_SEMANTIC


_COMMANDS = {
    "check": cmd_check,
    "run": cmd_run,
    "eval": cmd_eval,
    "adequacy": cmd_adequacy,
    "expand": cmd_expand,
    "fuzz": cmd_fuzz,
    "trace": cmd_trace,
}


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if isinstance(args.epsilon, str):
        args.epsilon = Fraction(args.epsilon)
    try:
        return _COMMANDS[args.command](args)
    except surface.ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except typecheck.TypeCheckError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SEMANTIC
    except (opsem.OpsemError, densem.DomainError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SEMANTIC


if __name__ == "__main__":
    sys.exit(main())

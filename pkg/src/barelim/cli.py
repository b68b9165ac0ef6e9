"""Command-line front end: ``barelim translate|check|level|run|demo``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from barelim import syntax as sx
from barelim.evaluator import EvalError, FuelExhausted, Fuel, evaluate, format_value, run_deep
from barelim.harness import SampleSpec, analyze_fragment, check_equivalence, run_demo
from barelim.parse import ParseError, format_program, format_term, parse
from barelim.translator import TranslationError, elimination
from barelim.types import CircContext, TypeSyntaxError, UnsupportedType, parse_type

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT, EXIT_FUEL = 0, 1, 2, 3
INPUT_ERRORS = (ParseError, TypeSyntaxError, sx.TypeCheckError, TranslationError, UnsupportedType,
                OSError, ValueError)


def _read_term(path: str) -> sx.Term:
    return parse(Path(path).read_text(encoding="utf-8"))


def _ctx(args) -> CircContext:
    return CircContext(parse_type(args.tau), parse_type(args.sigma))


def _fuel(args) -> Fuel:
    return Fuel(max_steps=args.fuel_steps, max_br_depth=args.fuel_br_depth)


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def cmd_translate(args) -> int:
    elim = elimination(_read_term(args.input), _ctx(args))
    _write(args.output, format_term(elim.term) + "\n")
    if args.show_definitions:
        print(format_program(elim.term, elim.definitions()))
    return EXIT_OK


def cmd_check(args) -> int:
    spec = SampleSpec(seed=args.seed, n_samples=args.samples, seq_alphabet_bound=args.alphabet,
                      max_seq_len=args.max_len)
    report = check_equivalence(_read_term(args.input), _ctx(args), spec, _fuel(args))
    if args.report:
        _write(args.report, report.dumps())
    agree = sum(v["equal"] for v in report.samples)
    print(f"{agree}/{len(report.samples)} samples agree; max recursor level {report.max_level}, "
          f"bound {report.bound_j}; {report.wall_time:.2f}s", file=sys.stderr)
    if report.witness:
        w = report.witness
        print(f"bar witness ({w['bar_note']}): {w['failures']} sampler failures, "
              f"{w['equation_mismatches']}/{w['equation_samples']} equation mismatches", file=sys.stderr)
    if report.counterexample:
        print(f"counterexample: {report.counterexample}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_MISMATCH


def cmd_level(args) -> int:
    t = _read_term(args.input)
    sx.typecheck(t)
    print(analyze_fragment(t).table())
    return EXIT_OK


def cmd_run(args) -> int:
    t = _read_term(args.input)
    for a in args.args or ():
        t = sx.App(t, _read_term(a))
    sx.typecheck(t)
    print(format_value(evaluate(t, fuel=_fuel(args))))
    return EXIT_OK


def cmd_demo(args) -> int:
    return run_demo(seed=args.seed, n_samples=args.samples)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="barelim", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def ctx_args(q):
        q.add_argument("--tau", default="N", help="sequence element type: N or N->N")
        q.add_argument("--sigma", default="N", help="result type of the recursion")

    def fuel_args(q):
        q.add_argument("--fuel-steps", type=int, default=Fuel.max_steps)
        q.add_argument("--fuel-br-depth", type=int, default=Fuel.max_br_depth)

    q = sub.add_parser("translate", help="print the bar-recursion-free term for a stopping functional")
    ctx_args(q)
    q.add_argument("--input", required=True)
    q.add_argument("--output", default=None)
    q.add_argument("--show-definitions", action="store_true",
                   help="also print the term with shared combinators named (stdout)")
    q.set_defaults(func=cmd_translate)

    q = sub.add_parser("check", help="compare the translation against the bar recursion oracle")
    ctx_args(q)
    fuel_args(q)
    q.add_argument("--input", required=True)
    q.add_argument("--seed", type=int, default=42)
    q.add_argument("--samples", type=int, default=100)
    q.add_argument("--alphabet", type=int, default=3)
    q.add_argument("--max-len", type=int, default=4)
    q.add_argument("--report", default=None, help="JSON report path ('-' for stdout)")
    q.set_defaults(func=cmd_check)

    q = sub.add_parser("level", help="recursor census of a term")
    q.add_argument("--input", required=True)
    q.set_defaults(func=cmd_level)

    q = sub.add_parser("run", help="evaluate a closed term, optionally applied to argument terms")
    fuel_args(q)
    q.add_argument("--input", required=True)
    q.add_argument("--args", nargs="*", default=[])
    q.set_defaults(func=cmd_run)

    q = sub.add_parser("demo", help="end-to-end run on the worked example")
    q.add_argument("--seed", type=int, default=42)
    q.add_argument("--samples", type=int, default=100)
    q.set_defaults(func=cmd_demo)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run_deep(lambda: args.func(args))
    except FuelExhausted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FUEL
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except EvalError as exc:
        print(f"internal evaluation error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

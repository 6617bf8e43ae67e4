"""
Command-line interface.

Exit codes: 0 success, 1 check failure, 2 usage or parse error, 3 fuel
exhausted where a definite answer was requested.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import derivation as dv
from .harness import (
    ALL_CHECKS, CheckReport, bundled_corpus_path, load_corpus, random_closed_term, run_terms,
)
from .multitypes import TypeSyntaxError
from .reduction import (
    ALL_KINDS, BETA_ONLY, DEFAULT_FUEL, Mode, NormalClass, balanced_size, classify, normalize,
)
from .search import DEFAULT_CAP
from .semantics import UnsuitableList, interpret_bounded
from .terms import ParseError, parse, pretty

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_FUEL = 0, 1, 2, 3
DEFAULT_SEED = 0
DEFAULT_RANDOM = 50


class _Exit(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)

    def default(value):
        return argparse.SUPPRESS if suppress else value

    p.add_argument("--unicode", action="store_true", default=default(False),
                   help="print lambda as λ")
    p.add_argument("--fuel", type=int, default=default(DEFAULT_FUEL),
                   help=f"maximum number of reduction steps (default {DEFAULT_FUEL})")
    p.add_argument("--cap", type=int, default=default(DEFAULT_CAP),
                   help=f"maximum arrows per type in derivation search (default {DEFAULT_CAP})")
    p.add_argument("--seed", type=int, default=default(DEFAULT_SEED),
                   help=f"random seed (default {DEFAULT_SEED})")
    p.add_argument("--json", action="store_true", default=default(False),
                   help="machine-readable JSON output")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shuffling", parents=[_global_flags(False)],
        description="Balanced shuffling calculus: reduction, multi-type derivations and checks.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    common = [_global_flags(True)]

    def add(name, help_):
        return sub.add_parser(name, parents=common, help=help_, description=help_)

    p = add("parse", "parse a term and print it back")
    p.add_argument("term")

    p = add("reduce", "reduce a term with the leftmost-outermost strategy")
    p.add_argument("term")
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.BALANCED.value,
                   help="balanced or full contexts (default balanced)")
    p.add_argument("--trace", action="store_true", help="print every step")
    p.add_argument("--beta-only", action="store_true", help="use beta_v steps only")

    p = add("classify", "classify a term as value, neutral, normal or reducible")
    p.add_argument("term")

    p = add("check-derivation", "check a derivation stored as JSON")
    p.add_argument("file", help="JSON file, or - for standard input")

    p = add("derive-empty", "build the derivation of |- t : 0 for a term reaching a value")
    p.add_argument("term")

    p = add("count-steps", "count beta_v steps to the balanced normal form")
    p.add_argument("term")

    p = add("semantics", "points of the interpretation within the type cap")
    p.add_argument("term")
    p.add_argument("--vars", default=None,
                   help="comma-separated variable list (default: free variables, sorted)")
    p.add_argument("--max-size", type=int, default=None,
                   help="largest normal-form derivation considered (default unbounded)")

    p = add("verify", "run the checks on a corpus and on random closed terms")
    p.add_argument("--corpus", default=None, help="corpus file (default: bundled corpus)")
    p.add_argument("--check", choices=ALL_CHECKS, action="append", default=None,
                   help="run only this check (repeatable)")
    p.add_argument("--random", type=int, default=DEFAULT_RANDOM,
                   help=f"number of random closed terms added (default {DEFAULT_RANDOM})")
    p.add_argument("--max-term-size", type=int, default=10,
                   help="node bound of random terms (default 10)")
    return parser


def _term(src: str):
    try:
        return parse(src, constants=True)
    except ParseError as exc:
        raise _Exit(EXIT_USAGE, f"parse error: {exc}") from None


def _emit(args, data, lines):
    if args.json:
        print(json.dumps(data, ensure_ascii=False, indent=2))
    else:
        for line in lines:
            print(line)


def cmd_parse(args):
    t = _term(args.term)
    _emit(args, {"term": pretty(t), "free_vars": sorted(t.fv)}, [pretty(t, args.unicode)])
    return EXIT_OK


def cmd_reduce(args):
    t = _term(args.term)
    kinds = BETA_ONLY if args.beta_only else ALL_KINDS
    seq = normalize(t, Mode(args.mode), args.fuel, kinds)
    lines = []
    if args.trace:
        lines.append(f"0: {pretty(t, args.unicode)}")
        lines.extend(seq.trace_lines(args.unicode))
    lines.append(pretty(seq.final, args.unicode))
    status = "" if seq.normal else "  (fuel exhausted)"
    lines.append(f"leng_bv={seq.leng_betav} steps={len(seq)}{status}")
    _emit(args, seq.to_json(), lines)
    return EXIT_OK if seq.normal else EXIT_FUEL


def cmd_classify(args):
    t = _term(args.term)
    cls = classify(t)
    data = {"term": pretty(t), "class": cls.value}
    line = cls.value
    if cls is not NormalClass.REDUCIBLE:
        data["balanced_size"] = balanced_size(t)
        line += f"  balanced_size={data['balanced_size']}"
    _emit(args, data, [line])
    return EXIT_OK


def cmd_check_derivation(args):
    try:
        text = sys.stdin.read() if args.file == "-" else Path(args.file).read_text()
        data = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise _Exit(EXIT_USAGE, f"cannot read derivation: {exc}") from None
    try:
        d = dv.from_json(data)
        j = dv.check(d)
    except (ParseError, TypeSyntaxError) as exc:
        raise _Exit(EXIT_USAGE, f"malformed derivation: {exc}") from None
    except dv.RuleViolation as exc:
        if args.json:
            print(json.dumps({"valid": False, "error": str(exc)}))
        else:
            print(str(exc))
        return EXIT_FAIL
    _emit(args, {"valid": True, "env": str(j.env), "subject": pretty(j.subject),
                 "type": str(j.type), "size": d.size},
          [f"{dv.format_judgment(j, args.unicode)}  size={d.size}"])
    return EXIT_OK


def cmd_derive_empty(args):
    t = _term(args.term)
    seq = normalize(t, Mode.BALANCED, args.fuel)
    if not seq.normal:
        _emit(args, {"result": "fuel exhausted"}, ["unknown (fuel exhausted)"])
        return EXIT_FUEL
    d = dv.derive_empty(t, args.fuel)
    if d is None:
        _emit(args, {"result": "no derivation", "normal_form": pretty(seq.final)},
              [f"no derivation: normal form {pretty(seq.final, args.unicode)} is not a value"])
        return EXIT_FAIL
    j = dv.check(d)
    _emit(args, {"result": "derivation", "derivation": dv.to_json(d), "size": d.size,
                 "leng_bv": seq.leng_betav},
          [f"{dv.format_judgment(j, args.unicode)}  size={d.size}  leng_bv={seq.leng_betav}"])
    return EXIT_OK


def cmd_count_steps(args):
    t = _term(args.term)
    seq = normalize(t, Mode.BALANCED, args.fuel)
    if not seq.normal:
        _emit(args, {"result": "diverges", "fuel": args.fuel}, ["diverges (fuel exhausted)"])
        return EXIT_FUEL
    _emit(args, {"result": "normal", "leng_bv": seq.leng_betav, "steps": len(seq),
                 "normal_form": pretty(seq.final)},
          [f"leng_bv={seq.leng_betav}  normal form {pretty(seq.final, args.unicode)}"])
    return EXIT_OK


def cmd_semantics(args):
    t = _term(args.term)
    vars_ = None
    if args.vars is not None:
        vars_ = tuple(v.strip() for v in args.vars.split(",") if v.strip())
    try:
        frag = interpret_bounded(t, vars_, args.cap, args.fuel, args.max_size)
    except UnsuitableList as exc:
        raise _Exit(EXIT_USAGE, str(exc)) from None
    lines = frag.lines()
    if frag.incomplete:
        lines.append("incomplete (fuel exhausted)")
    _emit(args, frag.to_json(), lines)
    return EXIT_FUEL if frag.incomplete else EXIT_OK


def cmd_verify(args):
    try:
        terms = load_corpus(args.corpus or bundled_corpus_path())
    except OSError as exc:
        raise _Exit(EXIT_USAGE, f"cannot read corpus: {exc}") from None
    except ParseError as exc:
        raise _Exit(EXIT_USAGE, f"corpus parse error: {exc}") from None
    rng = random.Random(args.seed)
    terms += [random_closed_term(rng, args.max_term_size) for _ in range(args.random)]
    reports = run_terms(terms, args.fuel, args.check)
    merged = {}
    for r in reports:
        merged.setdefault(r.check_name, CheckReport(r.check_name)).merge(r)
    ok = all(r.passed for r in merged.values())
    lines = []
    for r in merged.values():
        lines.append(r.summary())
        for subject, expected, actual in r.failures:
            lines.append(f"  {subject}: expected {expected}, got {actual}")
    lines.append("all checks passed" if ok else "some checks failed")
    _emit(args, {"passed": ok, "reports": [r.to_json() for r in merged.values()]}, lines)
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {
    "parse": cmd_parse,
    "reduce": cmd_reduce,
    "classify": cmd_classify,
    "check-derivation": cmd_check_derivation,
    "derive-empty": cmd_derive_empty,
    "count-steps": cmd_count_steps,
    "semantics": cmd_semantics,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.fuel <= 0 or args.cap < 0:
        print("error: --fuel must be positive and --cap non-negative", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except _Exit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())

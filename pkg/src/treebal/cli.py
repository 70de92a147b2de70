"""Command-line front end: parse -> balance -> verify -> export.

Exit codes: 1 for input/parse errors, 2 for verification failures, 3 when
the unfold capacity cap is exceeded.  Reports are JSON, schema "v1".
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .algebra import eval_term, eval_tslp, get_algebra
from .contraction import internal_leaves, round_count, state_to_dot, tree_at_round
from .decomposition import hierarchical_definition, pattern_classes
from .generators import generate
from .regex import balance_regex, parse_regex, regex_equiv, render_regex
from .semiring import balance_semiring, eval_semiring_circuit
from .terms import OrderedTree, ParseError, TermError, parse_term, render_term
from .tslp import CapacityError, balance, build_tslp, minimal_dag, productions, unfold

EXIT_PARSE = 1
EXIT_VERIFY = 2
EXIT_CAP = 3


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _read_input(args) -> str:
    if args.expr is not None:
        return args.expr
    path = getattr(args, "infile", None)
    if path is None or path == "-":
        return sys.stdin.read()
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_PARSE)


def _write(path, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _report(n: int, circuit, classes: int, t0: float, verdict: str) -> dict:
    st = circuit.stats()
    return {
        "schema": "v1",
        "n": n,
        "tslp_size": st["size"],
        "tslp_depth": st["depth"],
        "class_count": classes,
        "wall_ms": round((time.monotonic() - t0) * 1000, 3),
        "verdict": verdict,
    }


def _emit_hierdef(T: OrderedTree, P, path) -> None:
    table = pattern_classes(T, P)
    entries = []
    for p in sorted(P.patterns):
        e = {"type": "subtree" if p[0] == "S" else "context", "v": p[1]}
        if p[0] == "C":
            e["w"] = p[2]
        e["class"] = table.class_of(p)
        entries.append(e)
    _write(path, json.dumps(entries, indent=2))


def cmd_balance(args) -> int:
    t0 = time.monotonic()
    try:
        t = parse_term(_read_input(args).strip())
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    T = OrderedTree.from_term(t)
    P = hierarchical_definition(T)
    C = minimal_dag(build_tslp(T, P))
    verdict = "skipped"
    if args.verify:
        try:
            verdict = "verified" if unfold(C) == t else "failed"
        except CapacityError as exc:
            print(f"capacity: {exc}", file=sys.stderr)
            return EXIT_CAP
    if args.out:
        _write(args.out, productions(C))
    if args.emit_dot:
        _write(args.emit_dot, C.to_dot())
    if args.emit_hierdef:
        _emit_hierdef(T, P, args.emit_hierdef)
    report = _report(t.size, C, pattern_classes(T, P).count, t0, verdict)
    if args.stats or not args.out:
        print(json.dumps(report))
    return EXIT_VERIFY if verdict == "failed" else 0


def cmd_semiring(args) -> int:
    t0 = time.monotonic()
    try:
        t = parse_term(_read_input(args).strip())
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        C = balance_semiring(t)
    except TermError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    verdict = "skipped"
    if args.verify:
        A = get_algebra(args.algebra)
        verdict = ("verified"
                   if A.equal(eval_semiring_circuit(C, A), eval_term(t, A))
                   else "failed")
    if args.emit_dot:
        _write(args.emit_dot, C.to_dot())
    print(json.dumps(_report(t.size, C, C.n, t0, verdict)))
    return EXIT_VERIFY if verdict == "failed" else 0


def cmd_regex(args) -> int:
    t0 = time.monotonic()
    try:
        r = parse_regex(_read_input(args).strip())
    except TermError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    C = balance_regex(r)
    verdict = "skipped"
    if args.verify:
        verdict = "verified" if regex_equiv(r, C.unfold_regex()) else "failed"
    if args.emit_dot:
        _write(args.emit_dot, C.to_dot())
    report = _report(len(render_regex(r)), C, C.n, t0, verdict)
    report["star_height"] = C.star_height()
    print(json.dumps(report))
    return EXIT_VERIFY if verdict == "failed" else 0


def cmd_eval(args) -> int:
    t0 = time.monotonic()
    try:
        t = parse_term(_read_input(args).strip())
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    A = get_algebra(args.algebra)
    C = balance(t)
    value = eval_tslp(C, A)
    verdict = "skipped"
    if args.verify:
        verdict = "verified" if A.equal(value, eval_term(t, A)) else "failed"
    report = _report(t.size, C, C.n, t0, verdict)
    report["value"] = repr(value)
    print(json.dumps(report))
    return EXIT_VERIFY if verdict == "failed" else 0


def cmd_gen(args) -> int:
    t = generate(args.shape, args.n, seed=args.seed)
    _write(args.out, render_term(t))
    return 0


def cmd_rounds(args) -> int:
    try:
        t = parse_term(_read_input(args).strip())
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    T = OrderedTree.from_term(t)
    try:
        m = round_count(len(internal_leaves(T)))
        frames = []
        for i in range(m + 1):
            state = tree_at_round(T, i)
            frames.append(state_to_dot(state, T, name=f"T{i}"))
    except TermError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    _write(args.out, "\n".join(frames))
    return 0


def _add_io(sp, needs_in=True):
    if needs_in:
        sp.add_argument("--in", dest="infile", default=None,
                        help="input file ('-' or absent: stdin)")
        sp.add_argument("--expr", default=None,
                        help="inline input instead of a file")
    sp.add_argument("--out", default=None, help="output file (default stdout)")


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="treebal",
                                 description="Balance expressions into "
                                             "logarithmic-depth circuits.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("balance", help="term -> normal-form TSLP")
    _add_io(sp)
    sp.add_argument("--verify", action="store_true")
    sp.add_argument("--stats", action="store_true")
    sp.add_argument("--emit-dot", default=None, metavar="FILE")
    sp.add_argument("--emit-hierdef", default=None, metavar="FILE")
    sp.set_defaults(fn=cmd_balance)

    sp = sub.add_parser("semiring", help="add/mul term -> +/x circuit")
    _add_io(sp)
    sp.add_argument("--algebra", default="modp:2147483647")
    sp.add_argument("--verify", action="store_true")
    sp.add_argument("--stats", action="store_true")
    sp.add_argument("--emit-dot", default=None, metavar="FILE")
    sp.set_defaults(fn=cmd_semiring)

    sp = sub.add_parser("regex", help="regular expression -> balanced circuit")
    _add_io(sp)
    sp.add_argument("--verify", action="store_true")
    sp.add_argument("--stats", action="store_true")
    sp.add_argument("--emit-dot", default=None, metavar="FILE")
    sp.set_defaults(fn=cmd_regex)

    sp = sub.add_parser("eval", help="evaluate a term via its balanced TSLP")
    _add_io(sp)
    sp.add_argument("--algebra", default="free")
    sp.add_argument("--verify", action="store_true")
    sp.set_defaults(fn=cmd_eval)

    sp = sub.add_parser("gen", help="generate a benchmark term")
    sp.add_argument("--shape", required=True,
                    choices=["caterpillar", "complete", "random"])
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None)
    sp.set_defaults(fn=cmd_gen)

    sp = sub.add_parser("rounds", help="dump contraction rounds as DOT frames")
    _add_io(sp)
    sp.set_defaults(fn=cmd_rounds)
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except CapacityError as exc:
        print(f"capacity: {exc}", file=sys.stderr)
        return EXIT_CAP


if __name__ == "__main__":
    sys.exit(main())

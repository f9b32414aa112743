"""Command-line front end.

Subcommands:
  check-formula  tree count plus corank-one readiness at a concrete n
  prove          run a proof (and its dependency closure), emit documents
  knit           print a slice of the Auslander-Reiten quiver (diagnostics)

Exit codes: 0 certified, 1 not certified or refused, 2 input error,
3 search budget exhausted.  Diagnostics go to stderr, results to stdout.
The environment variable QTP_BACKTRACK_LIMIT overrides the default
backtracking budget; --backtrack-limit overrides both.
"""

from __future__ import annotations

import argparse
import sys

from .engine import (CERTIFIED, RunConfig, check_formula, run_proofs)
from .errors import ParseError, QtpError, SemanticError
from .inputfmt import parse_document
from .quiver import (PREINJECTIVE, PREPROJECTIVE, SCHOFIELD_LITERAL,
                     SCHOFIELD_SUB_FIRST, knit_component)
from .trace import emit_json, emit_latex

EXIT_CERTIFIED = 0
EXIT_NOT_CERTIFIED = 1
EXIT_INPUT_ERROR = 2
EXIT_BUDGET = 3


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="qtp",
        description="Certify families of quiver representations as "
                    "field-independent exceptional indecomposable tree modules.")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check-formula",
                           help="tree count and corank readiness at one n")
    check.add_argument("--input", required=True, help="input .qtp document")
    check.add_argument("--formula", required=True, help="formula id")
    check.add_argument("--n", required=True, type=int,
                       help="concrete parameter value")
    check.add_argument("--backtrack-limit", type=int, default=None)

    prove = sub.add_parser("prove", help="run a proof and its dependencies")
    prove.add_argument("--input", required=True, help="input .qtp document")
    prove.add_argument("--proof", required=True, help="proof id")
    prove.add_argument("--emit-latex", default=None, metavar="PATH")
    prove.add_argument("--emit-json", default=None, metavar="PATH")
    prove.add_argument("--jobs", type=int, default=1)
    prove.add_argument("--schofield-order",
                       choices=[SCHOFIELD_SUB_FIRST, SCHOFIELD_LITERAL],
                       default=SCHOFIELD_SUB_FIRST)
    prove.add_argument("--backtrack-limit", type=int, default=None)

    knit = sub.add_parser("knit", help="print a knitted AR-quiver slice")
    knit.add_argument("--input", required=True, help="input .qtp document")
    knit.add_argument("--quiver", required=True, help="quiver id")
    knit.add_argument("--side", required=True, choices=["pre", "inj"])
    knit.add_argument("--depth", required=True, type=int)
    return parser


def _load(path):
    try:
        with open(path, "rb") as handle:
            raw = handle.read()
    except OSError as e:
        raise SemanticError("cannot read %s: %s" % (path, e))
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as e:
        raise SemanticError("%s is not valid UTF-8: %s" % (path, e))
    return raw, parse_document(text)


def _cmd_check_formula(args):
    raw, doc = _load(args.input)
    config = RunConfig(budget=args.backtrack_limit)
    ok, budget_flag, lines = check_formula(doc, args.formula, args.n, config)
    for line in lines:
        print(line)
    if ok:
        return EXIT_CERTIFIED
    return EXIT_BUDGET if budget_flag else EXIT_NOT_CERTIFIED


def _cmd_prove(args):
    raw, doc = _load(args.input)
    config = RunConfig(jobs=max(1, args.jobs), budget=args.backtrack_limit,
                       schofield_order=args.schofield_order)
    result = run_proofs(doc, [args.proof], config, input_bytes=raw)
    for ptrace in result.trace.proofs:
        print("proof %s (formula %s, method %d): %s"
              % (ptrace.proof_id, ptrace.target, ptrace.method, ptrace.status))
        for ob in ptrace.obligations:
            line = "  %-40s %s" % (ob.name, ob.status)
            print(line)
            if ob.message:
                print("    %s" % ob.message, file=sys.stderr)
    if args.emit_latex:
        with open(args.emit_latex, "w", encoding="utf-8") as handle:
            handle.write(emit_latex(result.trace))
    if args.emit_json:
        with open(args.emit_json, "w", encoding="utf-8") as handle:
            handle.write(emit_json(result.trace))
    if result.all_certified:
        return EXIT_CERTIFIED
    return EXIT_BUDGET if result.budget_exhausted else EXIT_NOT_CERTIFIED


def _cmd_knit(args):
    _, doc = _load(args.input)
    if args.quiver not in doc.quivers:
        raise SemanticError("unknown quiver %r" % args.quiver)
    q = doc.quivers[args.quiver]
    side = PREPROJECTIVE if args.side == "pre" else PREINJECTIVE
    comp = knit_component(q, side, args.depth)
    label = "P" if side == PREPROJECTIVE else "I"
    for (s, v) in sorted(comp.vertices):
        av = comp.vertices[(s, v)]
        print("%s(%d,%s): dim (%s)" % (label, s, v,
                                       ", ".join(str(d) for d in av.dim)))
        for (succ, mult) in comp.successors((s, v)):
            print("  -> %s(%d,%s) x%d" % (label, succ[0], succ[1], mult))
    return EXIT_CERTIFIED


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "check-formula":
            return _cmd_check_formula(args)
        if args.command == "prove":
            return _cmd_prove(args)
        if args.command == "knit":
            return _cmd_knit(args)
        parser.error("unknown command")
    except (ParseError, SemanticError) as e:
        print("input error: %s" % e, file=sys.stderr)
        return EXIT_INPUT_ERROR
    except QtpError as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_NOT_CERTIFIED
    return EXIT_CERTIFIED


if __name__ == "__main__":
    sys.exit(main())

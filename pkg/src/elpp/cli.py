"""Command-line interface: ``elpp subsumes|classify|explain|normalize|check``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import differential
from .core import InvalidKnowledgeBase, KnowledgeBase
from .oracle import DEFAULT_BUDGET, BudgetExceeded
from .pipeline import normalize
from .reasoner import check_subsumption, classify_names, run_pipeline
from .classify import explain
from .syntax import OntologyError, format_kb, parse_concept, parse_kb

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False)


def _load(path: str) -> KnowledgeBase:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return parse_kb(data)
    except OntologyError as exc:
        raise UsageError("\n".join(f"{path}:{d}" for d in exc.diagnostics)) from None


def _query(kb: KnowledgeBase, text: str, what: str):
    try:
        return parse_concept(text, kb)
    except OntologyError as exc:
        raise UsageError("\n".join(f"<{what}>:{d}" for d in exc.diagnostics)) from None


def cmd_subsumes(args, out) -> int:
    kb = _load(args.file)
    c, d = _query(kb, args.subsumee, "subsumee"), _query(kb, args.subsumer, "subsumer")
    verdict = check_subsumption(kb, c, d, trace=args.trace)
    if args.format == "json":
        data = {"holds": verdict.holds, "reason": verdict.reason}
        if verdict.trace is not None:
            data["trace"] = verdict.trace.to_dict()
        print(_dump(data), file=out)
    else:
        print(f"true ({verdict.reason})" if verdict.holds else "false", file=out)
        if verdict.trace is not None:
            print(verdict.trace.render(), file=out)
    return EXIT_OK if verdict.holds else EXIT_FALSE


def cmd_classify(args, out) -> int:
    kb = _load(args.file)
    pairs = sorted(classify_names(kb))
    if args.format == "json":
        print(_dump([list(p) for p in pairs]), file=out)
    else:
        for x, y in pairs:
            print(f"{x} <= {y}", file=out)
    return EXIT_OK


def cmd_explain(args, out) -> int:
    kb = _load(args.file)
    c, d = _query(kb, args.subsumee, "subsumee"), _query(kb, args.subsumer, "subsumer")
    run = run_pipeline(kb, c, d)
    reason, entry = run.decisive_entry()
    if reason is None:
        if args.format == "json":
            print(_dump({"holds": False, "reason": None}), file=out)
        else:
            print(f"false: {c} is not subsumed by {d}", file=out)
        return EXIT_FALSE
    tree = explain(run.state, entry)
    if args.format == "json":
        print(_dump({"holds": True, "reason": reason, "trace": tree.to_dict(),
                     "axioms": [str(x) for x in run.state.kb.constraints]}), file=out)
    else:
        print(f"true ({reason}): {c} <= {d}", file=out)
        print(f"  subsumee is {run.subsumee}, subsumer is {run.subsumer}, "
              f"witness individual {{{run.extended.individual}}}", file=out)
        print(tree.render(indent="  "), file=out)
    return EXIT_OK


def cmd_normalize(args, out) -> int:
    kb = normalize(_load(args.file))
    if args.format == "json":
        print(_dump({"axioms": [str(c) for c in kb.constraints]}), file=out)
    else:
        print(format_kb(kb), end="", file=out)
    return EXIT_OK


def cmd_check(args, out) -> int:
    try:
        report = differential.run(args.count, seed=args.seed, max_size=args.max_model_size,
                                  budget=args.budget)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    if args.format == "json":
        print(_dump(report.to_dict()), file=out)
    else:
        print(f"{report.cases} cases, {report.entailed} entailed, "
              f"{len(report.disagreements)} disagreements ({report.seconds:.1f}s)", file=out)
        for case in report.disagreements:
            print(f"case {case.seed}: reasoner says {case.holds} for "
                  f"{case.subsumee} <= {case.subsumer}", file=out)
            for line in str(case.kb).splitlines():
                print(f"  {line}", file=out)
    return EXIT_OK if report.ok else EXIT_INTERNAL


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="elpp", description="EL++ subsumption reasoner")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("subsumes", parents=[common], help="decide C <= D")
    p.add_argument("file")
    p.add_argument("subsumee")
    p.add_argument("subsumer")
    p.add_argument("--trace", action="store_true", help="include the derivation")
    p.set_defaults(func=cmd_subsumes)

    p = sub.add_parser("classify", parents=[common], help="all entailed name pairs")
    p.add_argument("file")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("explain", parents=[common], help="derivation tree for C <= D")
    p.add_argument("file")
    p.add_argument("subsumee")
    p.add_argument("subsumer")
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("normalize", parents=[common], help="print the normal form")
    p.add_argument("file")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("check", parents=[common], help="differential run against the oracle")
    p.add_argument("--count", type=_positive, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-model-size", type=_positive, default=None,
                   help="oracle domain bound (default |BC|+1 per case)")
    p.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET,
                   help="oracle search-node budget per case")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except (UsageError, InvalidKnowledgeBase) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (AssertionError, RecursionError) as exc:
        print(f"internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

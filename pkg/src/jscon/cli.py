"""Command-line runner: ``python -m jscon run program.ljc``."""

from __future__ import annotations

import argparse
import json
import sys
import threading
from typing import Any, List, Optional, TextIO

from jscon.b4 import ExceptionOutcome
from jscon.constraints import dump
from jscon.interpreter import Interpreter, Native, RunResult, Store
from jscon.parser import ParseError, parse
from jscon.syntax import IdSupply
from jscon.values import AbstractionClosure, ContractClosure, Loc, is_constant, pretty_value

EXIT_CODES = {"ok": 0, "contract-violation": 1, "sandbox-violation": 2, "runtime-error": 3}


def describe(store: Store, v: Any) -> str:
    if is_constant(v):
        return pretty_value(v)
    if isinstance(v, Loc):
        obj = store[v]
        kind = "function" if isinstance(obj, Native) and obj.closure is not None else "object"
        return f"<{kind} #{v.index}>"
    if isinstance(v, ContractClosure):
        return "<contract>"
    if isinstance(v, AbstractionClosure):
        return "<constructor>"
    return repr(v)


def report(result: RunResult, store: Store) -> dict:
    return {
        "status": result.status,
        "blamed": [{"label": b.label, "party": b.party} for b in result.blamed],
        "constraints": len(result.constraints),
        "result": describe(store, result.value) if result.status == "ok" else None,
    }


def _human(rep: dict, result: RunResult) -> str:
    if rep["status"] == "ok":
        return f"ok: {rep['result']}"
    if rep["status"] == "contract-violation":
        parts = ", ".join(f"blame {b['party']} at {b['label']}" for b in rep["blamed"])
        return f"contract violation: {parts}"
    if rep["status"] == "sandbox-violation":
        return f"sandbox violation: {result.error}"
    return f"error: {result.error}"


def _trace_printer(out: TextIO):
    def emit(rule: str, term: str, k) -> None:
        out.write(f"RULE {rule} | term={term} | ς+={k if k is not None else '-'}\n")

    return emit


def run(path: str, args: argparse.Namespace, out: TextIO, err: TextIO) -> int:
    try:
        with open(path, encoding="utf-8") as fh:
            program = parse(fh.read(), path)
    except (OSError, ParseError) as exc:
        if args.json:
            rep = {"status": "runtime-error", "blamed": [], "constraints": 0, "result": None}
            out.write(json.dumps(rep, ensure_ascii=False) + "\n")
        err.write(f"{exc}\n")
        return EXIT_CODES["runtime-error"]

    interp = Interpreter(
        ids=IdSupply(0) if args.seed_labels else None,
        trace=_trace_printer(err) if args.trace else None,
        exception_outcome=ExceptionOutcome(args.exception_outcome),
    )
    holder: List[RunResult] = []
    # deep object programs recurse deeply; give the evaluator a large stack
    previous = threading.stack_size()
    threading.stack_size(256 * 1024 * 1024)
    try:
        worker = threading.Thread(target=lambda: holder.append(interp.run(program)))
        worker.start()
        worker.join()
    finally:
        threading.stack_size(previous)
    result = holder[0]

    rep = report(result, interp.store)
    if args.json:
        out.write(json.dumps(rep, ensure_ascii=False) + "\n")
    else:
        out.write(_human(rep, result) + "\n")
    if args.dump_constraints:
        out.write(json.dumps(dump(result.constraints, result.solution), ensure_ascii=False) + "\n")
    return EXIT_CODES[result.status]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jscon", description="Run .ljc programs with contract monitoring.")
    sub = parser.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="evaluate a program file")
    r.add_argument("path")
    r.add_argument("--json", action="store_true", help="print a machine-readable report")
    r.add_argument("--trace", action="store_true", help="log rule firings to stderr")
    r.add_argument("--dump-constraints", action="store_true", help="print constraints and their solution as JSON")
    r.add_argument("--seed-labels", action="store_true", help="number internal blame ids from 0")
    r.add_argument(
        "--exception-outcome",
        choices=[o.value for o in ExceptionOutcome],
        default=ExceptionOutcome.FALSE.value,
        help="truth value of a predicate that raised (default: false)",
    )
    return parser


def main(argv: Optional[List[str]] = None, out: TextIO = None, err: TextIO = None) -> int:
    args = build_parser().parse_args(argv)
    out = out or sys.stdout
    err = err or sys.stderr
    return run(args.path, args, out, err)


if __name__ == "__main__":
    sys.exit(main())

"""Contract monitoring for a small JavaScript-like core calculus.

Blame is computed as the least solution of a constraint set over
Belnap's four-valued logic.
"""

from jscon.b4 import B4, ExceptionOutcome, make_val
from jscon.constraints import Constraint, ConstraintSet, Solution, blame_state, solve
from jscon.interpreter import Interpreter, RunResult, evaluate
from jscon.normalize import normalize
from jscon.parser import ParseError, parse, parse_file
from jscon.syntax import IdSupply, classify, is_canonical, pretty, pretty_contract

__all__ = [
    "B4",
    "Constraint",
    "ConstraintSet",
    "ExceptionOutcome",
    "IdSupply",
    "Interpreter",
    "ParseError",
    "RunResult",
    "Solution",
    "blame_state",
    "classify",
    "evaluate",
    "is_canonical",
    "make_val",
    "normalize",
    "parse",
    "parse_file",
    "pretty",
    "pretty_contract",
    "run_source",
    "solve",
]


def run_source(text: str, **options) -> RunResult:
    """Parse and evaluate a program given as text."""
    return Interpreter(**options).run(parse(text))

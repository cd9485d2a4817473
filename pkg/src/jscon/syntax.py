"""Abstract syntax of expressions and contracts, blame identifiers, and the
canonical contract grammar.

Expressions and contracts are frozen dataclasses, so structural equality
is plain ``==``.  Contract leaves (``Base``, ``Function``, ``Dependent``,
``ObjectMap``, ``Recursive``) carry an optional ``env``: ``None`` means
"the environment of the enclosing contract closure"; a concrete
environment is attached when a contract value defined elsewhere is
embedded by reference.
"""

from __future__ import annotations

import enum
import itertools
import threading
from dataclasses import dataclass, field
from typing import Any, Optional, Tuple, Union

from jscon.values import UNDEFINED, number_to_string, pretty_value

# ---------------------------------------------------------------- expressions


class Expr:
    __slots__ = ()


@dataclass(frozen=True)
class Const(Expr):
    value: Any

    def __eq__(self, other):
        # NaN literals compare equal structurally
        if not isinstance(other, Const):
            return NotImplemented
        a, b = self.value, other.value
        if isinstance(a, float) and isinstance(b, float) and a != a and b != b:
            return True
        return type(a) is type(b) and a == b

    def __hash__(self):
        return hash((type(self.value), repr(self.value)))


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Prim(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Unary(Expr):
    """Unary primitive (``typeof``, ``!``); an extension of the core calculus."""

    op: str
    operand: Expr


@dataclass(frozen=True)
class Lam(Expr):
    param: str
    body: Expr


@dataclass(frozen=True)
class App(Expr):
    fn: Expr
    arg: Expr


@dataclass(frozen=True)
class New(Expr):
    proto: Expr


@dataclass(frozen=True)
class Get(Expr):
    obj: Expr
    name: Expr


@dataclass(frozen=True)
class Put(Expr):
    obj: Expr
    name: Expr
    value: Expr


@dataclass(frozen=True)
class Assert(Expr):
    subject: Expr
    contract: Expr
    label: str


@dataclass(frozen=True)
class ContractLit(Expr):
    contract: "Contract"


@dataclass(frozen=True)
class AbsLit(Expr):
    """Contract abstraction ``Λx.e``; the body must evaluate to a contract."""

    param: str
    body: Expr


@dataclass(frozen=True)
class Construct(Expr):
    ctor: Expr
    arg: Expr


# ---------------------------------------------------------------- contracts


class Contract:
    __slots__ = ()


@dataclass(frozen=True)
class Base(Contract):
    param: str
    body: Expr
    env: Any = None


@dataclass(frozen=True)
class Function(Contract):
    domain: Contract
    range: Contract
    env: Any = None


@dataclass(frozen=True)
class Dependent(Contract):
    ctor: Expr
    env: Any = None


@dataclass(frozen=True)
class ObjectMap(Contract):
    entries: Tuple[Tuple[str, Contract], ...]
    env: Any = None

    def lookup(self, name: str) -> Optional[Contract]:
        for key, contract in self.entries:
            if key == name:
                return contract
        return None

    @property
    def keys(self) -> Tuple[str, ...]:
        return tuple(k for k, _ in self.entries)


@dataclass(frozen=True)
class Recursive(Contract):
    ctor: Expr
    env: Any = None


@dataclass(frozen=True)
class Intersection(Contract):
    left: Contract
    right: Contract


@dataclass(frozen=True)
class Union_(Contract):
    left: Contract
    right: Contract


@dataclass(frozen=True)
class And(Contract):
    left: Contract
    right: Contract


@dataclass(frozen=True)
class Or(Contract):
    left: Contract
    right: Contract


@dataclass(frozen=True)
class Not(Contract):
    operand: Contract


@dataclass(frozen=True)
class Ref(Contract):
    """A contract position filled by an arbitrary expression."""

    expr: Expr


@dataclass(frozen=True)
class With(Contract):
    bindings: Tuple[Tuple[str, Expr], ...]
    body: Contract


LEAVES = (Base, Function, Dependent, ObjectMap, Recursive)
BINARY = (Intersection, Union_, And, Or)


# ---------------------------------------------------------------- blame ids


@dataclass(frozen=True)
class SourceLabel:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class InternalVar:
    index: int

    def __str__(self) -> str:
        return f"ι{self.index}"


BlameId = Union[SourceLabel, InternalVar]


class IdSupply:
    """Thread-safe source of fresh internal blame variables."""

    def __init__(self, start: int = 0):
        self._counter = itertools.count(start)
        self._lock = threading.Lock()

    def fresh(self) -> InternalVar:
        with self._lock:
            return InternalVar(next(self._counter))


_global_supply = IdSupply()


def fresh_internal() -> InternalVar:
    return _global_supply.fresh()


# ---------------------------------------------------------------- grammar


class Kind(enum.Enum):
    IMMEDIATE = "immediate"
    DELAYED = "delayed"
    COMPOSITE = "composite"


def is_immediate(c: Contract) -> bool:
    while isinstance(c, Not):
        c = c.operand
    return isinstance(c, Base)


def is_delayed(c: Contract) -> bool:
    if isinstance(c, (Function, Dependent, ObjectMap, Recursive)):
        return True
    if isinstance(c, (Intersection, Or)):
        return is_delayed(c.left) and is_delayed(c.right)
    if isinstance(c, Not):
        return is_delayed(c.operand)
    return False


def classify(c: Contract) -> Kind:
    if is_immediate(c):
        return Kind.IMMEDIATE
    if is_delayed(c):
        return Kind.DELAYED
    return Kind.COMPOSITE


def is_canonical(c: Contract) -> bool:
    """Membership in the canonical grammar, including nested positions."""
    if isinstance(c, Not):
        return (is_immediate(c.operand) or is_delayed(c.operand)) and is_canonical(c.operand)
    if isinstance(c, Base):
        return True
    if isinstance(c, Function):
        return is_canonical(c.domain) and is_canonical(c.range)
    if isinstance(c, ObjectMap):
        keys = c.keys
        return len(set(keys)) == len(keys) and all(is_canonical(v) for _, v in c.entries)
    if isinstance(c, (Dependent, Recursive)):
        return True
    if isinstance(c, Intersection):
        ok = is_immediate(c.left) or (is_delayed(c.left) and is_delayed(c.right))
        return ok and is_canonical(c.left) and is_canonical(c.right)
    if isinstance(c, Or):
        ok = is_immediate(c.left) or (is_delayed(c.left) and is_delayed(c.right))
        return ok and is_canonical(c.left) and is_canonical(c.right)
    if isinstance(c, (Union_, And)):
        return is_canonical(c.left) and is_canonical(c.right)
    return False


# ---------------------------------------------------------------- printing


_ATOMIC = (Const, Var, ContractLit, AbsLit, Lam, App, Get, Construct, Assert)


def _atom(e: Expr) -> str:
    text = pretty(e)
    if isinstance(e, _ATOMIC) and not (isinstance(e, Const) and _negative(e.value)):
        return text
    return f"({text})"


def _negative(v: Any) -> bool:
    return isinstance(v, float) and not isinstance(v, bool) and (v < 0 or str(v) == "-0.0")


def _string(s: str) -> str:
    return pretty_value(s)


def _const(v: Any) -> str:
    if isinstance(v, str):
        return _string(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "null"
    if v is UNDEFINED:
        return "undefined"
    if v != v:
        return "NaN"
    if v == float("inf"):
        return "Infinity"
    if v == float("-inf"):
        return "-Infinity"
    text = number_to_string(v)
    if float(text) != v:
        text = repr(v)
    return text


def pretty(e: Expr) -> str:
    """Concrete syntax for a core expression; re-parses to an equal AST."""
    if isinstance(e, Const):
        return _const(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Prim):
        return f"{_atom(e.left)} {e.op} {_atom(e.right)}"
    if isinstance(e, Unary):
        return f"{e.op} {_atom(e.operand)}" if e.op == "typeof" else f"{e.op}{_atom(e.operand)}"
    if isinstance(e, Lam):
        return f"fun({e.param}){{ {pretty(e.body)} }}"
    if isinstance(e, App):
        fn = pretty(e.fn) if isinstance(e.fn, (Var, App, Get)) else f"({pretty(e.fn)})"
        return f"{fn}({pretty(e.arg)})"
    if isinstance(e, New):
        return f"new {_atom(e.proto)}"
    if isinstance(e, Get):
        obj = pretty(e.obj) if isinstance(e.obj, (Var, App, Get)) else f"({pretty(e.obj)})"
        return f"{obj}[{pretty(e.name)}]"
    if isinstance(e, Put):
        obj = pretty(e.obj) if isinstance(e.obj, (Var, App, Get)) else f"({pretty(e.obj)})"
        return f"{obj}[{pretty(e.name)}] = {_atom(e.value)}"
    if isinstance(e, Assert):
        return f"assert:{_string(e.label)}({pretty(e.subject)}, {_contract_position(e.contract)})"
    if isinstance(e, ContractLit):
        return pretty_contract(e.contract)
    if isinstance(e, AbsLit):
        return f"Constructor(fun({e.param}){{ {pretty(e.body)} }})"
    if isinstance(e, Construct):
        return f"construct({pretty(e.ctor)}, {pretty(e.arg)})"
    raise TypeError(f"not an expression: {e!r}")


def _contract_position(e: Expr) -> str:
    return pretty(e)


def pretty_contract(c: Contract) -> str:
    if isinstance(c, Base):
        return f"Base(fun({c.param}){{ {pretty(c.body)} }})"
    if isinstance(c, Function):
        return f"Function({pretty_contract(c.domain)}, {pretty_contract(c.range)})"
    if isinstance(c, Dependent):
        return f"Dependent({pretty(c.ctor)})"
    if isinstance(c, Recursive):
        if isinstance(c.ctor, AbsLit):
            return f"Recursive(fun({c.ctor.param}){{ {pretty(c.ctor.body)} }})"
        return f"Recursive({pretty(c.ctor)})"
    if isinstance(c, ObjectMap):
        inner = ", ".join(f"{_string(k)}: {pretty_contract(v)}" for k, v in c.entries)
        return f"Object({{{inner}}})"
    if isinstance(c, Intersection):
        return f"Intersection({pretty_contract(c.left)}, {pretty_contract(c.right)})"
    if isinstance(c, Union_):
        return f"Union({pretty_contract(c.left)}, {pretty_contract(c.right)})"
    if isinstance(c, And):
        return f"And({pretty_contract(c.left)}, {pretty_contract(c.right)})"
    if isinstance(c, Or):
        return f"Or({pretty_contract(c.left)}, {pretty_contract(c.right)})"
    if isinstance(c, Not):
        return f"Not({pretty_contract(c.operand)})"
    if isinstance(c, Ref):
        return pretty(c.expr)
    if isinstance(c, With):
        inner = ", ".join(f"{k}: {pretty(v)}" for k, v in c.bindings)
        return f"With({{{inner}}}, {pretty_contract(c.body)})"
    raise TypeError(f"not a contract: {c!r}")

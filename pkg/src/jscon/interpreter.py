"""Evaluator for the contract calculus.

The :class:`Interpreter` owns one store and one constraint set and
threads them through evaluation.  Exceptional behaviors are Python
exceptions derived from :class:`~jscon.values.Fault`; they propagate
through every composite form, which is exactly what the error
propagation rules prescribe.

Contracts are kept as trees whose leaves may carry their own sandbox
environment (see :mod:`jscon.syntax`).  A leaf without one uses the
environment handed down by the enclosing assertion.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Set, Tuple

from jscon import constraints as cs
from jscon.b4 import ExceptionOutcome, make_val
from jscon.constraints import Constraint, ConstraintSet, Solution
from jscon.normalize import NormalizationError, normalize
from jscon.syntax import (
    AbsLit,
    And,
    App,
    Assert,
    Base,
    BlameId,
    Const,
    Construct,
    Contract,
    ContractLit,
    Dependent,
    Expr,
    Function,
    Get,
    IdSupply,
    Intersection,
    Lam,
    New,
    Not,
    ObjectMap,
    Or,
    Prim,
    Put,
    Recursive,
    Ref,
    SourceLabel,
    Unary,
    Union_,
    Var,
    With,
    fresh_internal,
    is_delayed,
    pretty,
    pretty_contract,
)
from jscon.values import (
    UNDEFINED,
    AbstractionClosure,
    Blamed,
    ContractClosure,
    ContractViolation,
    Env,
    Fault,
    Loc,
    RuntimeTypeError,
    SandboxViolation,
    is_constant,
    property_name,
    to_number,
    to_string,
    truthy,
)

# ---------------------------------------------------------------- store


@dataclass
class Native:
    props: Dict[str, Any] = field(default_factory=dict)
    closure: Optional[Tuple[Env, Lam]] = None
    proto: Any = None


@dataclass(frozen=True)
class SandboxProxy:
    target: Loc
    env: Env


@dataclass(frozen=True)
class ContractProxy:
    target: Loc
    env: Env
    blame: BlameId
    contract: Contract


class Store:
    """Append-only map from locations to objects."""

    def __init__(self):
        self._objects: List[Any] = []
        # allocated by code running in a sandbox; unreachable from outside it
        self.sandbox_owned: Set[int] = set()

    def alloc(self, obj) -> Loc:
        self._objects.append(obj)
        return Loc(len(self._objects) - 1)

    def __getitem__(self, loc: Loc):
        return self._objects[loc.index]

    def __len__(self) -> int:
        return len(self._objects)

    def locations(self):
        return [Loc(i) for i in range(len(self._objects))]

    def snapshot(self) -> List[Any]:
        """Structural copy used to audit predicate evaluation."""
        out = []
        for o in self._objects:
            if isinstance(o, Native):
                out.append(("native", dict(o.props), o.closure, o.proto))
            else:
                out.append(o)
        return out


# ---------------------------------------------------------------- primitives


def type_name(store: Store, v: Any) -> str:
    if isinstance(v, bool):
        return "boolean"
    if isinstance(v, float):
        return "number"
    if isinstance(v, str):
        return "string"
    if v is UNDEFINED:
        return "undefined"
    if v is None:
        return "object"
    if isinstance(v, Loc):
        obj = store[v]
        while not isinstance(obj, Native):
            obj = store[obj.target]
        return "function" if obj.closure is not None else "object"
    return "object"


def _strict_equal(a: Any, b: Any) -> bool:
    if is_constant(a) and is_constant(b):
        if type(a) is not type(b):
            return False
        return a == b  # NaN != NaN falls out of float comparison
    return a is b or (isinstance(a, Loc) and a == b)


def _loose_equal(a: Any, b: Any) -> bool:
    if not (is_constant(a) and is_constant(b)):
        return _strict_equal(a, b)
    nullish = (None, UNDEFINED)
    if a in nullish or b in nullish:
        return a in nullish and b in nullish
    if type(a) is type(b):
        return a == b
    if isinstance(a, str) and isinstance(b, str):
        return a == b
    return to_number(a) == to_number(b)


def delta(op: str, v: Any, u: Any, store: Optional[Store] = None) -> Any:
    """Binary primitive operations on constants."""
    if op == "===":
        return _strict_equal(v, u)
    if op == "!==":
        return not _strict_equal(v, u)
    if op == "==":
        return _loose_equal(v, u)
    if op == "!=":
        return not _loose_equal(v, u)
    if not (is_constant(v) and is_constant(u)):
        raise RuntimeTypeError(f"operator {op} expects constants")
    if op == "&&":
        return u if truthy(v) else v
    if op == "||":
        return v if truthy(v) else u
    if op == "+":
        if isinstance(v, str) or isinstance(u, str):
            return to_string(v) + to_string(u)
        return to_number(v) + to_number(u)
    if op in ("-", "*", "/"):
        a, b = to_number(v), to_number(u)
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if b == 0:
            if a == 0 or math.isnan(a):
                return math.nan
            return math.copysign(math.inf, a) * math.copysign(1.0, b)
        return a / b
    if op in ("<", ">", "<=", ">="):
        if isinstance(v, str) and isinstance(u, str):
            a, b = v, u
        else:
            a, b = to_number(v), to_number(u)
            if math.isnan(a) or math.isnan(b):
                return False
        return {"<": a < b, ">": a > b, "<=": a <= b, ">=": a >= b}[op]
    raise RuntimeTypeError(f"unknown operator {op}")


def unary(op: str, v: Any, store: Store) -> Any:
    if op == "typeof":
        return type_name(store, v)
    if op == "!":
        return not truthy(v)
    raise RuntimeTypeError(f"unknown operator {op}")


# ---------------------------------------------------------------- results


@dataclass
class RunResult:
    status: str  # ok | contract-violation | sandbox-violation | runtime-error
    value: Any = None
    blamed: Tuple[Blamed, ...] = ()
    error: Optional[Fault] = None
    constraints: ConstraintSet = field(default_factory=ConstraintSet)
    solution: Optional[Solution] = None


TraceFn = Callable[[str, str, Optional[Constraint]], None]


# ---------------------------------------------------------------- interpreter


class Interpreter:
    def __init__(
        self,
        *,
        ids: Optional[IdSupply] = None,
        trace: Optional[TraceFn] = None,
        exception_outcome: ExceptionOutcome = ExceptionOutcome.FALSE,
        audit_sandbox: bool = False,
        store: Optional[Store] = None,
        constraints: Optional[ConstraintSet] = None,
    ):
        self.store = store if store is not None else Store()
        self.constraints = constraints if constraints is not None else ConstraintSet()
        self._ids = ids
        self._trace = trace
        self.exception_outcome = exception_outcome
        self.audit_sandbox = audit_sandbox
        self.audit_failures: List[str] = []
        self._solution: Optional[Solution] = None
        self._solved: Optional[ConstraintSet] = None
        self._membrane: Dict[Tuple[Loc, int], Loc] = {}

    # -- plumbing

    def fresh(self):
        return self._ids.fresh() if self._ids is not None else fresh_internal()

    def trace(self, rule: str, term: Callable[[], str], k: Optional[Constraint] = None) -> None:
        if self._trace is not None:
            self._trace(rule, term(), k)

    def add(self, k: Constraint) -> None:
        self.constraints = self.constraints.add(k)

    def solution(self) -> Solution:
        if self._solved is not self.constraints:
            start = self._solution if self._solved is not None and self._solved <= self.constraints else None
            self._solution = cs.solve(self.constraints, start)
            self._solved = self.constraints
        return self._solution

    def alloc(self, obj) -> Loc:
        return self.store.alloc(obj)

    def _alloc_in(self, env: Env, obj) -> Loc:
        loc = self.store.alloc(obj)
        if env.is_sandbox:
            self.store.sandbox_owned.add(loc.index)
        return loc

    # -- top level

    def run(self, e: Expr, env: Optional[Env] = None) -> RunResult:
        limit = sys.getrecursionlimit()
        sys.setrecursionlimit(max(limit, 20000))
        try:
            value = self.eval(env or Env(), e)
        except ContractViolation as exc:
            return RunResult("contract-violation", None, exc.blamed, exc, self.constraints, self.solution())
        except SandboxViolation as exc:
            return RunResult("sandbox-violation", None, (), exc, self.constraints, self.solution())
        except Fault as exc:
            return RunResult("runtime-error", None, (), exc, self.constraints, self.solution())
        except RecursionError:
            exc = Fault("evaluation exceeded the recursion limit")
            return RunResult("runtime-error", None, (), exc, self.constraints, self.solution())
        finally:
            sys.setrecursionlimit(limit)
        return RunResult("ok", value, (), None, self.constraints, self.solution())

    # -- expressions

    def eval(self, env: Env, e: Expr) -> Any:
        if isinstance(e, Const):
            self.trace("Const", lambda: pretty(e))
            return e.value
        if isinstance(e, Var):
            self.trace("Var", lambda: pretty(e))
            return env.lookup(e.name)
        if isinstance(e, Prim):
            v = self.eval(env, e.left)
            u = self.eval(env, e.right)
            self.trace("Op", lambda: pretty(e))
            return delta(e.op, v, u)
        if isinstance(e, Unary):
            v = self.eval(env, e.operand)
            self.trace("Op", lambda: pretty(e))
            return unary(e.op, v, self.store)
        if isinstance(e, Lam):
            self.trace("Abs", lambda: pretty(e))
            return self._alloc_in(env, Native({}, (env, e), None))
        if isinstance(e, App):
            f = self.eval(env, e.fn)
            v = self.eval(env, e.arg)
            return self.apply(f, v)
        if isinstance(e, New):
            proto = self.eval(env, e.proto)
            self.trace("New", lambda: pretty(e))
            return self._alloc_in(env, Native({}, None, proto))
        if isinstance(e, Get):
            o = self.eval(env, e.obj)
            n = self.eval(env, e.name)
            return self.get(o, property_name(n))
        if isinstance(e, Put):
            o = self.eval(env, e.obj)
            n = self.eval(env, e.name)
            v = self.eval(env, e.value)
            return self.put(o, property_name(n), v)
        if isinstance(e, Assert):
            v = self.eval(env, e.subject)
            c = self.eval(env, e.contract)
            self.trace("Assert", lambda: pretty(e))
            return self.assert_value(v, c, SourceLabel(e.label))
        if isinstance(e, ContractLit):
            return self.eval_contract_literal(env, e.contract)
        if isinstance(e, AbsLit):
            sandboxed = env.is_sandbox
            self.trace("Constructor-Sandbox" if sandboxed else "Constructor-Fresh", lambda: pretty(e))
            return AbstractionClosure(env if sandboxed else Env.fresh_sandbox(), e.param, e.body)
        if isinstance(e, Construct):
            a = self.eval(env, e.ctor)
            w = self.eval(env, e.arg)
            return self.construct(a, w)
        raise TypeError(f"not an expression: {e!r}")

    # -- application, read, write

    def apply(self, f: Any, v: Any) -> Any:
        if not isinstance(f, Loc):
            raise RuntimeTypeError(f"{to_string(f) if is_constant(f) else f!r} is not a function")
        obj = self.store[f]
        if isinstance(obj, Native):
            if obj.closure is None:
                raise RuntimeTypeError("object is not a function")
            cenv, lam = obj.closure
            self.trace("App", lambda: f"{f!r}({v!r})")
            return self.eval(cenv.extend(lam.param, v), lam.body)
        if isinstance(obj, SandboxProxy):
            target = self.store[obj.target]
            if target.closure is None:
                raise RuntimeTypeError("object is not a function")
            cenv, lam = target.closure
            self.trace("App-Sandbox", lambda: f"{f!r}({v!r})")
            env = self._sandbox_closure_env(obj.env, cenv)
            return self.eval(env.extend(lam.param, self.wrap(obj.env, v)), lam.body)
        return self._apply_contracted(f, obj, v)

    def _sandbox_closure_env(self, senv: Env, cenv: Env) -> Env:
        # The closure's own free variables stay visible, but only through the membrane.
        wrapped = {k: self.wrap(senv, x) for k, x in cenv.bindings.items()}
        return senv.extend_many(wrapped.items())

    def _apply_contracted(self, f: Loc, p: ContractProxy, v: Any) -> Any:
        q = p.contract
        if isinstance(q, Function):
            env = q.env or p.env
            i1, i2 = self.fresh(), self.fresh()
            k = Constraint(p.blame, "function", (i1, i2))
            self.add(k)
            self.trace("App-FunctionContract", lambda: f"{f!r}({v!r})", k)
            arg = self.assert_contract(v, q.domain, i1, env)
            result = self.apply(p.target, arg)
            return self.assert_contract(result, q.range, i2, env)
        if isinstance(q, Dependent):
            env = q.env or p.env
            self.trace("App-DependentContract", lambda: f"{f!r}({v!r})")
            ctor = self.eval(env, q.ctor)
            # construct before the call so the range contract can capture pre-state
            range_ = self.construct(ctor, v)
            result = self.apply(p.target, v)
            return self.assert_value(result, range_, p.blame)
        if isinstance(q, (Intersection, Or, Not)):
            return self.apply(self._unfold(f, p, "App"), v)
        self.trace("App-NoContract", lambda: f"{f!r}({v!r})")
        return self.apply(p.target, v)

    def _unfold(self, loc: Loc, p: ContractProxy, op: str) -> Loc:
        """Replace a proxy for a delayed combination by proxies for its parts."""
        q = p.contract
        if isinstance(q, Not):
            i = self.fresh()
            k = Constraint(p.blame, "neg", (i,))
            self.add(k)
            self.trace(f"{op}-NotContract", lambda: repr(loc), k)
            return self.assert_contract(p.target, q.operand, i, p.env)
        i1, i2 = self.fresh(), self.fresh()
        form = "intersection" if isinstance(q, Intersection) else "or"
        k = Constraint(p.blame, form, (i1, i2))
        self.add(k)
        rule = "IntersectionContract" if form == "intersection" else "OrContract"
        self.trace(f"{op}-{rule}", lambda: repr(loc), k)
        inner = self.assert_contract(p.target, q.left, i1, p.env)
        return self.assert_contract(inner, q.right, i2, p.env)

    def get(self, o: Any, name: str) -> Any:
        if not isinstance(o, Loc):
            raise RuntimeTypeError(f"cannot read property {name!r} of {to_string(o) if is_constant(o) else o!r}")
        obj = self.store[o]
        if isinstance(obj, Native):
            if name in obj.props:
                self.trace("Get", lambda: f"{o!r}[{name!r}]")
                return obj.props[name]
            if isinstance(obj.proto, Loc):
                self.trace("Get-Prototype", lambda: f"{o!r}[{name!r}]")
                return self.get(obj.proto, name)
            self.trace("Get-Undefined", lambda: f"{o!r}[{name!r}]")
            return UNDEFINED
        if isinstance(obj, SandboxProxy):
            self.trace("Get-Sandbox", lambda: f"{o!r}[{name!r}]")
            return self.wrap(obj.env, self.get(obj.target, name))
        q = obj.contract
        if isinstance(q, ObjectMap):
            sub = q.lookup(name)
            if sub is not None:
                self.trace("Get-Contract", lambda: f"{o!r}[{name!r}]")
                value = self.get(obj.target, name)
                return self.assert_contract(value, sub, obj.blame, q.env or obj.env)
        elif isinstance(q, (Intersection, Or, Not)):
            return self.get(self._unfold(o, obj, "Get"), name)
        self.trace("Get-NoContract", lambda: f"{o!r}[{name!r}]")
        return self.get(obj.target, name)

    def put(self, o: Any, name: str, v: Any) -> Any:
        if not isinstance(o, Loc):
            raise RuntimeTypeError(f"cannot write property {name!r} of {to_string(o) if is_constant(o) else o!r}")
        obj = self.store[o]
        if isinstance(obj, Native):
            self.trace("Put", lambda: f"{o!r}[{name!r}] = {v!r}")
            obj.props[name] = v
            return v
        if isinstance(obj, SandboxProxy):
            self.trace("Put-Sandbox", lambda: f"{o!r}[{name!r}] = {v!r}")
            raise SandboxViolation(f"write to property {name!r} of a sandboxed object")
        q = obj.contract
        if isinstance(q, ObjectMap):
            sub = q.lookup(name)
            if sub is not None:
                i = self.fresh()
                k = Constraint(obj.blame, "set", (i,))
                self.add(k)
                self.trace("Put-Contract", lambda: f"{o!r}[{name!r}] = {v!r}", k)
                checked = self.assert_contract(v, sub, i, q.env or obj.env)
                self.put(obj.target, name, checked)
                return v
        elif isinstance(q, (Intersection, Or, Not)):
            return self.put(self._unfold(o, obj, "Put"), name, v)
        self.trace("Put-NoContract", lambda: f"{o!r}[{name!r}] = {v!r}")
        self.put(obj.target, name, v)
        return v

    # -- contracts

    def eval_contract_literal(self, env: Env, c: Contract) -> ContractClosure:
        sandboxed = env.is_sandbox
        self.trace("Contract-Sandbox" if sandboxed else "Contract-Fresh", lambda: pretty_contract(c))
        cenv = env if sandboxed else Env.fresh_sandbox()
        resolved = self._resolve(env, c, cenv)
        try:
            canonical = normalize(resolved)
        except NormalizationError as exc:
            raise RuntimeTypeError(str(exc)) from None
        return ContractClosure(cenv, canonical)

    def _resolve(self, env: Env, c: Contract, cenv: Env) -> Contract:
        """Evaluate the expression parts of a contract literal."""
        if isinstance(c, Ref):
            value = self.eval(env, c.expr)
            if not isinstance(value, ContractClosure):
                raise RuntimeTypeError("contract expected")
            return _restamp(value.contract, lambda e: e, value.env)
        if isinstance(c, With):
            values = [(name, self.eval(env, expr)) for name, expr in c.bindings]
            scope = Env.fresh_sandbox()
            wrapped = {name: self.wrap(scope, v) for name, v in values}
            body = self._resolve(env, c.body, cenv)
            merged: Dict[int, Env] = {}

            def merge(base: Env) -> Env:
                key = id(base)
                if key not in merged:
                    merged[key] = Env({**wrapped, **base.bindings}, scope.sandbox_id)
                return merged[key]

            return _restamp(body, merge, cenv)
        if isinstance(c, Function):
            return Function(self._resolve(env, c.domain, cenv), self._resolve(env, c.range, cenv), c.env)
        if isinstance(c, ObjectMap):
            return ObjectMap(tuple((k, self._resolve(env, v, cenv)) for k, v in c.entries), c.env)
        if isinstance(c, (Dependent, Recursive)):
            if isinstance(c.ctor, AbsLit):
                return c
            a = self.eval(env, c.ctor)
            if not isinstance(a, AbstractionClosure):
                raise RuntimeTypeError("contract constructor expected")
            return type(c)(AbsLit(a.param, a.body), a.env)
        if isinstance(c, Not):
            return Not(self._resolve(env, c.operand, cenv))
        if isinstance(c, (Intersection, Union_, And, Or)):
            return type(c)(self._resolve(env, c.left, cenv), self._resolve(env, c.right, cenv))
        return c

    def construct(self, a: Any, w: Any) -> ContractClosure:
        if not isinstance(a, AbstractionClosure):
            raise RuntimeTypeError("contract constructor expected")
        self.trace("Construct", lambda: f"construct({a!r}, {w!r})")
        senv = a.env
        arg = self.wrap(senv, w)
        result = self.eval(senv.extend(a.param, arg), a.body)
        if not isinstance(result, ContractClosure):
            raise RuntimeTypeError("contract constructor did not return a contract")
        return result

    def assert_value(self, v: Any, c: Any, blame: BlameId) -> Any:
        """Assert a contract value: a contract closure or a constructor."""
        if isinstance(c, ContractClosure):
            return self.assert_contract(v, c.contract, blame, c.env)
        if isinstance(c, AbstractionClosure):
            # contract abstraction: a function from constructor arguments to the contracted value
            body = Assert(Var("$subject"), Construct(Var("$ctor"), Var("$arg")), str(blame))
            cenv = Env({"$subject": v, "$ctor": c})
            return self.alloc(Native({}, (cenv, Lam("$arg", body)), None))
        raise RuntimeTypeError("contract expected")

    def assert_contract(self, v: Any, c: Contract, blame: BlameId, env: Env) -> Any:
        if isinstance(c, Base):
            return self._assert_base(v, c, blame, c.env or env)
        if is_delayed(c):
            if not isinstance(v, Loc):
                raise RuntimeTypeError("delayed contract asserted to a primitive value")
            if isinstance(c, Recursive):
                return self._assert_recursive(v, c, blame, c.env or env)
            penv = getattr(c, "env", None) or env
            self.trace("Assert-DelayedContract", lambda: f"{v!r} @{blame} {pretty_contract(c)}")
            return self.alloc(ContractProxy(v, penv, blame, c))
        if isinstance(c, Not):
            i = self.fresh()
            k = Constraint(blame, "neg", (i,))
            self.add(k)
            self.trace("Assert-NotContract", lambda: f"{v!r} @{blame} {pretty_contract(c)}", k)
            return self.assert_contract(v, c.operand, i, env)
        forms = {Intersection: "intersection", Union_: "union", And: "and", Or: "or"}
        form = forms.get(type(c))
        if form is None:
            raise RuntimeTypeError(f"cannot assert {type(c).__name__}")
        i1, i2 = self.fresh(), self.fresh()
        k = Constraint(blame, form, (i1, i2))
        self.add(k)
        rule = {"intersection": "Intersection", "union": "Union", "and": "And", "or": "Or"}[form]
        self.trace(f"Assert-{rule}Contract", lambda: f"{v!r} @{blame} {pretty_contract(c)}", k)
        first = self.assert_contract(v, c.left, i1, env)
        return self.assert_contract(first, c.right, i2, env)

    def _assert_base(self, v: Any, c: Base, blame: BlameId, env: Env) -> Any:
        before = self.store.snapshot() if self.audit_sandbox else None
        penv = env.extend(c.param, self.wrap(env, v))
        try:
            outcome = self.eval(penv, c.body)
        except SandboxViolation as exc:
            self._audit(before, c)
            k = Constraint.flat(blame, make_val(exc, self.exception_outcome))
            self.add(k)
            self.trace("Assert-BaseContract", lambda: f"{v!r} @{blame} {pretty_contract(c)}", k)
            raise
        except ContractViolation as exc:
            outcome = exc
        except RecursionError:
            raise
        except Fault as exc:
            outcome = exc
        self._audit(before, c)
        k = Constraint.flat(blame, make_val(outcome, self.exception_outcome))
        self.add(k)
        self.trace("Assert-BaseContract", lambda: f"{v!r} @{blame} {pretty_contract(c)}", k)
        return self.check_blame(v)

    def _audit(self, before, c: Base) -> None:
        if before is None:
            return
        after = self.store.snapshot()
        for i, old in enumerate(before):
            if after[i] != old and i not in self.store.sandbox_owned:
                self.audit_failures.append(f"#{i} changed while checking {pretty_contract(c)}")

    def _assert_recursive(self, v: Loc, c: Recursive, blame: BlameId, env: Env) -> Any:
        self.trace("Assert-RecursiveContract", lambda: f"{v!r} @{blame} {pretty_contract(c)}")
        stamped = Recursive(c.ctor, env)
        ctor = self.eval(env, c.ctor)
        unrolled = self.construct(ctor, ContractClosure(env, stamped))
        if not is_delayed(unrolled.contract):
            raise RuntimeTypeError("recursive contract must unroll to a delayed contract")
        return self.assert_contract(v, unrolled.contract, blame, unrolled.env)

    def check_blame(self, v: Any) -> Any:
        blamed = cs.blamed_in(self.solution())
        if blamed:
            self.trace("Blame", lambda: repr(v))
            raise ContractViolation(blamed)
        self.trace("NoBlame", lambda: repr(v))
        return v

    # -- membrane

    def wrap(self, senv: Env, v: Any) -> Any:
        if is_constant(v):
            self.trace("Wrap-Constant", lambda: repr(v))
            return v
        if isinstance(v, ContractClosure):
            self.trace("Wrap-Contract", lambda: repr(v))
            return v
        if isinstance(v, AbstractionClosure):
            self.trace("Wrap-Constructor", lambda: repr(v))
            return v
        obj = self.store[v]
        if isinstance(obj, SandboxProxy):
            self.trace("Wrap-Proxy", lambda: repr(v))
            return v
        key = (v, senv.sandbox_id)
        cached = self._membrane.get(key)
        if cached is not None:
            self.trace("Wrap-Existing", lambda: repr(v))
            return cached
        if isinstance(obj, Native):
            self.trace("Wrap-NonProxyObject", lambda: repr(v))
            loc = self.alloc(SandboxProxy(v, senv))
        else:
            self.trace("Wrap-ContractProxy", lambda: repr(v))
            inner = self.wrap(senv, obj.target)
            loc = self.alloc(ContractProxy(inner, obj.env, obj.blame, obj.contract))
        self._membrane[key] = loc
        return loc


def _restamp(c: Contract, f: Callable[[Optional[Env]], Env], inherited: Optional[Env]) -> Contract:
    """Give every leaf an explicit environment ``f(effective env)``."""
    if isinstance(c, Base):
        eff = c.env or inherited
        return Base(c.param, c.body, f(eff))
    if isinstance(c, Function):
        eff = c.env or inherited
        return Function(_restamp(c.domain, f, eff), _restamp(c.range, f, eff), f(eff))
    if isinstance(c, ObjectMap):
        eff = c.env or inherited
        return ObjectMap(tuple((k, _restamp(v, f, eff)) for k, v in c.entries), f(eff))
    if isinstance(c, (Dependent, Recursive)):
        return type(c)(c.ctor, f(c.env or inherited))
    if isinstance(c, Not):
        return Not(_restamp(c.operand, f, inherited))
    if isinstance(c, (Intersection, Union_, And, Or)):
        return type(c)(_restamp(c.left, f, inherited), _restamp(c.right, f, inherited))
    if isinstance(c, With):
        raise RuntimeTypeError("unresolved With")
    return c


def evaluate(env: Env, s: ConstraintSet, st: Store, e: Expr, **options) -> Tuple[ConstraintSet, Store, Any]:
    """Functional entry point: returns the new constraint set, the store
    (mutated in place) and the behavior, which is a value or a Fault."""
    interp = Interpreter(store=st, constraints=s, **options)
    try:
        b = interp.eval(env, e)
    except Fault as exc:
        b = exc
    return interp.constraints, interp.store, b

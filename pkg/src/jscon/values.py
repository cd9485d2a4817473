"""Runtime values, environments and the exceptions that stand for ``•``."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional, Union


class _Undefined:
    _instance: Optional["_Undefined"] = None

    def __new__(cls) -> "_Undefined":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "undefined"

    def __reduce__(self):
        return (_Undefined, ())


UNDEFINED = _Undefined()

# Constants: float (all numbers), str, bool, None (null), UNDEFINED.
Constant = Union[float, str, bool, None, _Undefined]


@dataclass(frozen=True)
class Loc:
    """A store location."""

    index: int

    def __repr__(self) -> str:
        return f"#{self.index}"


_sandbox_ids = itertools.count(1)


class Env:
    """Immutable variable environment.

    ``sandbox_id`` is ``None`` for ordinary environments.  Sandbox
    environments carry an identity shared by all their extensions; the
    membrane cache is keyed on it.
    """

    __slots__ = ("bindings", "sandbox_id")

    def __init__(self, bindings: Optional[dict] = None, sandbox_id: Optional[int] = None):
        self.bindings = dict(bindings or {})
        self.sandbox_id = sandbox_id

    @classmethod
    def fresh_sandbox(cls, bindings: Optional[dict] = None) -> "Env":
        return cls(bindings, next(_sandbox_ids))

    @property
    def is_sandbox(self) -> bool:
        return self.sandbox_id is not None

    def extend(self, name: str, value: Any) -> "Env":
        env = Env(self.bindings, self.sandbox_id)
        env.bindings[name] = value
        return env

    def extend_many(self, pairs: Iterable[tuple], sandbox_id: Optional[int] = None) -> "Env":
        env = Env(self.bindings, self.sandbox_id if sandbox_id is None else sandbox_id)
        env.bindings.update(pairs)
        return env

    def lookup(self, name: str) -> Any:
        try:
            return self.bindings[name]
        except KeyError:
            if self.is_sandbox:
                # predicates only see what was explicitly passed in
                raise SandboxViolation(f"sandbox denies access to {name!r}") from None
            raise UnboundVariable(name) from None

    def __repr__(self) -> str:
        tag = f"sandbox#{self.sandbox_id}" if self.is_sandbox else "env"
        return f"<{tag} {sorted(self.bindings)}>"


@dataclass(eq=False)
class ContractClosure:
    """A contract paired with the sandbox environment it was defined in.

    ``contract`` is already in canonical form.
    """

    env: Env
    contract: Any

    def __repr__(self) -> str:
        from jscon.syntax import pretty_contract

        return f"<contract {pretty_contract(self.contract)}>"


@dataclass(eq=False)
class AbstractionClosure:
    env: Env
    param: str
    body: Any

    def __repr__(self) -> str:
        return f"<constructor {self.param}>"


Value = Union[Constant, Loc, ContractClosure, AbstractionClosure]


def is_constant(v: Any) -> bool:
    return v is None or v is UNDEFINED or isinstance(v, (bool, float, str))


# ---------------------------------------------------------------- exceptions


class Fault(Exception):
    """An exceptional behavior ``•``."""

    kind = "runtime-error"


class RuntimeTypeError(Fault):
    kind = "type-error"


class UnboundVariable(Fault):
    kind = "unbound-variable"

    def __init__(self, name: str):
        super().__init__(f"unbound variable {name!r}")
        self.name = name


class SandboxViolation(Fault):
    kind = "sandbox-violation"


@dataclass(frozen=True)
class Blamed:
    label: str
    party: str  # "subject" or "context"


class ContractViolation(Fault):
    kind = "contract-violation"

    def __init__(self, blamed: Iterable[Blamed]):
        self.blamed = tuple(blamed)
        parts = ", ".join(f"{b.party} at {b.label}" for b in self.blamed)
        super().__init__(f"contract violation: blame {parts}")


# ---------------------------------------------------------------- coercions


def number_to_string(n: float) -> str:
    if math.isnan(n):
        return "NaN"
    if math.isinf(n):
        return "Infinity" if n > 0 else "-Infinity"
    if n == int(n) and abs(n) < 1e21:
        return str(int(n))
    return repr(n)


def to_string(v: Constant) -> str:
    if isinstance(v, str):
        return v
    if v is True:
        return "true"
    if v is False:
        return "false"
    if v is None:
        return "null"
    if v is UNDEFINED:
        return "undefined"
    return number_to_string(v)


def to_number(v: Constant) -> float:
    if isinstance(v, bool):
        return 1.0 if v else 0.0
    if isinstance(v, float):
        return v
    if v is None:
        return 0.0
    if v is UNDEFINED:
        return math.nan
    text = v.strip()
    if text == "":
        return 0.0
    try:
        return float(text)
    except ValueError:
        return math.nan


def truthy(v: Any) -> bool:
    """JavaScript truthiness; used by ``!``."""
    if v is None or v is UNDEFINED or v is False:
        return False
    if isinstance(v, float):
        return not (v == 0 or math.isnan(v))
    if isinstance(v, str):
        return v != ""
    return True


def property_name(v: Any) -> str:
    if not is_constant(v):
        raise RuntimeTypeError("property names must be constants")
    return to_string(v)


def pretty_value(v: Any) -> str:
    if isinstance(v, str):
        escaped = v.replace("\\", "\\\\").replace("'", "\\'").replace("\n", "\\n")
        return f"'{escaped}'"
    if is_constant(v):
        return to_string(v)
    return repr(v)

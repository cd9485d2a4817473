"""Blame constraints, their least solution, and blame states."""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

from jscon.b4 import BOT, F, T, TOP, B4, conj, disj, implies, k_join, k_leq, neg
from jscon.syntax import BlameId, InternalVar, SourceLabel
from jscon.values import Blamed

FORMS = ("flat", "function", "set", "intersection", "union", "and", "or", "neg")
_ARITY = {"flat": 0, "function": 2, "set": 1, "intersection": 2, "union": 2, "and": 2, "or": 2, "neg": 1}

SUBJECT, CONTEXT = "subject", "context"
Field = Tuple[BlameId, str]


@dataclass(frozen=True)
class Constraint:
    """``target ◁ form(args)``; flat constraints carry the predicate outcome."""

    target: BlameId
    form: str
    args: Tuple[InternalVar, ...] = ()
    outcome: Optional[B4] = None

    def __post_init__(self):
        if self.form not in _ARITY:
            raise ValueError(f"unknown constraint form {self.form!r}")
        if len(self.args) != _ARITY[self.form]:
            raise ValueError(f"{self.form} takes {_ARITY[self.form]} operands")
        if (self.form == "flat") != (self.outcome is not None):
            raise ValueError("flat constraints (and only they) carry an outcome")

    @classmethod
    def flat(cls, target: BlameId, outcome: B4) -> "Constraint":
        return cls(target, "flat", (), outcome)

    @property
    def ids(self) -> Tuple[BlameId, ...]:
        return (self.target,) + self.args

    def __str__(self) -> str:
        if self.form == "flat":
            rhs = self.outcome.short
        elif self.form == "function":
            rhs = f"{self.args[0]}→{self.args[1]}"
        elif self.form in ("set", "neg"):
            rhs = f"{self.form}({self.args[0]})"
        else:
            sym = {"intersection": "∩", "union": "∪", "and": "∧", "or": "∨"}[self.form]
            rhs = f"{self.args[0]}{sym}{self.args[1]}"
        return f"{self.target}◁{rhs}"

    def to_json(self) -> dict:
        args = [self.outcome.short] if self.form == "flat" else [str(a) for a in self.args]
        return {"target": str(self.target), "form": self.form, "args": args}


class ConstraintSet:
    """Finite, insertion-ordered set of constraints.

    Sets are immutable.  ``add`` shares the underlying log with its input
    when the input is the newest version, so building a set one
    constraint at a time is linear.
    """

    __slots__ = ("_log", "_index", "_size")

    def __init__(self, constraints: Iterable[Constraint] = ()):
        self._log: List[Constraint] = []
        self._index: Dict[Constraint, int] = {}
        self._size = 0
        for k in constraints:
            if k not in self._index:
                self._index[k] = len(self._log)
                self._log.append(k)
        self._size = len(self._log)

    def _contains(self, k: Constraint) -> bool:
        i = self._index.get(k)
        return i is not None and i < self._size

    def add(self, k: Constraint) -> "ConstraintSet":
        if self._contains(k):
            return self
        if self._size == len(self._log):
            new = ConstraintSet.__new__(ConstraintSet)
            new._log, new._index = self._log, self._index
            self._index.setdefault(k, len(self._log))
            self._log.append(k)
            new._size = len(self._log)
            return new
        return ConstraintSet(list(self) + [k])

    def union(self, other: "ConstraintSet") -> "ConstraintSet":
        result = self
        for k in other:
            result = result.add(k)
        return result

    def __contains__(self, k: object) -> bool:
        return isinstance(k, Constraint) and self._contains(k)

    def __iter__(self) -> Iterator[Constraint]:
        return iter(self._log[: self._size])

    def __len__(self) -> int:
        return self._size

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ConstraintSet) and frozenset(self) == frozenset(other)

    def __hash__(self) -> int:
        return hash(frozenset(self))

    def __le__(self, other: "ConstraintSet") -> bool:
        return all(k in other for k in self)

    def ids(self) -> List[BlameId]:
        seen: Dict[BlameId, None] = {}
        for k in self:
            for i in k.ids:
                seen.setdefault(i, None)
        return list(seen)

    def __repr__(self) -> str:
        return "{" + ", ".join(str(k) for k in self) + "}"


EMPTY = ConstraintSet()


def add(s: ConstraintSet, k: Constraint) -> ConstraintSet:
    return s.add(k)


class Solution:
    """Immutable map from (blame id, field) to a B4 value; missing entries are ⊥."""

    def __init__(self, mapping: Mapping[Field, B4], ids: Iterable[BlameId] = (), rounds: int = 0):
        self._mapping = MappingProxyType({k: v for k, v in mapping.items() if v is not BOT})
        self.ids = tuple(dict.fromkeys(list(ids) + [i for i, _ in mapping]))
        self.rounds = rounds

    def __getitem__(self, key: Field) -> B4:
        return self._mapping.get(key, BOT)

    def subject(self, i: BlameId) -> B4:
        return self[(i, SUBJECT)]

    def context(self, i: BlameId) -> B4:
        return self[(i, CONTEXT)]

    def items(self):
        return self._mapping.items()

    def leq(self, other: "Solution") -> bool:
        return all(k_leq(v, other[key]) for key, v in self._mapping.items())

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Solution) and dict(self._mapping) == dict(other._mapping)

    def __repr__(self) -> str:
        inner = ", ".join(f"{f}({i})={v.short}" for (i, f), v in self._mapping.items())
        return f"Solution({inner})"

    def to_json(self) -> dict:
        out = {}
        for i in self.ids:
            out[str(i)] = {"subject": self.subject(i).short, "context": self.context(i).short}
        return out


def bounds(k: Constraint, get) -> Tuple[B4, B4]:
    """Lower bounds (subject, context) that ``k`` imposes on its target.

    ``get(id, field)`` reads the current mapping.
    """
    form = k.form
    if form == "flat":
        return k.outcome, T
    if form == "set":
        return T, get(k.args[0], SUBJECT)
    if form == "neg":
        i = k.args[0]
        return implies(get(i, SUBJECT), neg(get(i, CONTEXT))), T
    a, b = k.args
    s1, c1, s2, c2 = get(a, SUBJECT), get(a, CONTEXT), get(b, SUBJECT), get(b, CONTEXT)
    if form == "function":
        return conj(c1, implies(s1, s2)), conj(s1, c2)
    if form == "intersection":
        return conj(s1, s2), disj(c1, c2)
    if form == "union":
        return disj(s1, s2), conj(c1, c2)
    if form == "and":
        both = conj(c1, c2)
        return implies(both, conj(s1, s2)), both
    if form == "or":
        either = disj(c1, c2)
        return implies(either, disj(conj(c1, s1), conj(c2, s2))), either
    raise ValueError(form)


def solve(s: ConstraintSet, start: Optional[Solution] = None) -> Solution:
    """Least solution by chaotic iteration.

    With ``start`` (a solution of a subset of ``s``) iteration resumes from
    it; by monotonicity the result is the same least fixpoint.
    """
    m: Dict[Field, B4] = {}
    if start is not None:
        m.update(start.items())

    def get(i, f):
        return m.get((i, f), BOT)

    constraints = list(s)
    rounds = 0
    changed = True
    while changed:
        changed = False
        rounds += 1
        for k in constraints:
            sb, cb = bounds(k, get)
            for f, bound in ((SUBJECT, sb), (CONTEXT, cb)):
                key = (k.target, f)
                old = m.get(key, BOT)
                new = k_join(old, bound)
                if new is not old:
                    m[key] = new
                    changed = True
    return Solution(m, s.ids(), rounds)


def satisfies(m: Solution, s: ConstraintSet) -> bool:
    get = lambda i, f: m[(i, f)]  # noqa: E731
    for k in s:
        sb, cb = bounds(k, get)
        if not (k_leq(sb, m.subject(k.target)) and k_leq(cb, m.context(k.target))):
            return False
    return True


def blamed_in(m: Solution) -> List[Blamed]:
    out = []
    for (i, f), v in m.items():
        if isinstance(i, SourceLabel) and v in (F, TOP):
            out.append(Blamed(i.name, f))
    out.sort(key=lambda b: (b.label, b.party != SUBJECT))
    return out


def blame_state(s: ConstraintSet) -> List[Blamed]:
    """Blamed (label, party) pairs of the least solution; empty means ok."""
    return blamed_in(solve(s))


def dump(s: ConstraintSet, m: Optional[Solution] = None) -> dict:
    if m is None:
        m = solve(s)
    return {"constraints": [k.to_json() for k in s], "solution": m.to_json()}

"""Belnap's four-valued lattice.

Each value is read as the set of classical truth values observed so far:
``BOT`` = {}, ``F`` = {false}, ``T`` = {true}, ``TOP`` = {true, false}.
The knowledge order is set inclusion; the connectives act on the two
observations independently.
"""

from __future__ import annotations

import enum
import math
from typing import Any


class B4(enum.Enum):
    BOT = (False, False)
    F = (False, True)
    T = (True, False)
    TOP = (True, True)

    @property
    def has_true(self) -> bool:
        return self.value[0]

    @property
    def has_false(self) -> bool:
        return self.value[1]

    @classmethod
    def of(cls, has_true: bool, has_false: bool) -> "B4":
        return cls((bool(has_true), bool(has_false)))

    @property
    def short(self) -> str:
        return _SHORT[self]

    @classmethod
    def parse(cls, text: str) -> "B4":
        for value, name in _SHORT.items():
            if name == text:
                return value
        raise ValueError(f"not a B4 value: {text!r}")

    def __str__(self) -> str:
        return self.short

    def __repr__(self) -> str:
        return f"B4.{self.name}"


BOT, F, T, TOP = B4.BOT, B4.F, B4.T, B4.TOP
ALL = (BOT, F, T, TOP)

_SHORT = {BOT: "bot", F: "f", T: "t", TOP: "top"}


def neg(a: B4) -> B4:
    return B4.of(a.has_false, a.has_true)


def conj(a: B4, b: B4) -> B4:
    # true only if both saw true; false as soon as either saw false (shortcut)
    return B4.of(a.has_true and b.has_true, a.has_false or b.has_false)


def disj(a: B4, b: B4) -> B4:
    return B4.of(a.has_true or b.has_true, a.has_false and b.has_false)


def implies(a: B4, b: B4) -> B4:
    """Material implication ``neg(a) or b``."""
    return disj(neg(a), b)


def k_join(a: B4, b: B4) -> B4:
    return B4.of(a.has_true or b.has_true, a.has_false or b.has_false)


def k_meet(a: B4, b: B4) -> B4:
    return B4.of(a.has_true and b.has_true, a.has_false and b.has_false)


def k_leq(a: B4, b: B4) -> bool:
    return (not a.has_true or b.has_true) and (not a.has_false or b.has_false)


class ExceptionOutcome(enum.Enum):
    """How a predicate that raised is counted by :func:`make_val`."""

    FALSE = "false"
    TOP = "top"


def make_val(behavior: Any, exception_outcome: ExceptionOutcome = ExceptionOutcome.FALSE) -> B4:
    """Truth value of a predicate outcome.

    ``behavior`` is either a runtime value or a :class:`BaseException`
    instance standing for a raised exception.  Only the constants
    ``false``, ``undefined``, ``null``, ``NaN`` and ``''`` are falsy;
    ``0`` counts as true.
    """
    if isinstance(behavior, BaseException):
        return TOP if exception_outcome is ExceptionOutcome.TOP else F
    # deferred import: values imports nothing from here, but keep b4 standalone
    from jscon.values import UNDEFINED

    if behavior is False or behavior is None or behavior is UNDEFINED:
        return F
    if isinstance(behavior, str) and behavior == "":
        return F
    if isinstance(behavior, float) and math.isnan(behavior):
        return F
    return T

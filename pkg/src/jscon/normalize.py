"""Rewriting of contract expressions into canonical form.

``normalize`` runs two passes: negations are pushed towards the leaves,
then binary nodes are rebuilt bottom-up with the smart constructors
``reorder_intersection`` and ``reorder_or``, which keep immediate parts on
the left and pull unions outwards.
"""

from __future__ import annotations

from jscon.syntax import (
    And,
    Base,
    Contract,
    Dependent,
    Function,
    Intersection,
    Not,
    ObjectMap,
    Or,
    Recursive,
    Union_,
    is_delayed,
    is_immediate,
)


class NormalizationError(ValueError):
    pass


def push_negation(c: Contract) -> Contract:
    """Move every ``Not`` down until it sits on an immediate or delayed node."""
    if isinstance(c, Not):
        inner = c.operand
        if isinstance(inner, Not):
            return push_negation(inner.operand)
        if is_delayed(inner) and not isinstance(inner, Not):
            return Not(push_negation(inner))
        if isinstance(inner, Intersection):
            return Union_(push_negation(Not(inner.left)), push_negation(Not(inner.right)))
        if isinstance(inner, Union_):
            return Intersection(push_negation(Not(inner.left)), push_negation(Not(inner.right)))
        if isinstance(inner, And):
            return Or(push_negation(Not(inner.left)), push_negation(Not(inner.right)))
        if isinstance(inner, Or):
            return And(push_negation(Not(inner.left)), push_negation(Not(inner.right)))
        return Not(push_negation(inner))
    if isinstance(c, (Intersection, Union_, And, Or)):
        return type(c)(push_negation(c.left), push_negation(c.right))
    return c


def _canon(c: Contract) -> Contract:
    if isinstance(c, Base) or isinstance(c, (Dependent, Recursive)):
        return c
    if isinstance(c, Function):
        return Function(normalize(c.domain), normalize(c.range), c.env)
    if isinstance(c, ObjectMap):
        keys = c.keys
        if len(set(keys)) != len(keys):
            raise NormalizationError(f"duplicate property in object contract: {keys}")
        return ObjectMap(tuple((k, normalize(v)) for k, v in c.entries), c.env)
    if isinstance(c, Not):
        return Not(_canon(c.operand))
    if isinstance(c, Intersection):
        return reorder_intersection(_canon(c.left), _canon(c.right))
    if isinstance(c, Or):
        return reorder_or(_canon(c.left), _canon(c.right))
    if isinstance(c, Union_):
        return Union_(_canon(c.left), _canon(c.right))
    if isinstance(c, And):
        return And(_canon(c.left), _canon(c.right))
    raise NormalizationError(f"cannot normalize {type(c).__name__}")


def normalize(c: Contract) -> Contract:
    return _canon(push_negation(c))


def reorder_intersection(x: Contract, y: Contract) -> Contract:
    """Canonical intersection of two canonical contracts."""
    if is_immediate(x):
        return Intersection(x, y)
    if isinstance(x, Union_):
        if is_immediate(y):
            return Union_(Intersection(y, x.left), Intersection(y, x.right))
        return Union_(reorder_intersection(x.left, y), reorder_intersection(x.right, y))
    if is_immediate(y):
        return Intersection(y, x)
    if isinstance(y, Union_):
        return Union_(reorder_intersection(x, y.left), reorder_intersection(x, y.right))
    if is_delayed(x) and is_delayed(y):
        return Intersection(x, y)
    # Fallbacks: the grammar has no production for these shapes.
    if isinstance(x, Intersection) and not is_delayed(x):
        return Intersection(x.left, reorder_intersection(x.right, y))
    if isinstance(y, Intersection) and not is_delayed(y):
        return Intersection(y.left, reorder_intersection(x, y.right))
    if isinstance(x, And):
        return And(x.left, reorder_intersection(x.right, y))
    if isinstance(y, And):
        return And(reorder_intersection(x, y.left), y.right)
    if isinstance(x, Or):
        return reorder_or(reorder_intersection(x.left, y), reorder_intersection(x.right, y))
    if isinstance(y, Or):
        return reorder_or(reorder_intersection(x, y.left), reorder_intersection(x, y.right))
    raise NormalizationError(f"unexpected operands {x!r}, {y!r}")


def reorder_or(x: Contract, y: Contract) -> Contract:
    """Canonical boolean disjunction of two canonical contracts."""
    if is_immediate(x):
        return Or(x, y)
    if isinstance(x, Union_):
        if is_immediate(y):
            return Union_(Or(y, x.left), Or(y, x.right))
        return Union_(reorder_or(x.left, y), reorder_or(x.right, y))
    if is_immediate(y):
        return Or(y, x)
    if isinstance(y, Union_):
        return Union_(reorder_or(x, y.left), reorder_or(x, y.right))
    if is_delayed(x) and is_delayed(y):
        return Or(x, y)
    if isinstance(x, Or) and not is_delayed(x):
        return Or(x.left, reorder_or(x.right, y))
    if isinstance(y, Or) and not is_delayed(y):
        return Or(y.left, reorder_or(x, y.right))
    if isinstance(x, Intersection) and not is_delayed(x):
        return And(Or(x.left, y), reorder_or(x.right, y))
    if isinstance(y, Intersection) and not is_delayed(y):
        return And(Or(y.left, x), reorder_or(x, y.right))
    if isinstance(x, And):
        return And(reorder_or(x.left, y), reorder_or(x.right, y))
    if isinstance(y, And):
        return And(reorder_or(x, y.left), reorder_or(x, y.right))
    raise NormalizationError(f"unexpected operands {x!r}, {y!r}")

import itertools
import json
import random

import pytest

from jscon.b4 import ALL, BOT, F, T, TOP, k_leq
from jscon.constraints import (
    Constraint,
    ConstraintSet,
    Solution,
    blame_state,
    dump,
    satisfies,
    solve,
)
from jscon.syntax import InternalVar, SourceLabel
from jscon.values import Blamed

L = SourceLabel("l")
I1, I2, I3 = InternalVar(1), InternalVar(2), InternalVar(3)
BINARY = ("function", "intersection", "union", "and", "or")

# ---- independent oracle: B4 as (t, f) bit pairs, bounds typed in from the rule table

_BITS = {BOT: (0, 0), T: (1, 0), F: (0, 1), TOP: (1, 1)}


def _and(a, b):
    return (a[0] & b[0], a[1] | b[1])


def _or(a, b):
    return (a[0] | b[0], a[1] & b[1])


def _not(a):
    return (a[1], a[0])


def _imp(a, b):
    return _or(_not(a), b)


def _le(a, b):
    return a[0] <= b[0] and a[1] <= b[1]


def oracle_bounds(k, m):
    t = (1, 0)
    if k.form == "flat":
        return _BITS[k.outcome], t
    if k.form == "set":
        return t, m[(k.args[0], "subject")]
    if k.form == "neg":
        s = m[(k.args[0], "subject")]
        c = m[(k.args[0], "context")]
        return _imp(s, _not(c)), t
    a, b = k.args
    s1, c1 = m[(a, "subject")], m[(a, "context")]
    s2, c2 = m[(b, "subject")], m[(b, "context")]
    return {
        "function": lambda: (_and(c1, _imp(s1, s2)), _and(s1, c2)),
        "intersection": lambda: (_and(s1, s2), _or(c1, c2)),
        "union": lambda: (_or(s1, s2), _and(c1, c2)),
        "and": lambda: (_imp(_and(c1, c2), _and(s1, s2)), _and(c1, c2)),
        "or": lambda: (_imp(_or(c1, c2), _or(_and(c1, s1), _and(c2, s2))), _or(c1, c2)),
    }[k.form]()


def oracle_least(constraints, ids):
    """Pointwise minimum over every satisfying mapping, by full enumeration."""
    fields = [(i, f) for i in ids for f in ("subject", "context")]
    values = list(_BITS.values())
    least = None
    for combo in itertools.product(values, repeat=len(fields)):
        m = dict(zip(fields, combo))
        ok = True
        for k in constraints:
            sb, cb = oracle_bounds(k, m)
            if not (_le(sb, m[(k.target, "subject")]) and _le(cb, m[(k.target, "context")])):
                ok = False
                break
        if ok:
            least = m if least is None else {f: (least[f][0] & m[f][0], least[f][1] & m[f][1]) for f in fields}
    return least


def random_set(rng: random.Random, max_ids=3, max_constraints=6):
    pool = [L, I1, I2, SourceLabel("m"), I3][: rng.randint(1, max_ids)]
    internals = [i for i in pool if isinstance(i, InternalVar)] or [I1]
    ids = list(pool)
    out = []
    for _ in range(rng.randint(0, max_constraints)):
        form = rng.choice(("flat", "flat", "set", "neg") + BINARY)
        target = rng.choice(pool)
        if form == "flat":
            k = Constraint.flat(target, rng.choice(ALL))
        elif form in ("set", "neg"):
            k = Constraint(target, form, (rng.choice(internals),))
        else:
            k = Constraint(target, form, (rng.choice(internals), rng.choice(internals)))
        out.append(k)
        ids.extend(x for x in k.ids if x not in ids)
    return ConstraintSet(out), ids


def to_bits(sol: Solution, ids):
    return {(i, f): _BITS[sol[(i, f)]] for i in ids for f in ("subject", "context")}


def test_oracle_equivalence_500_random_sets():
    rng = random.Random(20240611)
    for _ in range(500):
        s, ids = random_set(rng)
        assert len(ids) <= 3
        expected = oracle_least(list(s), ids)
        got = solve(s)
        assert to_bits(got, ids) == expected, repr(s)
        assert satisfies(got, s)


def test_monotone_under_additions():
    rng = random.Random(7)
    for _ in range(200):
        s, _ = random_set(rng, max_ids=4, max_constraints=8)
        extra, _ = random_set(rng, max_ids=4, max_constraints=1)
        bigger = s
        for k in extra:
            bigger = bigger.add(k)
        small, large = solve(s), solve(bigger)
        assert small.leq(large)
        if blame_state(s):
            assert blame_state(bigger)


def test_round_bound():
    rng = random.Random(11)
    for _ in range(300):
        s, _ = random_set(rng, max_ids=5, max_constraints=12)
        m = solve(s)
        assert m.rounds <= 4 * len(s.ids()) + 1


def test_incremental_matches_full():
    rng = random.Random(3)
    for _ in range(200):
        s, _ = random_set(rng, max_ids=4, max_constraints=8)
        extra, _ = random_set(rng, max_ids=4, max_constraints=3)
        bigger = s.union(extra)
        assert solve(bigger, solve(s)) == solve(bigger)


class TestExamples:
    def test_flat_true(self):
        m = solve(ConstraintSet([Constraint.flat(L, T)]))
        assert (m.subject(L), m.context(L)) == (T, T)

    def test_flat_false(self):
        m = solve(ConstraintSet([Constraint.flat(L, F)]))
        assert (m.subject(L), m.context(L)) == (F, T)

    def test_intersection_of_true_and_false(self):
        s = ConstraintSet(
            [Constraint(L, "intersection", (I1, I2)), Constraint.flat(I1, T), Constraint.flat(I2, F)]
        )
        m = solve(s)
        assert (m.subject(L), m.context(L)) == (F, T)
        expected = oracle_least(list(s), [L, I1, I2])
        assert to_bits(m, [L, I1, I2]) == expected

    def test_function_range_failure_blames_subject(self):
        s = ConstraintSet([Constraint(L, "function", (I1, I2)), Constraint.flat(I1, T), Constraint.flat(I2, F)])
        assert solve(s).subject(L) is F

    def test_function_domain_failure_blames_context(self):
        s = ConstraintSet([Constraint.flat(I1, F), Constraint(L, "function", (I1, I2))])
        m = solve(s)
        assert m.context(L) is F
        assert not k_leq(F, m.subject(L))
        assert blame_state(s) == [Blamed("l", "context")]

    def test_intersection_context_needs_one_side(self):
        # context of ι1 is f, of ι2 is t: the context only has to honour one side
        s = ConstraintSet(
            [
                Constraint(L, "intersection", (I1, I2)),
                Constraint(I1, "function", (I3, InternalVar(4))),
                Constraint.flat(I3, F),
                Constraint.flat(I2, T),
            ]
        )
        m = solve(s)
        assert m.context(I1) is F and m.context(I2) is T
        assert m.context(L) is T

    def test_union_subject_needs_one_side(self):
        s = ConstraintSet([Constraint(L, "union", (I1, I2)), Constraint.flat(I1, F), Constraint.flat(I2, T)])
        assert solve(s).subject(L) is T

    def test_only_internal_is_ok(self):
        assert blame_state(ConstraintSet([Constraint.flat(I1, F)])) == []

    def test_blame_state_subject(self):
        assert blame_state(ConstraintSet([Constraint.flat(L, F)])) == [Blamed("l", "subject")]

    def test_conflict_is_top(self):
        s = ConstraintSet([Constraint.flat(L, T), Constraint.flat(L, F)])
        assert solve(s).subject(L) is TOP


class TestSatisfies:
    def test_empty_set(self):
        assert satisfies(Solution({}), ConstraintSet())

    def test_all_top(self):
        rng = random.Random(5)
        for _ in range(50):
            s, ids = random_set(rng)
            top = Solution({(i, f): TOP for i in ids for f in ("subject", "context")})
            assert satisfies(top, s)

    def test_all_bot_fails_flat(self):
        assert not satisfies(Solution({}), ConstraintSet([Constraint.flat(L, T)]))


class TestConstraintSet:
    def test_dedup_and_order(self):
        k1, k2 = Constraint.flat(L, T), Constraint.flat(I1, F)
        s = ConstraintSet().add(k1).add(k2).add(k1)
        assert list(s) == [k1, k2]
        assert len(s) == 2

    def test_branching_adds_are_independent(self):
        base = ConstraintSet().add(Constraint.flat(L, T))
        a = base.add(Constraint.flat(I1, T))
        b = base.add(Constraint.flat(I2, F))
        assert len(base) == 1
        assert Constraint.flat(I1, T) not in b
        assert Constraint.flat(I2, F) in b and len(a) == len(b) == 2

    def test_subset(self):
        a = ConstraintSet([Constraint.flat(L, T)])
        assert a <= a.add(Constraint.flat(I1, F))

    @pytest.mark.parametrize("form,args", [("flat", (I1,)), ("function", (I1,)), ("neg", ())])
    def test_bad_arity(self, form, args):
        with pytest.raises(ValueError):
            Constraint(L, form, args)

    def test_str(self):
        assert str(Constraint(L, "intersection", (I1, I2))) == "l◁ι1∩ι2"
        assert str(Constraint.flat(I1, F)) == "ι1◁f"


def test_dump_shape():
    s = ConstraintSet([Constraint(L, "intersection", (I1, I2)), Constraint.flat(I1, T), Constraint.flat(I2, T)])
    text = json.dumps(dump(s))
    data = json.loads(text)
    assert list(data) == ["constraints", "solution"]
    assert data["constraints"][0] == {"target": "l", "form": "intersection", "args": ["ι1", "ι2"]}
    assert list(data["constraints"][0]) == ["target", "form", "args"]
    assert data["constraints"][1]["args"] == ["t"]
    assert data["solution"]["l"] == {"subject": "t", "context": "t"}

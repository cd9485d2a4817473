"""Acceptance criteria; each test prints one PASS/FAIL line."""

import io
import itertools
import json
import random

import pytest

from conftest import all_fixtures
from jscon.b4 import ALL, BOT, F, T, conj, disj, implies, k_join, k_leq, neg
from jscon.cli import main
from jscon.constraints import ConstraintSet, blame_state, solve
from jscon.interpreter import Interpreter
from jscon.normalize import normalize
from jscon.parser import parse
from test_constraints import oracle_least, random_set, to_bits
from test_interpreter import erase
from test_normalize import is_can, negation_depth_ok, random_contract

FIXTURES = {f.name: f for f in all_fixtures()}


@pytest.fixture
def report(capsys):
    def emit(number: int, title: str, ok: bool, detail: str = "") -> None:
        with capsys.disabled():
            status = "PASS" if ok else "FAIL"
            print(f"\n[acceptance {number}] {status}: {title}{' (' + detail + ')' if detail else ''}")
        assert ok, detail

    return emit


def outcome(text: str):
    r = Interpreter().run(parse(text))
    return r.status, sorted({b.party for b in r.blamed})


def test_1_transcripts(report):
    mismatches = []
    for fx in FIXTURES.values():
        status, parties = outcome(fx.text)
        expected = [fx.party] if fx.party else []
        if status != fx.status or parties != expected:
            mismatches.append(f"{fx.name}: {status} {parties}")
    ok = len(FIXTURES) >= 12 and not mismatches
    report(1, "transcript fixtures", ok, f"{len(FIXTURES)} fixtures; mismatches: {mismatches or 'none'}")


def test_2_add_one(report, capsys):
    first = outcome(FIXTURES["add_one_first_call"].text)
    out = io.StringIO()
    code = main(["run", str(FIXTURES["add_one"].path), "--json", "--seed-labels", "--dump-constraints"], out, io.StringIO())
    rep, dumped = (json.loads(line) for line in out.getvalue().splitlines())
    root = dumped["solution"]["addOne"]
    ok = (
        first == ("ok", [])
        and code == 1
        and rep["blamed"] == [{"label": "addOne", "party": "subject"}]
        and root["subject"] == "top"
    )
    report(2, "addOne end to end", ok, f"first call {first[0]}, second call {rep['blamed']}, root {root}")


ALTERNATION = """
let typeNumber = Base(fun(arg){ typeof arg === 'number' }),
    typeString = Base(fun(arg){ typeof arg === 'string' }),
    typeBoolean = Base(fun(arg){ typeof arg === 'boolean' });
let state = {calls: 0};
let flip = fun(args){
  state.calls = state.calls + args[0] - args[0] + 1;
  let answers = {'1': true, '2': 'yes', '3': false};
  answers[state.calls]
};
let f = assert:'alternation'(flip,
  Union(AFunction([typeNumber, typeNumber], typeBoolean),
        AFunction([typeNumber, typeNumber], typeString)));
"""


def test_3_union_alternation(report):
    results = []
    for calls in (1, 2, 3):
        r = Interpreter().run(parse(ALTERNATION + "; ".join(["f([1, 2])"] * calls)))
        results.append((r.status, [(b.label, b.party) for b in r.blamed]))
    ok = results[0] == ("ok", []) and results[1] == ("contract-violation", [("alternation", "subject")])
    report(3, "union alternation blamed at second call", ok, f"{results[:2]}")


def test_4_solver_oracle(report):
    rng = random.Random(4)
    agree = 0
    for _ in range(500):
        s, ids = random_set(rng)
        if to_bits(solve(s), ids) == oracle_least(list(s), ids):
            agree += 1
    report(4, "solver equals brute-force least solution", agree == 500, f"{agree}/500")


def test_5_b4_laws(report):
    failures = 0
    pairs = list(itertools.product(ALL, repeat=2))
    triples = list(itertools.product(ALL, repeat=3))
    for a in ALL:
        failures += neg(neg(a)) is not a
        failures += conj(a, a) is not a or disj(a, a) is not a
    for a, b in pairs:
        failures += neg(conj(a, b)) is not disj(neg(a), neg(b))
        failures += conj(a, b) is not conj(b, a) or disj(a, b) is not disj(b, a)
        failures += conj(a, disj(a, b)) is not a or disj(a, conj(a, b)) is not a
    for a, b, c in triples:
        failures += conj(a, conj(b, c)) is not conj(conj(a, b), c)
        failures += disj(a, disj(b, c)) is not disj(disj(a, b), c)
        if k_leq(a, b):
            failures += not k_leq(neg(a), neg(b))
            for op in (conj, disj, implies):
                failures += not k_leq(op(a, c), op(b, c)) or not k_leq(op(c, a), op(c, b))
        j = k_join(a, b)
        failures += not (k_leq(a, j) and k_leq(b, j))
        failures += k_leq(a, c) and k_leq(b, c) and not k_leq(j, c)
    failures += conj(F, BOT) is not F or disj(T, BOT) is not T
    report(5, "B4 laws by enumeration", failures == 0, f"{failures} failures over 4/16/64 tuples")


def test_6_normalizer(report):
    rng = random.Random(6)
    bad = 0
    for _ in range(1000):
        n = normalize(random_contract(rng, rng.randint(0, 6)))
        bad += not (is_can(n) and negation_depth_ok(n) and normalize(n) == n)
    report(6, "normalizer conformance and idempotence", bad == 0, f"{1000 - bad}/1000")


def test_7_monotonicity(report):
    rng = random.Random(7)
    bad = 0
    for _ in range(200):
        s, _ = random_set(rng, max_ids=4, max_constraints=8)
        k, _ = random_set(rng, max_ids=4, max_constraints=1)
        if not solve(s).leq(solve(s.union(k))):
            bad += 1
    flips = []
    for fx in FIXTURES.values():
        log = list(Interpreter().run(parse(fx.text)).constraints)
        seen_violation = False
        for n in range(len(log) + 1):
            violated = bool(blame_state(ConstraintSet(log[:n])))
            if seen_violation and not violated:
                flips.append(fx.name)
                break
            seen_violation = seen_violation or violated
    report(7, "monotonicity", bad == 0 and not flips, f"{200 - bad}/200 pairs; flips: {flips or 'none'}")


def test_8_noninterference(report):
    problems = []
    for fx in FIXTURES.values():
        interp = Interpreter(audit_sandbox=True)
        r = interp.run(parse(fx.text))
        if interp.audit_failures:
            problems.append(f"{fx.name}: store changed")
        # asserting a constructor changes the calling convention; erasure does not apply
        if r.status == "ok" and fx.name != "contract_abstraction_contracts":
            erased = Interpreter().run(erase(parse(fx.text)))
            if erased.status != "ok" or erased.value != r.value:
                problems.append(f"{fx.name}: erased result differs")
    sandbox = [f for f in FIXTURES.values() if f.status == "sandbox-violation"]
    for fx in sandbox:
        if Interpreter().run(parse(fx.text)).status != "sandbox-violation":
            problems.append(f"{fx.name}: no sandbox violation")
    ok = not problems and len(sandbox) >= 3 and "sandbox_faulty_length_two" in FIXTURES
    report(8, "noninterference", ok, f"{len(sandbox)} sandbox fixtures; problems: {problems or 'none'}")


def test_9_object_contracts(report):
    read = outcome(FIXTURES["object_read_subject"].text)
    write = outcome(FIXTURES["object_write_context"].text)
    free = outcome(FIXTURES["object_unlisted"].text)
    ok = read == ("contract-violation", ["subject"]) and write == ("contract-violation", ["context"]) and free[0] == "ok"
    report(9, "object contracts", ok, f"read {read}, write {write}, unlisted {free[0]}")

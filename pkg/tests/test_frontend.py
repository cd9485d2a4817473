import pytest

from conftest import all_fixtures
from jscon.parser import ParseError, desugar_afunction, desugar_with, parse, tokenize
from jscon.syntax import (
    App,
    Assert,
    Base,
    Const,
    ContractLit,
    Function,
    Get,
    Lam,
    ObjectMap,
    Prim,
    Put,
    Recursive,
    Unary,
    Var,
    With,
    pretty,
)
from jscon.values import UNDEFINED

NUM = Base("x", Prim("===", Unary("typeof", Var("x")), Const("number")))


class TestParse:
    def test_assert_base(self):
        e = parse("assert(1, Base(fun(x){ typeof x === 'number' }))")
        assert e == Assert(Const(1.0), ContractLit(NUM), "assert@1:1")

    def test_add_one(self):
        assert parse("fun(x){ x + '1' }") == Lam("x", Prim("+", Var("x"), Const("1")))

    def test_let(self):
        assert parse("let y = 1; y") == App(Lam("y", Var("y")), Const(1.0))

    def test_explicit_label(self):
        assert parse("assert:'mine'(1, x)").label == "mine"

    def test_dot_and_index(self):
        assert parse("o.k") == Get(Var("o"), Const("k"))
        assert parse("o['k'] = 2") == Put(Var("o"), Const("k"), Const(2.0))

    def test_empty_call(self):
        assert parse("f()") == App(Var("f"), Const(UNDEFINED))

    def test_labels_are_per_occurrence(self):
        text = "let a = assert(1, C); assert(2, C)"
        e = parse(text)
        labels = []

        def walk(n):
            if isinstance(n, Assert):
                labels.append(n.label)
            for v in getattr(n, "__dict__", {}).values():
                if hasattr(v, "__dataclass_fields__"):
                    walk(v)

        walk(e)
        assert len(labels) == len(set(labels)) == 2

    def test_core_forms_parse_to_themselves(self):
        e = parse("(fun(x){ x })(1)")
        assert parse(pretty(e)) == e

    def test_recursive_literal(self):
        e = parse("Recursive(fun(self){ Object({next: self}) })")
        assert isinstance(e, ContractLit) and isinstance(e.contract, Recursive)

    @pytest.mark.parametrize("escape,char", [("\\'", "'"), ("\\\\", "\\"), ("\\n", "\n")])
    def test_string_escapes(self, escape, char):
        assert parse(f"'a{escape}b'") == Const(f"a{char}b")


class TestDesugar:
    def test_afunction(self):
        got = desugar_afunction([NUM], NUM)
        assert got == Function(ObjectMap((("0", NUM),)), NUM)

    def test_afunction_empty(self):
        assert desugar_afunction([], NUM) == Function(ObjectMap(()), NUM)

    def test_afunction_syntax(self):
        e = parse("AFunction([Num, Num], Bool)")
        assert isinstance(e.contract, Function)
        assert e.contract.domain.keys == ("0", "1")

    def test_with_empty_is_identity(self):
        assert desugar_with([], NUM) == NUM

    def test_with_duplicate(self):
        with pytest.raises(ValueError):
            desugar_with([("a", Const(1.0)), ("a", Const(2.0))], NUM)

    def test_with_duplicate_is_parse_error(self):
        with pytest.raises(ParseError):
            parse("With({a: 1, a: 2}, C)")

    def test_with_node(self):
        e = parse("With({type: 'number'}, C)")
        assert isinstance(e.contract, With)
        assert e.contract.bindings == (("type", Const("number")),)


class TestErrors:
    @pytest.mark.parametrize(
        "text,line,col",
        [
            ("let x = ;", 1, 9),
            ("'abc", 1, 1),
            ("f(1,2)", 1, 4),
            ("1 +\n  )", 2, 3),
            ("fun(x) x", 1, 8),
            ("@", 1, 1),
        ],
    )
    def test_positions(self, text, line, col):
        with pytest.raises(ParseError) as info:
            parse(text, "prog.ljc")
        assert (info.value.line, info.value.col) == (line, col)
        assert str(info.value).startswith(f"prog.ljc:{line}:{col}:")

    def test_tokenize_skips_comments(self):
        kinds = [t.text for t in tokenize("// note\n1 /* x */ + 2")]
        assert "1" in kinds and "+" in kinds and "2" in kinds


@pytest.mark.parametrize("fx", all_fixtures(), ids=lambda f: f.name)
def test_round_trip_on_fixtures(fx):
    e = parse(fx.text)
    assert parse(pretty(e)) == e

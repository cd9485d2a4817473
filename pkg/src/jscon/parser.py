"""Concrete syntax for ``.ljc`` programs.

A program is a single expression.  Besides the core forms the parser
accepts some sugar, all of which is expanded on the spot:

* ``let x = e, y = f; body`` and ``e1; e2`` become applications of lambdas;
* ``o.name`` is ``o['name']``; ``f()`` is ``f(undefined)``;
* object literals ``{k: e}`` and array literals ``[a, b]`` become a fresh
  object filled by property writes (arrays also get ``length``);
* ``AFunction([C0, C1], D)`` is ``Function(Object({'0': C0, '1': C1}), D)``.

Functions take exactly one argument.  Several arguments are passed as
an explicit array, e.g. ``cmp([1, 2])`` against ``AFunction([Num, Num], Bool)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from jscon.syntax import (
    AbsLit,
    And,
    App,
    Assert,
    Base,
    Const,
    Construct,
    Contract,
    ContractLit,
    Dependent,
    Expr,
    Function,
    Get,
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
    Unary,
    Union_,
    Var,
    With,
)
from jscon.values import UNDEFINED, number_to_string


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int, filename: str = "<input>"):
        super().__init__(f"{filename}:{line}:{col}: {message}")
        self.line, self.col, self.filename = line, col, filename


@dataclass(frozen=True)
class Token:
    kind: str  # num, str, ident, op, eof
    text: str
    value: object
    line: int
    col: int


_PUNCT = sorted(
    "=== !== == != <= >= && || ( ) { } [ ] , ; : . = < > + - * / !".split(),
    key=len,
    reverse=True,
)
_NUMBER = re.compile(r"(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")
_IDENT = re.compile(r"[A-Za-z_$][A-Za-z0-9_$]*")
_ESCAPES = {"'": "'", '"': '"', "\\": "\\", "n": "\n"}

KEYWORDS = {
    "let", "fun", "return", "new", "typeof", "true", "false", "undefined", "null",
    "NaN", "Infinity", "assert", "construct", "Base", "Function", "AFunction",
    "Dependent", "Object", "Intersection", "Union", "And", "Or", "Not",
    "Constructor", "With", "Recursive",
}


def tokenize(text: str, filename: str = "<input>") -> List[Token]:
    tokens: List[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)

    def advance(k: int) -> None:
        nonlocal i, line, col
        for ch in text[i : i + k]:
            if ch == "\n":
                line, col = line + 1, 1
            else:
                col += 1
        i += k

    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            advance(1)
            continue
        if text.startswith("//", i):
            end = text.find("\n", i)
            advance((n if end < 0 else end) - i)
            continue
        if text.startswith("/*", i):
            end = text.find("*/", i + 2)
            if end < 0:
                raise ParseError("unterminated comment", line, col, filename)
            advance(end + 2 - i)
            continue
        start_line, start_col = line, col
        if ch in "'\"":
            j, chars = i + 1, []
            while True:
                if j >= n or text[j] == "\n":
                    raise ParseError("unterminated string", start_line, start_col, filename)
                c = text[j]
                if c == ch:
                    break
                if c == "\\":
                    esc = text[j + 1] if j + 1 < n else ""
                    if esc not in _ESCAPES:
                        raise ParseError(f"unknown escape \\{esc}", start_line, start_col, filename)
                    chars.append(_ESCAPES[esc])
                    j += 2
                    continue
                chars.append(c)
                j += 1
            tokens.append(Token("str", text[i : j + 1], "".join(chars), start_line, start_col))
            advance(j + 1 - i)
            continue
        m = _NUMBER.match(text, i)
        if m and (ch.isdigit() or ch == "."):
            if ch == "." and not m.group(0)[1:2].isdigit():
                m = None
        if m and (ch.isdigit() or ch == "."):
            tokens.append(Token("num", m.group(0), float(m.group(0)), start_line, start_col))
            advance(len(m.group(0)))
            continue
        m = _IDENT.match(text, i)
        if m:
            word = m.group(0)
            tokens.append(Token("ident", word, word, start_line, start_col))
            advance(len(word))
            continue
        for p in _PUNCT:
            if text.startswith(p, i):
                tokens.append(Token("op", p, p, start_line, start_col))
                advance(len(p))
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", start_line, start_col, filename)
    tokens.append(Token("eof", "", None, line, col))
    return tokens


_BINARY_LEVELS: Sequence[Tuple[str, ...]] = (
    ("||",),
    ("&&",),
    ("===", "!==", "==", "!="),
    ("<", ">", "<=", ">="),
    ("+", "-"),
    ("*", "/"),
)

_CONSTANTS = {
    "true": True,
    "false": False,
    "undefined": UNDEFINED,
    "null": None,
    "NaN": float("nan"),
    "Infinity": float("inf"),
}


class Parser:
    def __init__(self, text: str, filename: str = "<input>"):
        self.filename = filename
        self.tokens = tokenize(text, filename)
        self.pos = 0
        self._temps = 0

    # -- token helpers

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def error(self, message: str, tok: Optional[Token] = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.col, self.filename)

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("op", "ident") and t.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        t = self.tok
        self.pos += 1
        return t

    def ident(self) -> str:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            raise self.error(f"expected identifier, found {t.text or 'end of input'!r}")
        self.pos += 1
        return t.text

    def temp(self, prefix: str) -> str:
        name = f"${prefix}{self._temps}"
        self._temps += 1
        return name

    # -- entry

    def parse_program(self) -> Expr:
        e = self.expr()
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r}")
        return e

    # -- expressions

    def expr(self) -> Expr:
        if self.accept("let"):
            bindings = [self.binding()]
            while self.accept(","):
                bindings.append(self.binding())
            self.expect(";")
            body = self.expr()
            for name, value in reversed(bindings):
                body = App(Lam(name, body), value)
            return body
        first = self.assign()
        if self.accept(";"):
            if self.tok.kind == "eof" or self.at("}"):
                return first
            rest = self.expr()
            return App(Lam(self.temp("s"), rest), first)
        return first

    def binding(self) -> Tuple[str, Expr]:
        name = self.ident()
        self.expect("=")
        return name, self.assign()

    def assign(self) -> Expr:
        if self.accept("return"):
            return self.assign()
        start = self.tok
        left = self.binary(0)
        if self.accept("="):
            if not isinstance(left, Get):
                raise self.error("left side of assignment must be a property access", start)
            return Put(left.obj, left.name, self.assign())
        return left

    def binary(self, level: int) -> Expr:
        if level == len(_BINARY_LEVELS):
            return self.unary()
        left = self.binary(level + 1)
        while self.tok.kind == "op" and self.tok.text in _BINARY_LEVELS[level]:
            op = self.tok.text
            self.pos += 1
            left = Prim(op, left, self.binary(level + 1))
        return left

    def unary(self) -> Expr:
        if self.accept("typeof"):
            return Unary("typeof", self.unary())
        if self.accept("!"):
            return Unary("!", self.unary())
        if self.accept("new"):
            return New(self.unary())
        if self.accept("-"):
            if self.tok.kind == "num":
                value = -self.tok.value
                self.pos += 1
                return self.postfix(Const(value))
            if self.at("Infinity"):
                self.pos += 1
                return self.postfix(Const(float("-inf")))
            return Prim("-", Const(0.0), self.unary())
        return self.postfix(self.primary())

    def postfix(self, e: Expr) -> Expr:
        while True:
            if self.accept("("):
                if self.accept(")"):
                    e = App(e, Const(UNDEFINED))
                    continue
                arg = self.assign()
                if self.at(","):
                    raise self.error("functions take one argument; pass an array for several")
                self.expect(")")
                e = App(e, arg)
            elif self.accept("["):
                name = self.expr()
                self.expect("]")
                e = Get(e, name)
            elif self.accept("."):
                t = self.tok
                if t.kind != "ident":
                    raise self.error("expected property name after '.'")
                self.pos += 1
                e = Get(e, Const(t.text))
            else:
                return e

    def primary(self) -> Expr:
        t = self.tok
        if t.kind == "num":
            self.pos += 1
            return Const(t.value)
        if t.kind == "str":
            self.pos += 1
            return Const(t.value)
        if t.kind == "eof":
            raise self.error("unexpected end of input")
        if t.kind == "ident":
            if t.text in _CONSTANTS:
                self.pos += 1
                return Const(_CONSTANTS[t.text])
            handler = self._keyword_forms.get(t.text)
            if handler is not None:
                self.pos += 1
                return handler(self, t)
            return Var(self.ident())
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if self.at("{"):
            return self.object_literal()
        if self.at("["):
            return self.array_literal()
        raise self.error(f"unexpected {t.text!r}")

    def function_literal(self) -> Tuple[str, Expr]:
        self.expect("fun")
        self.expect("(")
        param = "$_" if self.at(")") else self.ident()
        self.expect(")")
        self.expect("{")
        body = Const(UNDEFINED) if self.at("}") else self.expr()
        self.expect("}")
        return param, body

    def _fun(self, t: Token) -> Expr:
        self.pos -= 1
        return Lam(*self.function_literal())

    def _build_object(self, entries: List[Tuple[str, Expr]]) -> Expr:
        obj = self.temp("o")
        body: Expr = Var(obj)
        for key, value in reversed(entries):
            body = App(Lam(self.temp("s"), body), Put(Var(obj), Const(key), value))
        return App(Lam(obj, body), New(Const(None)))

    def property_key(self) -> str:
        t = self.tok
        if t.kind == "ident":
            self.pos += 1
            return t.text
        if t.kind == "str":
            self.pos += 1
            return t.value
        if t.kind == "num":
            self.pos += 1
            return number_to_string(t.value)
        raise self.error("expected property name")

    def _keyed(self, item: Callable[[], object]) -> List[Tuple[str, object]]:
        self.expect("{")
        entries: List[Tuple[str, object]] = []
        seen = set()
        while not self.at("}"):
            key_tok = self.tok
            key = self.property_key()
            if key in seen:
                raise self.error(f"duplicate key {key!r}", key_tok)
            seen.add(key)
            self.expect(":")
            entries.append((key, item()))
            if not self.accept(","):
                break
        self.expect("}")
        return entries

    def _listed(self, item: Callable[[], object]) -> List[object]:
        self.expect("[")
        items: List[object] = []
        while not self.at("]"):
            items.append(item())
            if not self.accept(","):
                break
        self.expect("]")
        return items

    def object_literal(self) -> Expr:
        return self._build_object(self._keyed(self.assign))

    def array_literal(self) -> Expr:
        items = self._listed(self.assign)
        entries = [(str(i), e) for i, e in enumerate(items)]
        entries.append(("length", Const(float(len(items)))))
        return self._build_object(entries)

    # -- contracts

    def contract(self) -> Contract:
        e = self.assign()
        return e.contract if isinstance(e, ContractLit) else Ref(e)

    def _args(self, n: int) -> List[Contract]:
        self.expect("(")
        out = [self.contract()]
        for _ in range(n - 1):
            self.expect(",")
            out.append(self.contract())
        self.expect(")")
        return out

    def _assert(self, t: Token) -> Expr:
        label = f"assert@{t.line}:{t.col}"
        if self.accept(":"):
            if self.tok.kind != "str":
                raise self.error("expected a string label")
            label = self.tok.value
            self.pos += 1
        self.expect("(")
        subject = self.assign()
        self.expect(",")
        c = self.assign()
        self.expect(")")
        return Assert(subject, c, label)

    def _construct(self, t: Token) -> Expr:
        self.expect("(")
        ctor = self.assign()
        self.expect(",")
        arg = self.assign()
        self.expect(")")
        return Construct(ctor, arg)

    def _ctor_argument(self) -> Expr:
        if self.at("fun"):
            return AbsLit(*self.function_literal())
        return self.assign()

    def _constructor(self, t: Token) -> Expr:
        self.expect("(")
        param, body = self.function_literal()
        self.expect(")")
        return AbsLit(param, body)

    def _base(self, t: Token) -> Expr:
        self.expect("(")
        param, body = self.function_literal()
        self.expect(")")
        return ContractLit(Base(param, body))

    def _function(self, t: Token) -> Expr:
        return ContractLit(Function(*self._args(2)))

    def _afunction(self, t: Token) -> Expr:
        self.expect("(")
        domains = self._listed(self.contract)
        self.expect(",")
        range_ = self.contract()
        self.expect(")")
        return ContractLit(desugar_afunction(domains, range_))

    def _dependent(self, t: Token) -> Expr:
        self.expect("(")
        ctor = self._ctor_argument()
        self.expect(")")
        return ContractLit(Dependent(ctor))

    def _recursive(self, t: Token) -> Expr:
        self.expect("(")
        ctor = self._ctor_argument()
        self.expect(")")
        return ContractLit(desugar_recursive(ctor))

    def _object(self, t: Token) -> Expr:
        self.expect("(")
        if self.at("["):
            items = self._listed(self.contract)
            entries = tuple((str(i), c) for i, c in enumerate(items))
        else:
            entries = tuple(self._keyed(self.contract))
        self.expect(")")
        return ContractLit(ObjectMap(entries))

    def _binary(self, node) -> Callable[["Parser", Token], Expr]:
        def parse(self: "Parser", t: Token) -> Expr:
            return ContractLit(node(*self._args(2)))

        return parse

    def _not(self, t: Token) -> Expr:
        return ContractLit(Not(*self._args(1)))

    def _with(self, t: Token) -> Expr:
        self.expect("(")
        bindings = self._keyed(self.assign)
        self.expect(",")
        body = self.contract()
        self.expect(")")
        return ContractLit(desugar_with(bindings, body))

    _keyword_forms: Dict[str, Callable] = {}


Parser._keyword_forms = {
    "fun": Parser._fun,
    "assert": Parser._assert,
    "construct": Parser._construct,
    "Constructor": Parser._constructor,
    "Base": Parser._base,
    "Function": Parser._function,
    "AFunction": Parser._afunction,
    "Dependent": Parser._dependent,
    "Recursive": Parser._recursive,
    "Object": Parser._object,
    "Intersection": Parser._binary(None, Intersection),
    "Union": Parser._binary(None, Union_),
    "And": Parser._binary(None, And),
    "Or": Parser._binary(None, Or),
    "Not": Parser._not,
    "With": Parser._with,
}


# ---------------------------------------------------------------- sugar


def desugar_afunction(domains: Sequence[Contract], range_: Contract) -> Contract:
    return Function(ObjectMap(tuple((str(i), c) for i, c in enumerate(domains))), range_)


def desugar_recursive(ctor: Expr) -> Contract:
    return Recursive(ctor)


def desugar_with(bindings: Sequence[Tuple[str, Expr]], body: Contract) -> Contract:
    names = [k for k, _ in bindings]
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate With binding in {names}")
    if not bindings:
        return body
    return With(tuple(bindings), body)


def parse(text: str, filename: str = "<input>") -> Expr:
    return Parser(text, filename).parse_program()


def parse_file(path: str) -> Expr:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), str(path))

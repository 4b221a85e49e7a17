"""Tokenizer, recursive-descent parser and pretty-printer for the input language.

    program   := statement*
    statement := ("dx" | "dy" | "V") "=" expr ";"
               | "param" NAME "=" rational ";"
               | "weights" "=" "(" INT "," INT ")" ";"
               | "sweep" NAME "from" rational "to" rational "steps" INT ";"
    expr      := term (("+" | "-") term)*
    term      := unary (("*" | "/") unary)*
    unary     := "-" unary | "+" unary | power
    power     := atom ("^" ["-"] INT)?
    atom      := INT | NAME | NAME "(" expr ")" | "(" expr ")"
    rational  := ["-"] INT ["/" INT]

Comments run from '#' to the end of the line.  Literals are exact: there are no floats.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int, offset: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message, self.line, self.col, self.offset = message, line, col, offset


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: Expr


@dataclass(frozen=True)
class BinOp:
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow:
    base: Expr
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: Expr


Expr = Union[Num, Var, Neg, BinOp, Pow, Call]


@dataclass(frozen=True)
class Assign:
    target: str
    expr: Expr


@dataclass(frozen=True)
class Param:
    name: str
    value: Fraction


@dataclass(frozen=True)
class Weights:
    p: int
    q: int


@dataclass(frozen=True)
class Sweep:
    name: str
    start: Fraction
    stop: Fraction
    steps: int


Statement = Union[Assign, Param, Weights, Sweep]


@dataclass(frozen=True)
class Program:
    statements: tuple[Statement, ...]


KEYWORDS = {"param", "weights", "sweep", "from", "to", "steps"}
FUNCTIONS = {"cos", "sin"}
TARGETS = {"dx", "dy", "V"}

# ---------------------------------------------------------------------------
# tokens
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Token:
    kind: str  # INT, NAME, OP, EOF
    text: str
    offset: int
    line: int
    col: int


_TOKEN = re.compile(r"(?P<ws>[ \t\r\n]+|#[^\n]*)|(?P<INT>\d+)|(?P<NAME>[A-Za-z_][A-Za-z_0-9]*)|(?P<OP>[-+*/^()=;,])")


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1, pos)
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token(kind, m.group(), pos, line, pos - line_start + 1))
        for i, ch in enumerate(m.group()):
            if ch == "\n":
                line, line_start = line + 1, pos + i + 1
        pos = m.end()
    out.append(Token("EOF", "", pos, line, pos - line_start + 1))
    return out


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        t = tok or self.tok
        found = "end of input" if t.kind == "EOF" else repr(t.text)
        return ParseError(f"{message}, found {found}", t.line, t.col, t.offset)

    def accept(self, text: str) -> bool:
        if self.tok.text == text and self.tok.kind in ("OP", "NAME"):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        t = self.tok
        if not self.accept(text):
            raise self.error(f"expected {text!r}")
        return t

    def expect_kind(self, kind: str, what: str) -> Token:
        t = self.tok
        if t.kind != kind:
            raise self.error(f"expected {what}")
        self.i += 1
        return t

    def program(self) -> Program:
        stmts = []
        while self.tok.kind != "EOF":
            stmts.append(self.statement())
        return Program(tuple(stmts))

    def statement(self) -> Statement:
        t = self.tok
        if t.kind != "NAME":
            raise self.error("expected a statement")
        if t.text in TARGETS:
            self.i += 1
            self.expect("=")
            e = self.expr()
            self.expect(";")
            return Assign(t.text, e)
        if t.text == "param":
            self.i += 1
            name = self.name()
            self.expect("=")
            v = self.rational()
            self.expect(";")
            return Param(name, v)
        if t.text == "weights":
            self.i += 1
            self.expect("=")
            self.expect("(")
            p = int(self.expect_kind("INT", "an integer").text)
            self.expect(",")
            q = int(self.expect_kind("INT", "an integer").text)
            self.expect(")")
            self.expect(";")
            return Weights(p, q)
        if t.text == "sweep":
            self.i += 1
            name = self.name()
            self.expect("from")
            a = self.rational()
            self.expect("to")
            b = self.rational()
            self.expect("steps")
            n = int(self.expect_kind("INT", "an integer").text)
            self.expect(";")
            return Sweep(name, a, b, n)
        raise self.error("expected 'dx', 'dy', 'V', 'param', 'weights' or 'sweep'")

    def name(self) -> str:
        t = self.tok
        if t.kind != "NAME" or t.text in KEYWORDS or t.text in FUNCTIONS:
            raise self.error("expected a name")
        self.i += 1
        return t.text

    def rational(self) -> Fraction:
        neg = self.accept("-")
        num = int(self.expect_kind("INT", "an integer").text)
        den = 1
        if self.accept("/"):
            t = self.tok
            den = int(self.expect_kind("INT", "an integer").text)
            if den == 0:
                raise self.error("zero denominator", t)
        v = Fraction(num, den)
        return -v if neg else v

    def expr(self) -> Expr:
        e = self.term()
        while self.tok.text in ("+", "-") and self.tok.kind == "OP":
            op = self.tok.text
            self.i += 1
            e = BinOp(op, e, self.term())
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.tok.text in ("*", "/") and self.tok.kind == "OP":
            op = self.tok.text
            self.i += 1
            e = BinOp(op, e, self.unary())
        return e

    def unary(self) -> Expr:
        if self.accept("-"):
            return Neg(self.unary())
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.accept("^"):
            neg = self.accept("-")
            n = int(self.expect_kind("INT", "an integer exponent").text)
            return Pow(base, -n if neg else n)
        return base

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "INT":
            self.i += 1
            return Num(int(t.text))
        if t.kind == "NAME" and t.text not in KEYWORDS:
            self.i += 1
            if t.text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(t.text, arg)
            return Var(t.text)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        raise self.error("expected an expression")


def parse_program(text: str) -> Program:
    return _Parser(text).program()


def parse_expr(text: str) -> Expr:
    p = _Parser(text)
    e = p.expr()
    if p.tok.kind != "EOF":
        raise p.error("unexpected trailing input")
    return e


# ---------------------------------------------------------------------------
# pretty-printer (minimal parentheses; parse(pretty(ast)) == ast)
# ---------------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return 3
    if isinstance(e, Pow):
        return 4
    return 5


def pretty_expr(e: Expr) -> str:
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Call):
        return f"{e.func}({pretty_expr(e.arg)})"
    if isinstance(e, Pow):
        b = pretty_expr(e.base)
        if _prec(e.base) < 5:
            b = f"({b})"
        return f"{b}^{e.exponent}"
    if isinstance(e, Neg):
        s = pretty_expr(e.operand)
        return f"-({s})" if _prec(e.operand) < 3 else f"-{s}"
    p = _PREC[e.op]
    left = pretty_expr(e.left)
    if _prec(e.left) < p:
        left = f"({left})"
    right = pretty_expr(e.right)
    if _prec(e.right) <= p:
        right = f"({right})"
    sep = f" {e.op} " if p == 1 else e.op
    return f"{left}{sep}{right}"


def _rat(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def pretty_statement(s: Statement) -> str:
    if isinstance(s, Assign):
        return f"{s.target} = {pretty_expr(s.expr)};"
    if isinstance(s, Param):
        return f"param {s.name} = {_rat(s.value)};"
    if isinstance(s, Weights):
        return f"weights = ({s.p},{s.q});"
    return f"sweep {s.name} from {_rat(s.start)} to {_rat(s.stop)} steps {s.steps};"


def pretty(prog: Program) -> str:
    return "".join(pretty_statement(s) + "\n" for s in prog.statements)

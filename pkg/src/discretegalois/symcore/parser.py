"""Recursive-descent parser for rational expressions.

Grammar::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := base ('^' int)?
    base   := number | ident | '(' expr ')' | '-' base

Numbers are decimal integers or ``p/q``; exponents may be negative.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .errors import ParseError, UndeclaredSymbolError, ZeroDenominatorError
from .ratfunc import RatFunc

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


@dataclass(frozen=True)
class Const:
    value: Fraction


@dataclass(frozen=True)
class Symbol:
    name: str
    position: int


@dataclass(frozen=True)
class Neg:
    child: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"
    position: int


@dataclass(frozen=True)
class Power:
    base: "Node"
    exponent: int


Node = Union[Const, Symbol, Neg, BinOp, Power]


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.group(1) is not None:
            tokens.append(("num", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(("ident", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", m.start(3))
            tokens.append(("op", ch, m.start(3)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.take()
        if val != value or kind != "op":
            raise ParseError(f"expected {value!r}", pos)

    def parse(self) -> Node:
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {val!r}", pos)
        return node

    def expr(self) -> Node:
        node = self.term()
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                node = BinOp(val, node, self.term(), pos)
            else:
                return node

    def term(self) -> Node:
        node = self.factor()
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val in "*/":
                self.take()
                node = BinOp(val, node, self.factor(), pos)
            else:
                return node

    def factor(self) -> Node:
        kind, val, pos = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return Neg(self.factor())
        node = self.base()
        kind, val, pos = self.peek()
        if kind == "op" and val == "^":
            self.take()
            sign = 1
            kind, val, pos = self.peek()
            if kind == "op" and val == "-":
                self.take()
                sign = -1
                kind, val, pos = self.peek()
            if kind != "num":
                raise ParseError("exponent must be an integer literal", pos)
            self.take()
            node = Power(node, sign * int(val))
        return node

    def base(self) -> Node:
        kind, val, pos = self.take()
        if kind == "num":
            return Const(Fraction(int(val)))
        if kind == "ident":
            return Symbol(val, pos)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "end":
            raise ParseError("unexpected end of input", pos)
        raise ParseError(f"unexpected token {val!r}", pos)


def parse_ast(text: str) -> Node:
    return _Parser(text).parse()


def evaluate(node: Node, symbols: Sequence[str]) -> RatFunc:
    names = tuple(symbols)
    if isinstance(node, Const):
        return RatFunc.constant(node.value, names)
    if isinstance(node, Symbol):
        if node.name not in names:
            raise UndeclaredSymbolError(f"undeclared identifier {node.name!r}", node.position)
        return RatFunc.variable(node.name, names)
    if isinstance(node, Neg):
        return -evaluate(node.child, names)
    if isinstance(node, Power):
        base = evaluate(node.base, names)
        if node.exponent < 0 and base.is_zero():
            raise ZeroDenominatorError("negative power of zero")
        return base ** node.exponent
    left = evaluate(node.left, names)
    right = evaluate(node.right, names)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    if right.is_zero():
        raise ZeroDenominatorError(f"division by zero at position {node.position}")
    return left / right


def parse_expression(text: str, symbols: Sequence[str]) -> RatFunc:
    """Parse ``text`` into the canonical element of QQ(symbols)."""
    return evaluate(parse_ast(text), symbols)

"""A small expression language for right-hand sides ``F(t, x)``.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := ('+' | '-') factor | base ('^' factor)?
    base   := number | 't' | 'x' | ident | ident '(' expr ')' | '(' expr ')'

``^`` is right-associative and binds tighter than unary minus, so ``-x^2`` is
``-(x^2)``.  Bare identifiers other than ``t`` and ``x`` must be bound through
``params`` (or be ``pi``) and are folded into constants at parse time, as is
every subtree that does not depend on ``t`` or ``x``.
"""

from __future__ import annotations

import math
import re
from collections.abc import Callable, Mapping
from dataclasses import dataclass

from .errors import ExpressionSyntaxError, UnknownIdentifier

FUNCTIONS: dict[str, Callable[[float], float]] = {
    "sqrt": math.sqrt,
    "exp": math.exp,
    "ln": math.log,
    "sin": math.sin,
    "cos": math.cos,
    "abs": abs,
}
CONSTANTS = {"pi": math.pi}
VARIABLES = ("t", "x")

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)

_BINARY = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": lambda a, b: a / b,
    "^": math.pow,
}


@dataclass(frozen=True)
class Node:
    kind: str  # const | var | neg | bin | call
    value: object = None
    left: Node | None = None
    right: Node | None = None

    @property
    def is_const(self) -> bool:
        return self.kind == "const"


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    end = len(text.rstrip())
    while pos < end:
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ExpressionSyntaxError(f"unexpected character {text[start]!r}", text, start)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, params: Mapping[str, float]):
        self.text = text
        self.params = params
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def fail(self, message: str):
        raise ExpressionSyntaxError(message, self.text, self.tok[2])

    def accept(self, op: str) -> bool:
        if self.tok[0] == "op" and self.tok[1] == op:
            self.i += 1
            return True
        return False

    def parse(self) -> Node:
        node = self.expr()
        if self.tok[0] != "end":
            self.fail(f"unexpected {self.tok[1]!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok[0] == "op" and self.tok[1] in "+-":
            op = self.tok[1]
            self.i += 1
            node = _binary(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.tok[0] == "op" and self.tok[1] in "*/":
            op = self.tok[1]
            self.i += 1
            node = _binary(op, node, self.factor())
        return node

    def factor(self) -> Node:
        if self.accept("-"):
            inner = self.factor()
            return Node("const", -inner.value) if inner.is_const else Node("neg", left=inner)
        if self.accept("+"):
            return self.factor()
        node = self.base()
        if self.accept("^"):
            node = _binary("^", node, self.factor())
        return node

    def base(self) -> Node:
        kind, text, pos = self.tok
        if kind == "num":
            self.i += 1
            return Node("const", float(text))
        if kind == "name":
            self.i += 1
            if self.accept("("):
                if text not in FUNCTIONS:
                    raise UnknownIdentifier(text, pos)
                arg = self.expr()
                if not self.accept(")"):
                    self.fail("expected ')'")
                if arg.is_const:
                    return Node("const", _fold(lambda: FUNCTIONS[text](arg.value), self.text, pos))
                return Node("call", text, arg)
            if text in VARIABLES:
                return Node("var", text)
            if text in self.params:
                return Node("const", float(self.params[text]))
            if text in CONSTANTS:
                return Node("const", CONSTANTS[text])
            raise UnknownIdentifier(text, pos)
        if self.accept("("):
            node = self.expr()
            if not self.accept(")"):
                self.fail("expected ')'")
            return node
        self.fail("expected a number, variable, function call or '('")


def _fold(thunk, text: str, pos: int) -> float:
    try:
        return float(thunk())
    except (ValueError, ZeroDivisionError, OverflowError) as exc:
        raise ExpressionSyntaxError(f"constant subexpression is undefined ({exc})", text, pos) from exc


def _binary(op: str, left: Node, right: Node) -> Node:
    if left.is_const and right.is_const:
        try:
            return Node("const", float(_BINARY[op](left.value, right.value)))
        except (ValueError, ZeroDivisionError, OverflowError):
            pass  # keep the node; the error surfaces at evaluation time
    return Node("bin", op, left, right)


def _compile(node: Node) -> Callable[[float, float], float]:
    if node.kind == "const":
        c = node.value
        return lambda t, x: c
    if node.kind == "var":
        return (lambda t, x: t) if node.value == "t" else (lambda t, x: x)
    if node.kind == "neg":
        inner = _compile(node.left)
        return lambda t, x: -inner(t, x)
    if node.kind == "call":
        fn = FUNCTIONS[node.value]
        inner = _compile(node.left)
        return lambda t, x: fn(inner(t, x))
    op = _BINARY[node.value]
    lf, rf = _compile(node.left), _compile(node.right)
    return lambda t, x: op(lf(t, x), rf(t, x))


def _render(node: Node) -> str:
    if node.kind == "const":
        return repr(node.value) if node.value >= 0 else f"({node.value!r})"
    if node.kind == "var":
        return node.value
    if node.kind == "neg":
        return f"(-{_render(node.left)})"
    if node.kind == "call":
        return f"{node.value}({_render(node.left)})"
    return f"({_render(node.left)}{node.value}{_render(node.right)})"


@dataclass(frozen=True)
class Expression:
    """Parsed, constant-folded expression callable as ``expr(t, x)``."""

    text: str
    tree: Node
    fn: Callable[[float, float], float]

    def __call__(self, t: float, x: float) -> float:
        return self.fn(t, x)

    def canonical(self) -> str:
        return _render(self.tree)


def parse_expression(text: str, params: Mapping[str, float] | None = None) -> Expression:
    tree = _Parser(text, params or {}).parse()
    return Expression(text, tree, _compile(tree))

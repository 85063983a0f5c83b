"""Tokenizer and recursive-descent parser for the expression grammar.

The grammar is shared by scalars (variables ``t`` and ``u``), series
(variable ``x``) and system coordinates (``x1``, ``x2``, ...)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' exponent)?
    exponent := INT | '-' INT | '(' '-'? INT ')'
    atom   := INT | NAME | '(' expr ')'

Parsing produces a small tuple-based AST which :func:`evaluate` folds over
any ring-like value type.
"""

from __future__ import annotations

import re
from typing import Any, Callable, Mapping

from .errors import ParseError

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")

# AST node shapes:
#   ("int", n) ("var", name, column, line) ("neg", a) ("add"|"sub"|"mul"|"div", a, b) ("pow", a, k)
Node = tuple


def _tokenize(text: str, line: int) -> list[tuple[str, Any, int]]:
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            col = pos + 1
            while col <= n and text[col - 1].isspace():
                col += 1
            raise ParseError(f"unexpected character {text[col - 1]!r}", line, col,
                             {"INT", "NAME", "(", "-"})
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            tokens.append(("INT", int(m.group(1)), start + 1))
        elif m.group(2) is not None:
            tokens.append(("NAME", m.group(2), start + 1))
        else:
            op = m.group(3)
            tokens.append(("^" if op == "**" else op, op, start + 1))
        pos = m.end()
    tokens.append(("EOF", None, len(text) + 1))
    return tokens


class _Parser:
    def __init__(self, text: str, line: int):
        self.tokens = _tokenize(text, line)
        self.i = 0
        self.line = line

    def peek(self) -> str:
        return self.tokens[self.i][0]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, expected: set[str]):
        kind, value, col = self.tokens[self.i]
        shown = "end of input" if kind == "EOF" else repr(str(value))
        raise ParseError(f"unexpected {shown}", self.line, col, expected)

    def expect(self, kind: str):
        if self.peek() != kind:
            self.fail({kind})
        return self.take()

    def parse(self) -> Node:
        node = self.expr()
        if self.peek() != "EOF":
            self.fail({"+", "-", "*", "/", "^", "end of input"})
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()[0]
            node = ("add" if op == "+" else "sub", node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek() in ("*", "/"):
            op = self.take()[0]
            node = ("mul" if op == "*" else "div", node, self.unary())
        return node

    def unary(self) -> Node:
        if self.peek() == "-":
            self.take()
            return ("neg", self.unary())
        return self.power()

    def power(self) -> Node:
        node = self.atom()
        if self.peek() == "^":
            self.take()
            node = ("pow", node, self.exponent())
        return node

    def exponent(self) -> int:
        if self.peek() == "INT":
            return self.take()[1]
        if self.peek() == "-":
            self.take()
            return -self.expect("INT")[1]
        if self.peek() == "(":
            self.take()
            sign = 1
            if self.peek() == "-":
                self.take()
                sign = -1
            k = self.expect("INT")[1]
            self.expect(")")
            return sign * k
        self.fail({"INT", "-", "("})

    def atom(self) -> Node:
        kind = self.peek()
        if kind == "INT":
            return ("int", self.take()[1])
        if kind == "NAME":
            tok = self.take()
            return ("var", tok[1], tok[2], self.line)
        if kind == "(":
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        self.fail({"INT", "NAME", "(", "-"})


def parse_expr(text: str, line: int = 1) -> Node:
    """Parse ``text`` into an AST; raises :class:`ParseError` with a column."""
    return _Parser(text, line).parse()


def variables(node: Node) -> set[str]:
    kind = node[0]
    if kind == "var":
        return {node[1]}
    if kind == "int":
        return set()
    if kind in ("neg", "pow"):
        return variables(node[1])
    return variables(node[1]) | variables(node[2])


def check_variables(node: Node, allowed: set[str]) -> None:
    """Raise :class:`ParseError` at the first name outside ``allowed``."""
    kind = node[0]
    if kind == "var":
        if node[1] not in allowed:
            raise ParseError(f"unknown variable {node[1]!r}", node[3], node[2], allowed)
    elif kind in ("neg", "pow"):
        check_variables(node[1], allowed)
    elif kind != "int":
        check_variables(node[1], allowed)
        check_variables(node[2], allowed)


def evaluate(node: Node, env: Mapping[str, Any], lift: Callable[[int], Any]) -> Any:
    """Fold ``node`` into a value.

    ``env`` maps variable names to ring elements and ``lift`` embeds integer
    literals.  Division and negative powers use the values' own operators,
    so a ``ZeroDivisionError`` from the value type propagates unchanged.
    """
    kind = node[0]
    if kind == "int":
        return lift(node[1])
    if kind == "var":
        try:
            return env[node[1]]
        except KeyError:
            raise ParseError(f"unknown variable {node[1]!r}", node[3], node[2],
                             set(env)) from None
    if kind == "neg":
        return -evaluate(node[1], env, lift)
    if kind == "pow":
        return evaluate(node[1], env, lift) ** node[2]
    a = evaluate(node[1], env, lift)
    b = evaluate(node[2], env, lift)
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    return a / b

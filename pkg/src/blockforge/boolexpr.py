"""Boolean expressions over inputs ``x1 .. xg``.

Grammar, loosest binding first::

    expr   := eq
    eq     := or ( "==" or )*
    or     := xor ( ("|" | "nor") xor )*
    xor    := and ( "^" and )*
    and    := unary ( ("&" | "nand") unary )*
    unary  := "!" unary | atom
    atom   := "x" INT | "0" | "1" | "(" expr ")"

All binary operators associate to the left.  Expressions are parsed into
nested tuples: ``("var", i)`` (0-based), ``("const", b)``, ``("not", a)`` and
``(op, a, b)`` with ``op`` in ``and or xor eq nor nand``.
"""

from __future__ import annotations

import re

from .errors import ValidationError

_TOKEN = re.compile(r"\s*(?:(x\d+)|(==)|(nand\b)|(nor\b)|([!&|^()])|([01])(?![0-9]))")

_BINARY = {
    "and": lambda a, b: a & b,
    "or": lambda a, b: a | b,
    "xor": lambda a, b: a ^ b,
    "eq": lambda a, b: 1 - (a ^ b),
    "nor": lambda a, b: 1 - (a | b),
    "nand": lambda a, b: 1 - (a & b),
}


def tokenize(text: str) -> list[str]:
    pos = 0
    out = []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValidationError(f"unexpected input at {text[pos:pos + 10]!r}")
        out.append(next(g for g in m.groups() if g is not None))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return out


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self, expected=None):
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise ValidationError(f"expected {expected or 'a token'}, found {tok!r}")
        self.i += 1
        return tok

    def binary(self, sub, ops):
        node = sub()
        while self.peek() in ops:
            node = (ops[self.take()], node, sub())
        return node

    def eq(self):
        return self.binary(self.or_, {"==": "eq"})

    def or_(self):
        return self.binary(self.xor, {"|": "or", "nor": "nor"})

    def xor(self):
        return self.binary(self.and_, {"^": "xor"})

    def and_(self):
        return self.binary(self.unary, {"&": "and", "nand": "nand"})

    def unary(self):
        if self.peek() == "!":
            self.take()
            return ("not", self.unary())
        return self.atom()

    def atom(self):
        tok = self.take()
        if tok == "(":
            node = self.eq()
            self.take(")")
            return node
        if tok in ("0", "1"):
            return ("const", int(tok))
        if tok.startswith("x"):
            index = int(tok[1:])
            if index < 1:
                raise ValidationError("inputs are numbered from x1")
            return ("var", index - 1)
        raise ValidationError(f"unexpected token {tok!r}")


def parse(text: str):
    p = _Parser(tokenize(text))
    node = p.eq()
    if p.peek() is not None:
        raise ValidationError(f"trailing input starting at {p.peek()!r}")
    return node


def variables(node) -> set[int]:
    kind = node[0]
    if kind == "var":
        return {node[1]}
    if kind == "const":
        return set()
    return set().union(*(variables(child) for child in node[1:]))


def evaluate(node, bits) -> int:
    kind = node[0]
    if kind == "var":
        return int(bits[node[1]])
    if kind == "const":
        return node[1]
    if kind == "not":
        return 1 - evaluate(node[1], bits)
    return _BINARY[kind](evaluate(node[1], bits), evaluate(node[2], bits))


def to_text(node) -> str:
    kind = node[0]
    if kind == "var":
        return f"x{node[1] + 1}"
    if kind == "const":
        return str(node[1])
    if kind == "not":
        return f"!{to_text(node[1])}"
    symbol = {"and": "&", "or": "|", "xor": "^", "eq": "==", "nor": "nor", "nand": "nand"}[kind]
    return f"({to_text(node[1])} {symbol} {to_text(node[2])})"

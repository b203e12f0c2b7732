"""Small recursive-descent parser shared by the polynomial and element grammars.

The grammar is::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/' | <juxtaposition>) unary)*
    unary  := '-' unary | '+' unary | power
    power  := atom (('^' | '**') INT)?
    atom   := NUMBER | SYMBOL | 'E[' INT ',' INT ']' | '(' expr ')'

Juxtaposition multiplies, so ``E[2,1]E[1,2]`` and ``2t`` both parse.  The
meaning of each atom is supplied by a builder object, which lets the same
parser produce commutative polynomials or elements of U(gl_N).
"""

from __future__ import annotations

import re
from fractions import Fraction

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<gen>E\[\s*(?P<gi>\d+)\s*,\s*(?P<gj>\d+)\s*\])"
    r"|(?P<num>\d+(?:\.\d+)?)"
    r"|(?P<sym>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>\*\*|[-+*/^()])"
    r")"
)


class ParseError(ValueError):
    pass


def tokenize(text: str) -> list[tuple[str, object]]:
    pos = 0
    out: list[tuple[str, object]] = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character at position {pos}: {text[pos:pos + 10]!r}")
        pos = m.end()
        if m.group("gen"):
            out.append(("gen", (int(m.group("gi")), int(m.group("gj")))))
        elif m.group("num"):
            raw = m.group("num")
            if "." in raw:
                raise ParseError(f"floating point literal {raw!r} not allowed; use a rational p/q")
            out.append(("num", int(raw)))
        elif m.group("sym"):
            out.append(("sym", m.group("sym")))
        else:
            out.append(("op", m.group("op")))
    return out


class _Parser:
    def __init__(self, tokens, builder):
        self.toks = tokens
        self.i = 0
        self.b = builder

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, op):
        kind, val = self.take()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}, got {val!r}")

    def parse(self):
        if not self.toks:
            raise ParseError("empty expression")
        val = self.expr()
        if self.i != len(self.toks):
            raise ParseError(f"trailing input starting at token {self.peek()[1]!r}")
        return val

    def expr(self):
        val = self.term()
        while True:
            kind, op = self.peek()
            if kind == "op" and op in ("+", "-"):
                self.take()
                rhs = self.term()
                val = val + rhs if op == "+" else val - rhs
            else:
                return val

    def _starts_atom(self):
        kind, val = self.peek()
        return kind in ("num", "sym", "gen") or (kind == "op" and val == "(")

    def term(self):
        val = self.unary()
        while True:
            kind, op = self.peek()
            if kind == "op" and op == "*":
                self.take()
                val = val * self.unary()
            elif kind == "op" and op == "/":
                self.take()
                den = self.unary()
                val = self.b.divide(val, den)
            elif self._starts_atom():
                val = val * self.power()
            else:
                return val

    def unary(self):
        kind, op = self.peek()
        if kind == "op" and op == "-":
            self.take()
            return -self.unary()
        if kind == "op" and op == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        kind, op = self.peek()
        if kind == "op" and op in ("^", "**"):
            self.take()
            k, e = self.take()
            if k != "num":
                raise ParseError("exponent must be a non-negative integer literal")
            return base ** e
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return self.b.number(Fraction(val))
        if kind == "sym":
            return self.b.symbol(val)
        if kind == "gen":
            return self.b.generator(*val)
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise ParseError(f"unexpected token {val!r}")


def parse_with(text: str, builder):
    return _Parser(tokenize(text), builder).parse()

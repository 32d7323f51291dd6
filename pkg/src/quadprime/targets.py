"""Exact target expressions.

Grammar (whitespace ignored):
    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '·' | '/' | implicit) unary)*
    unary  := ('-' | '+') unary | power
    power  := atom ('^' unary)?
    atom   := INT | 'i' | 'pi' | 'π' | 'e' | 'sqrt' '(' expr ')' | '(' expr ')'

Values are complex numbers represented as (re, im) pairs so the same tree can be
evaluated with mpmath floats or with mpmath interval arithmetic.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

import mpmath

from .errors import RejectedInput

_TOKEN = re.compile(r"\s*(?:(\d+)|(sqrt|pi|π|i|e)|(\*\*|[-+*/^()·,]))")


def tokenize(s: str) -> list:
    out, pos = [], 0
    s = s.strip()
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m or m.end() == pos:
            raise RejectedInput(f"cannot parse target near {s[pos:pos + 10]!r}")
        num, name, op = m.groups()
        if num is not None:
            out.append(("int", int(num)))
        elif name is not None:
            out.append(("name", "pi" if name == "π" else name))
        else:
            out.append(("op", "^" if op == "**" else ("*" if op == "·" else op)))
        pos = m.end()
        while pos < len(s) and s[pos].isspace():
            pos += 1
    return out


class _Parser:
    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, kind=None, val=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (val and tok[1] != val):
            raise RejectedInput(f"unexpected token {tok[1]!r} in target expression")
        self.i += 1
        return tok

    def expr(self):
        node = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            node = (op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while True:
            tok = self.peek()
            if tok in (("op", "*"), ("op", "/")):
                op = self.take()[1]
                node = (op, node, self.unary())
            elif tok[0] in ("int", "name") or tok == ("op", "("):
                node = ("*", node, self.power())
            else:
                return node

    def unary(self):
        tok = self.peek()
        if tok == ("op", "-"):
            self.take()
            return ("neg", self.unary())
        if tok == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            exp = self.unary()
            return ("^", base, exp)
        return base

    def atom(self):
        kind, val = self.peek()
        if kind == "int":
            self.take()
            return ("int", val)
        if kind == "name":
            self.take()
            if val == "sqrt":
                self.take("op", "(")
                inner = self.expr()
                self.take("op", ")")
                return ("sqrt", inner)
            return ("const", val)
        if (kind, val) == ("op", "("):
            self.take()
            inner = self.expr()
            self.take("op", ")")
            return inner
        raise RejectedInput(f"unexpected token {val!r} in target expression")


def parse(s: str):
    p = _Parser(tokenize(s))
    node = p.expr()
    if p.peek()[0] is not None:
        raise RejectedInput(f"trailing input in target expression {s!r}")
    return node


def _int_value(node):
    """Exact integer value of a constant subtree, or None."""
    if node[0] == "int":
        return node[1]
    if node[0] == "neg":
        v = _int_value(node[1])
        return None if v is None else -v
    return None


def evaluate(node, ctx):
    """Evaluate to (re, im) using ctx = mpmath.mp or mpmath.iv."""
    op = node[0]
    zero = ctx.mpf(0)
    if op == "int":
        return ctx.mpf(node[1]), zero
    if op == "const":
        if node[1] == "i":
            return zero, ctx.mpf(1)
        if node[1] == "pi":
            return +ctx.pi, zero
        return ctx.e + 0, zero
    if op == "neg":
        a, b = evaluate(node[1], ctx)
        return -a, -b
    if op == "sqrt":
        a, b = evaluate(node[1], ctx)
        if not _is_zero(b):
            raise RejectedInput("sqrt of a non-real quantity is not supported")
        if _definitely_negative(a):
            return zero, ctx.sqrt(-a)
        return ctx.sqrt(a), zero
    x = evaluate(node[1], ctx)
    if op == "^":
        n = _int_value(node[2])
        if n is None:
            raise RejectedInput("only integer exponents are supported")
        return _cpow(x, n, ctx)
    y = evaluate(node[2], ctx)
    if op == "+":
        return x[0] + y[0], x[1] + y[1]
    if op == "-":
        return x[0] - y[0], x[1] - y[1]
    if op == "*":
        return x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0]
    if op == "/":
        den = y[0] * y[0] + y[1] * y[1]
        return (x[0] * y[0] + x[1] * y[1]) / den, (x[1] * y[0] - x[0] * y[1]) / den
    raise RejectedInput(f"bad node {op}")


def _is_zero(v) -> bool:
    try:
        return v == 0 and (not hasattr(v, "a") or (v.a == 0 and v.b == 0))
    except TypeError:
        return False


def _definitely_negative(v) -> bool:
    if hasattr(v, "b"):
        return v.b < 0
    return v < 0


def _cpow(x, n, ctx):
    if n < 0:
        den = x[0] * x[0] + x[1] * x[1]
        x = (x[0] / den, -x[1] / den)
        n = -n
    out = (ctx.mpf(1), ctx.mpf(0))
    for _ in range(n):
        out = (out[0] * x[0] - out[1] * x[1], out[0] * x[1] + out[1] * x[0])
    return out


@dataclass(frozen=True)
class ApproxTarget:
    """A target alpha in C (imaginary) or (x1, x2) in R^2 (real), given exactly."""

    signature: str
    exprs: tuple
    precision_bits: int = 192

    @staticmethod
    def imaginary(alpha: str, precision_bits: int = 192) -> "ApproxTarget":
        t = ApproxTarget("imaginary", (alpha,), precision_bits)
        t.trees()
        return t

    @staticmethod
    def real(x1: str, x2: str, precision_bits: int = 192) -> "ApproxTarget":
        t = ApproxTarget("real", (x1, x2), precision_bits)
        t.value(64)
        return t

    @staticmethod
    def parse(text: str, signature: str, precision_bits: int = 192) -> "ApproxTarget":
        if signature == "real":
            parts = _split_pair(text)
            return ApproxTarget.real(parts[0], parts[1], precision_bits)
        return ApproxTarget.imaginary(text, precision_bits)

    def trees(self):
        return tuple(parse(e) for e in self.exprs)

    def value(self, prec: int | None = None):
        """mpc alpha, or (x1, x2) as mpf, at the given precision."""
        prec = prec or self.precision_bits
        with mpmath.workprec(prec):
            vals = [evaluate(t, mpmath.mp) for t in self.trees()]
            if self.signature == "imaginary":
                return mpmath.mpc(vals[0][0], vals[0][1])
            for re_, im in vals:
                if abs(im) > 0:
                    raise RejectedInput("real targets must be real")
            return vals[0][0], vals[1][0]

    def interval(self, prec: int | None = None):
        """Enclosures: (re, im) intervals, or (x1, x2) intervals."""
        prec = prec or self.precision_bits
        old = mpmath.iv.prec
        mpmath.iv.prec = prec
        try:
            vals = [evaluate(t, mpmath.iv) for t in self.trees()]
        finally:
            mpmath.iv.prec = old
        if self.signature == "imaginary":
            return vals[0]
        return vals[0][0], vals[1][0]

    def floats(self):
        v = self.value(64)
        if self.signature == "imaginary":
            return complex(v)
        return float(v[0]), float(v[1])

    def describe(self) -> dict:
        return {"signature": self.signature, "expressions": list(self.exprs), "precision_bits": self.precision_bits}


def _split_pair(text: str):
    depth = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            return text[:i].strip(), text[i + 1 :].strip()
    raise RejectedInput("real targets are given as 'x1, x2'")

"""Small recursive-descent evaluator for the textual grammars.

One grammar serves both K-elements (``"(θ^3 + 2*θ)"``, ``"(1)/(θ^3 + 2*θ)"``)
and form expressions (``"h^2 g^7 - (θ^3+2θ) h^4 g^3"``): sums of products of
powers, where juxtaposition means multiplication.  Atoms are resolved by a
caller-supplied callback, so the same code evaluates into RatK or into
FormExpr values through their operator overloads.
"""

import re

from .errors import ParseError, PreconditionError
from .ring_core import PolyA, RatK

_TOKEN = re.compile(
    r"""\s*(?:
        (?P<num>\d+)
      | (?P<name>theta|Delta|phi\d+|f_\{\s*\d+\s*,\s*\d+\s*\}|θ|T|g|h)
      | (?P<op>[-+*/^()])
    )""",
    re.VERBOSE,
)

THETA_NAMES = ("θ", "theta", "T")


def tokenize(text):
    tokens = []
    pos = 0
    text = text.rstrip().replace("\u2212", "-")
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            stripped = len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[pos + stripped]!r}", pos + stripped)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, atom, number):
        self.tokens = tokenize(text)
        self.i = 0
        self.atom = atom
        self.number = number

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.take()
        if val != value:
            raise ParseError(f"expected {value!r}, found {val or 'end of input'!r}", pos)

    def parse(self):
        value = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {val!r}", pos)
        return value

    def expr(self):
        kind, val, pos = self.peek()
        if val in "+-" and kind == "op":
            self.take()
            value = self.term()
            if val == "-":
                value = -value
        else:
            value = self.term()
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.term()
                value = self._apply(value, val, rhs, pos)
            else:
                return value

    def _starts_atom(self, tok):
        kind, val, _ = tok
        return kind in ("num", "name") or (kind == "op" and val == "(")

    def term(self):
        value = self.unary()
        while True:
            tok = self.peek()
            kind, val, pos = tok
            if kind == "op" and val in "*/":
                self.take()
                rhs = self.unary()
                value = self._apply(value, val, rhs, pos)
            elif self._starts_atom(tok):
                rhs = self.power()
                value = self._apply(value, "*", rhs, pos)
            else:
                return value

    def unary(self):
        kind, val, pos = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return -self.unary()
        return self.power()

    def power(self):
        base = self.atom_value()
        kind, val, pos = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind, val, epos = self.take()
            if kind != "num":
                raise ParseError("exponent must be a nonnegative integer", epos)
            return base ** int(val)
        return base

    def atom_value(self):
        kind, val, pos = self.take()
        if kind == "num":
            return self.number(int(val))
        if kind == "name":
            return self.atom(val, pos)
        if kind == "op" and val == "(":
            value = self.expr()
            self.expect(")")
            return value
        raise ParseError(f"unexpected {val or 'end of input'!r}", pos)

    def _apply(self, lhs, op, rhs, pos):
        try:
            if op == "+":
                out = lhs + rhs
            elif op == "-":
                out = lhs - rhs
            elif op == "*":
                out = lhs * rhs
            else:
                out = lhs / rhs
        except PreconditionError:
            raise
        except TypeError:
            raise ParseError(f"operator {op!r} not defined for these operands", pos) from None
        if out is NotImplemented:
            raise ParseError(f"operator {op!r} not defined for these operands", pos)
        return out


def evaluate(text, atom, number):
    """Evaluate ``text``; ``atom(name, pos)`` and ``number(n)`` build leaves."""
    return _Parser(text, atom, number).parse()


def parse_rat(text, p):
    """Parse an element of K written with θ, ``theta`` or ``T``."""
    theta = RatK.from_poly(PolyA.theta(p))

    def atom(name, pos):
        if name in THETA_NAMES:
            return theta
        raise ParseError(f"unknown symbol {name!r}", pos)

    return evaluate(text, atom, lambda n: RatK.constant(p, n))


def parse_int_list(text):
    """Parse ``"{2,1,0}"`` (braces optional, any order) into a list of ints."""
    s = text.strip()
    if s.startswith("{") or s.startswith("["):
        closing = "}" if s[0] == "{" else "]"
        if not s.endswith(closing):
            raise ParseError(f"unbalanced brackets in {text!r}", len(text))
        s = s[1:-1]
    if not s.strip():
        return []
    out = []
    offset = 0
    for part in s.split(","):
        item = part.strip()
        if not re.fullmatch(r"\d+", item):
            raise ParseError(f"expected a nonnegative integer, found {item!r}", offset)
        out.append(int(item))
        offset += len(part) + 1
    return out

"""Text form of polynomials.

Grammar (ASCII, whitespace-insensitive)::

    poly    := ['-'] term (('+'|'-') term)*
    term    := coeff ('*' factor)* | factor ('*' factor)*
    factor  := varname ('^' uint)?
    coeff   := int ('/' uint)?

Printing emits the same grammar in canonical (graded-lex) term order, so
``parse_poly(format_poly(p), p.coords) == p``.
"""

from __future__ import annotations

import gmpy2

from idegen.algebra.coords import CoordinateSystem
from idegen.algebra.poly import EXP_BITS, MAX_EXPONENT, Polynomial, Rational
from idegen.errors import PolySyntaxError, UnknownVariable


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        # byte offsets differ from str indices once non-ASCII creeps in
        self._ascii = text.isascii()

    def offset(self, pos: int | None = None) -> int:
        pos = self.pos if pos is None else pos
        if self._ascii:
            return pos
        return len(self.text[:pos].encode("utf-8"))

    def error(self, msg: str, pos: int | None = None):
        raise PolySyntaxError(msg, self.offset(pos), self.text)

    def skip_ws(self):
        t = self.text
        while self.pos < len(t) and t[self.pos] in " \t\r\n":
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch: str) -> bool:
        if self.peek() == ch:
            self.pos += 1
            return True
        return False

    def uint(self) -> tuple[int, int]:
        self.skip_ws()
        start = self.pos
        t = self.text
        while self.pos < len(t) and t[self.pos].isdigit() and t[self.pos].isascii():
            self.pos += 1
        if start == self.pos:
            self.error("expected an unsigned integer")
        return int(t[start:self.pos]), start

    def name(self) -> tuple[str, int]:
        self.skip_ws()
        start = self.pos
        t = self.text
        if self.pos < len(t) and (t[self.pos].isalpha() or t[self.pos] == "_"):
            self.pos += 1
            while self.pos < len(t) and (t[self.pos].isalnum() or t[self.pos] == "_"):
                self.pos += 1
        if start == self.pos:
            self.error("expected a variable name")
        return t[start:self.pos], start


def parse_poly(text: str, coords: CoordinateSystem) -> Polynomial:
    """Parse ``text`` into a :class:`Polynomial` over ``coords``."""
    lx = _Lexer(text)
    if not lx.peek():
        lx.error("empty polynomial")
    terms: dict[int, Rational] = {}
    sign = -1 if lx.take("-") else 1
    while True:
        key, coeff = _term(lx, coords)
        c = terms.get(key, gmpy2.mpq(0)) + sign * coeff
        if c:
            terms[key] = c
        else:
            terms.pop(key, None)
        ch = lx.peek()
        if ch == "":
            break
        if ch == "+":
            sign = 1
        elif ch == "-":
            sign = -1
        else:
            lx.error(f"unexpected character {ch!r}")
        lx.pos += 1
    return Polynomial(coords, terms)


def _term(lx: _Lexer, coords: CoordinateSystem) -> tuple[int, Rational]:
    coeff = gmpy2.mpq(1)
    key = 0
    ch = lx.peek()
    if ch.isdigit():
        num, _ = lx.uint()
        den = 1
        if lx.take("/"):
            den, pos = lx.uint()
            if den == 0:
                lx.error("zero denominator", pos)
        coeff = gmpy2.mpq(num, den)
        if not lx.take("*"):
            return key, coeff
    elif not (ch.isalpha() or ch == "_"):
        lx.error("expected a coefficient or a variable" if ch else "unexpected end of input")
    while True:
        key += _factor(lx, coords)
        if not lx.take("*"):
            return key, coeff


def _factor(lx: _Lexer, coords: CoordinateSystem) -> int:
    name, pos = lx.name()
    if name not in coords:
        raise UnknownVariable(name, lx.offset(pos), lx.text)
    idx = coords.index(name)
    exp = 1
    if lx.take("^"):
        if lx.peek() == "-":
            lx.error("negative exponents are not allowed")
        exp, epos = lx.uint()
        if exp > MAX_EXPONENT:
            lx.error(f"exponent exceeds {MAX_EXPONENT}", epos)
    return exp << (EXP_BITS * idx)


def format_monomial(exps, names) -> str:
    parts = []
    for e, nm in zip(exps, names):
        if e == 1:
            parts.append(nm)
        elif e:
            parts.append(f"{nm}^{e}")
    return "*".join(parts)


def _format_coeff(q: Rational) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_poly(p: Polynomial) -> str:
    terms = p.terms()
    if not terms:
        return "0"
    names = p.coords.names
    out = []
    for idx, (exps, c) in enumerate(terms):
        neg = c < 0
        a = -c if neg else c
        mono = format_monomial(exps, names)
        if not mono:
            body = _format_coeff(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_format_coeff(a)}*{mono}"
        if idx == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)

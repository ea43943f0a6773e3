"""Sparse multivariate polynomials with exact rational coefficients.

Monomials are packed into a single Python int, ``EXP_BITS`` bits per variable,
so monomial multiplication is integer addition. Coefficients are ``gmpy2.mpq``.
Terms with zero coefficient are never stored, which makes dict equality the
structural equality of canonical forms.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Mapping

import gmpy2

from idegen.algebra.coords import CoordinateSystem
from idegen.errors import MissingCoordinate

Rational = type(gmpy2.mpq())

EXP_BITS = 16
EXP_MASK = (1 << EXP_BITS) - 1
MAX_EXPONENT = EXP_MASK

_ZERO = gmpy2.mpq(0)
_ONE = gmpy2.mpq(1)


def to_rational(value) -> Rational:
    """Coerce int, Fraction, mpq or a ``"p/q"`` string to an exact rational."""
    if isinstance(value, Rational):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, (int, Fraction)):
        return gmpy2.mpq(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            return gmpy2.mpq(Fraction(text))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
    if hasattr(value, "numerator") and hasattr(value, "denominator") and not isinstance(value, float):
        return gmpy2.mpq(int(value.numerator), int(value.denominator))
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def format_rational(q) -> str:
    q = to_rational(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def pack(exponents: Iterable[int]) -> int:
    key = 0
    for i, e in enumerate(exponents):
        if e < 0:
            raise ValueError("negative exponent")
        if e > MAX_EXPONENT:
            raise OverflowError(f"exponent {e} exceeds {MAX_EXPONENT}")
        key |= e << (EXP_BITS * i)
    return key


def unpack(key: int, n: int) -> tuple[int, ...]:
    return tuple((key >> (EXP_BITS * i)) & EXP_MASK for i in range(n))


def key_degree(key: int) -> int:
    d = 0
    while key:
        d += key & EXP_MASK
        key >>= EXP_BITS
    return d


def _order_key(exps: tuple[int, ...]):
    # graded lex, descending: higher degree first, then larger u1 exponent first, ...
    return (-sum(exps), tuple(-e for e in exps))


class Polynomial:
    """Immutable sparse polynomial over a :class:`CoordinateSystem`."""

    __slots__ = ("coords", "_terms", "_hash")

    def __init__(self, coords: CoordinateSystem, terms: Mapping[int, Rational] | None = None):
        # ``terms`` must already be clean (mpq values, no zeros) and is taken
        # over without copying; use the classmethod constructors from outside.
        self.coords = coords
        self._terms = terms if terms else {}
        self._hash = None

    # -- construction ---------------------------------------------------
    @classmethod
    def zero(cls, coords: CoordinateSystem) -> "Polynomial":
        return cls(coords)

    @classmethod
    def constant(cls, coords: CoordinateSystem, value) -> "Polynomial":
        q = to_rational(value)
        return cls(coords, {0: q} if q else None)

    @classmethod
    def variable(cls, coords: CoordinateSystem, var) -> "Polynomial":
        idx = coords.index(var) if isinstance(var, str) else int(var)
        if not 0 <= idx < coords.n:
            raise IndexError(f"variable index {idx} out of range")
        return cls(coords, {1 << (EXP_BITS * idx): _ONE})

    @classmethod
    def monomial(cls, coords: CoordinateSystem, exponents: Iterable[int], coeff=1) -> "Polynomial":
        exps = tuple(exponents)
        if len(exps) != coords.n:
            raise ValueError(f"expected {coords.n} exponents, got {len(exps)}")
        q = to_rational(coeff)
        return cls(coords, {pack(exps): q} if q else None)

    @classmethod
    def from_terms(cls, coords: CoordinateSystem, terms: Mapping[tuple[int, ...], object]) -> "Polynomial":
        out: dict[int, Rational] = {}
        for exps, c in terms.items():
            if len(exps) != coords.n:
                raise ValueError(f"expected {coords.n} exponents, got {len(exps)}")
            key = pack(exps)
            q = out.get(key, _ZERO) + to_rational(c)
            if q:
                out[key] = q
            else:
                out.pop(key, None)
        return cls(coords, out)

    # -- inspection -----------------------------------------------------
    @property
    def raw_terms(self) -> Mapping[int, Rational]:
        """Packed-key view of the terms (read-only by convention)."""
        return self._terms

    def terms(self) -> list[tuple[tuple[int, ...], Rational]]:
        """(exponents, coefficient) pairs in canonical order."""
        n = self.coords.n
        items = [(unpack(k, n), c) for k, c in self._terms.items()]
        items.sort(key=lambda t: _order_key(t[0]))
        return items

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and 0 in self._terms)

    def constant_term(self) -> Rational:
        return self._terms.get(0, _ZERO)

    def constant_value(self) -> Rational:
        if not self.is_constant():
            raise ValueError(f"polynomial is not constant: {self}")
        return self._terms.get(0, _ZERO)

    def total_degree(self) -> int:
        """Largest total degree of a term; -1 for the zero polynomial."""
        return max((key_degree(k) for k in self._terms), default=-1)

    def degree_in(self, var: int) -> int:
        shift = EXP_BITS * var
        return max(((k >> shift) & EXP_MASK for k in self._terms), default=-1)

    def depends_on(self, var: int) -> bool:
        shift = EXP_BITS * var
        return any((k >> shift) & EXP_MASK for k in self._terms)

    def variables(self) -> set[int]:
        found = set()
        for k in self._terms:
            i = 0
            while k:
                if k & EXP_MASK:
                    found.add(i)
                k >>= EXP_BITS
                i += 1
        return found

    # -- arithmetic -----------------------------------------------------
    def _coerce(self, other) -> "Polynomial | None":
        if isinstance(other, Polynomial):
            if other.coords is not self.coords and other.coords != self.coords:
                raise ValueError("polynomials live in different coordinate systems")
            return other
        if isinstance(other, (int, Fraction, Rational)) and not isinstance(other, bool):
            return Polynomial.constant(self.coords, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not o._terms:
            return self
        if not self._terms:
            return o
        if len(o._terms) > len(self._terms):
            big, small = o._terms, self._terms
        else:
            big, small = self._terms, o._terms
        out = dict(big)
        get = out.get
        for k, c in small.items():
            s = get(k, _ZERO) + c
            if s:
                out[k] = s
            else:
                del out[k]
        return Polynomial(self.coords, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.coords, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not o._terms:
            return self
        out = dict(self._terms)
        get = out.get
        for k, c in o._terms.items():
            s = get(k, _ZERO) - c
            if s:
                out[k] = s
            else:
                del out[k]
        return Polynomial(self.coords, out)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            if other.coords is not self.coords and other.coords != self.coords:
                raise ValueError("polynomials live in different coordinate systems")
            a, b = self._terms, other._terms
            if not a or not b:
                return Polynomial(self.coords)
            if len(a) < len(b):
                a, b = b, a
            if len(b) == 1:
                (kb, cb), = b.items()
                return Polynomial(self.coords, {k + kb: c * cb for k, c in a.items()})
            out: dict[int, Rational] = {}
            get = out.get
            for kb, cb in b.items():
                for ka, ca in a.items():
                    k = ka + kb
                    out[k] = get(k, _ZERO) + ca * cb
            return Polynomial(self.coords, {k: c for k, c in out.items() if c})
        if isinstance(other, (int, Fraction, Rational)) and not isinstance(other, bool):
            q = to_rational(other)
            if not q:
                return Polynomial(self.coords)
            if q == 1:
                return self
            return Polynomial(self.coords, {k: c * q for k, c in self._terms.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Polynomial):
            if not other.is_constant():
                return NotImplemented
            other = other.constant_value()
        if isinstance(other, (int, Fraction, Rational)) and not isinstance(other, bool):
            q = to_rational(other)
            if not q:
                raise ZeroDivisionError("polynomial division by zero")
            return Polynomial(self.coords, {k: c / q for k, c in self._terms.items()})
        return NotImplemented

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Polynomial.constant(self.coords, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # -- equality / hashing ---------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.coords == other.coords and self._terms == other._terms
        if isinstance(other, (int, Fraction, Rational)) and not isinstance(other, bool):
            q = to_rational(other)
            if not q:
                return not self._terms
            return len(self._terms) == 1 and self._terms.get(0) == q
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- calculus / evaluation ------------------------------------------
    def diff(self, var) -> "Polynomial":
        """Formal partial derivative with respect to variable ``var`` (index or name)."""
        idx = self.coords.index(var) if isinstance(var, str) else var
        shift = EXP_BITS * idx
        unit = 1 << shift
        out = {}
        for k, c in self._terms.items():
            e = (k >> shift) & EXP_MASK
            if e:
                out[k - unit] = c * e
        return Polynomial(self.coords, out)

    def evaluate(self, point: Mapping) -> Rational:
        """Exact value at ``point`` (variable index or name -> rational).

        Raises :class:`MissingCoordinate` if a variable occurring in the
        polynomial has no value.
        """
        values = self._point_values(point)
        total = _ZERO
        cache: dict[tuple[int, int], Rational] = {}
        for k, c in self._terms.items():
            term = c
            i = 0
            while k:
                e = k & EXP_MASK
                if e:
                    val = values[i]
                    if val is None:
                        raise MissingCoordinate(self.coords.names[i])
                    p = cache.get((i, e))
                    if p is None:
                        p = val ** e
                        cache[(i, e)] = p
                    term = term * p
                k >>= EXP_BITS
                i += 1
            total += term
        return total

    def _point_values(self, point: Mapping) -> list:
        values: list = [None] * self.coords.n
        for key, val in point.items():
            idx = self.coords.index(key) if isinstance(key, str) else int(key)
            values[idx] = to_rational(val)
        return values

    def substitute(self, mapping: Mapping[int, "Polynomial"]) -> "Polynomial":
        """Replace variables by polynomials (simultaneously)."""
        if not mapping:
            return self
        subs = {}
        for key, val in mapping.items():
            idx = self.coords.index(key) if isinstance(key, str) else int(key)
            if not isinstance(val, Polynomial):
                val = Polynomial.constant(self.coords, val)
            subs[idx] = val
        mask = 0
        for idx in subs:
            mask |= EXP_MASK << (EXP_BITS * idx)
        one = Polynomial.constant(self.coords, 1)
        powers: dict[tuple[int, int], Polynomial] = {}
        grouped: dict[int, dict[int, Rational]] = {}
        for k, c in self._terms.items():
            sub_part = k & mask
            grouped.setdefault(sub_part, {})[k & ~mask] = c
        result = Polynomial(self.coords)
        for sub_part, rest in grouped.items():
            factor = one
            for idx, val in subs.items():
                e = (sub_part >> (EXP_BITS * idx)) & EXP_MASK
                if e:
                    p = powers.get((idx, e))
                    if p is None:
                        p = val ** e
                        powers[(idx, e)] = p
                    factor = factor * p
            result = result + Polynomial(self.coords, rest) * factor
        return result

    def scale_variables(self, factors: Mapping[int, Rational]) -> "Polynomial":
        """Substitute ``x_i -> f_i * x_i`` for rational factors."""
        fs = {int(i): to_rational(f) for i, f in factors.items()}
        out = {}
        for k, c in self._terms.items():
            for i, f in fs.items():
                e = (k >> (EXP_BITS * i)) & EXP_MASK
                if e:
                    c = c * f ** e
            if c:
                out[k] = c
        return Polynomial(self.coords, out)

    def shift(self, offsets: Mapping[int, object]) -> "Polynomial":
        """Substitute ``x_i -> x_i + c_i``."""
        subs = {}
        for i, c in offsets.items():
            q = to_rational(c)
            if q:
                idx = self.coords.index(i) if isinstance(i, str) else int(i)
                subs[idx] = Polynomial.variable(self.coords, idx) + q
        return self.substitute(subs)

    def truncate(self, max_degree: int) -> "Polynomial":
        """Drop every term of total degree above ``max_degree``."""
        return Polynomial(
            self.coords, {k: c for k, c in self._terms.items() if key_degree(k) <= max_degree}
        )

    def restrict(self, keep) -> "Polynomial":
        """Keep only terms whose exponent tuple satisfies ``keep``."""
        n = self.coords.n
        return Polynomial(
            self.coords, {k: c for k, c in self._terms.items() if keep(unpack(k, n))}
        )

    def coefficient_in(self, vars_: Iterable[int]) -> dict[tuple[int, ...], "Polynomial"]:
        """Group by the exponents of ``vars_``: monomial-in-vars -> coefficient polynomial."""
        vars_ = tuple(vars_)
        mask = 0
        for idx in vars_:
            mask |= EXP_MASK << (EXP_BITS * idx)
        groups: dict[int, dict[int, Rational]] = {}
        for k, c in self._terms.items():
            groups.setdefault(k & mask, {})[k & ~mask] = c
        out = {}
        for part, rest in groups.items():
            exps = tuple((part >> (EXP_BITS * idx)) & EXP_MASK for idx in vars_)
            out[exps] = Polynomial(self.coords, rest)
        return out

    # -- printing -------------------------------------------------------
    def __str__(self) -> str:
        from idegen.algebra.grammar import format_poly

        return format_poly(self)

    def __repr__(self) -> str:
        return f"Polynomial({str(self)!r})"

    def __iter__(self) -> Iterator[tuple[tuple[int, ...], Rational]]:
        return iter(self.terms())


def const(coords: CoordinateSystem, value) -> Polynomial:
    return Polynomial.constant(coords, value)


def var(coords: CoordinateSystem, name) -> Polynomial:
    return Polynomial.variable(coords, name)


def diff(p: Polynomial, c) -> Polynomial:
    return p.diff(c)


def eval_poly(p: Polynomial, point: Mapping) -> Rational:
    return p.evaluate(point)

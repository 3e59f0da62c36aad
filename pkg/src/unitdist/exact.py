"""Exact arithmetic over rational combinations of square roots.

An :class:`ExactReal` is ``sum(q_n * sqrt(n))`` over squarefree ``n >= 1`` with
rational ``q_n``; an :class:`ExactPoint` is a complex number with two such
parts.  Values are stored over a common positive denominator so that equality
and hashing reduce to tuple comparison.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping, Union

Rational = Union[int, Fraction]


@lru_cache(maxsize=None)
def squarefree_split(n: int) -> tuple[int, int]:
    """Return ``(s, f)`` with ``n == s*s*f`` and ``f`` squarefree."""
    if n <= 0:
        raise ValueError(f"expected a positive integer, got {n}")
    s, f = 1, 1
    p = 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        s *= p ** (e // 2)
        if e % 2:
            f *= p
        p += 1
    return s, f * n


def is_squarefree(n: int) -> bool:
    return n >= 1 and squarefree_split(n)[0] == 1


class ExactReal:
    """Immutable element of Q(sqrt(2), sqrt(3), sqrt(5), ...)."""

    __slots__ = ("_den", "_terms", "_hash", "_float")

    def __init__(self, terms: Mapping[int, Rational] | Rational | None = None):
        if terms is None:
            terms = {}
        elif not isinstance(terms, Mapping):
            terms = {1: terms}
        acc: dict[int, Fraction] = {}
        for n, q in terms.items():
            s, f = squarefree_split(int(n))
            acc[f] = acc.get(f, Fraction(0)) + Fraction(q) * s
        den = 1
        for q in acc.values():
            den = den * q.denominator // math.gcd(den, q.denominator)
        self._set(den, {n: int(q * den) for n, q in acc.items()})

    def _set(self, den: int, nums: Mapping[int, int]) -> None:
        items = sorted((n, c) for n, c in nums.items() if c)
        if not items:
            den = 1
        else:
            g = math.gcd(den, *(c for _, c in items))
            if g > 1:
                den //= g
                items = [(n, c // g) for n, c in items]
        self._den = den
        self._terms = tuple(items)
        self._hash = hash((den, self._terms))
        self._float = None

    @classmethod
    def _raw(cls, den: int, nums: Mapping[int, int]) -> ExactReal:
        obj = cls.__new__(cls)
        obj._set(den, nums)
        return obj

    @classmethod
    def sqrt(cls, n: int) -> ExactReal:
        """Exact square root of a non-negative integer."""
        if n == 0:
            return ZERO
        return cls({n: 1})

    @property
    def terms(self) -> dict[int, Fraction]:
        return {n: Fraction(c, self._den) for n, c in self._terms}

    def coefficient(self, n: int) -> Fraction:
        for m, c in self._terms:
            if m == n:
                return Fraction(c, self._den)
        return Fraction(0)

    def radicands(self) -> tuple[int, ...]:
        return tuple(n for n, _ in self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        return all(n == 1 for n, _ in self._terms)

    # -- arithmetic -------------------------------------------------------

    @staticmethod
    def _coerce(other: object) -> ExactReal | None:
        if isinstance(other, ExactReal):
            return other
        if isinstance(other, (int, Fraction)):
            return ExactReal(other)
        return None

    def __add__(self, other: object) -> ExactReal:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not o._terms:
            return self
        if not self._terms:
            return o
        d1, d2 = self._den, o._den
        g = math.gcd(d1, d2)
        m1, m2 = d2 // g, d1 // g
        acc = {n: c * m1 for n, c in self._terms}
        for n, c in o._terms:
            acc[n] = acc.get(n, 0) + c * m2
        return ExactReal._raw(d1 * m1, acc)

    __radd__ = __add__

    def __neg__(self) -> ExactReal:
        return ExactReal._raw(self._den, {n: -c for n, c in self._terms})

    def __sub__(self, other: object) -> ExactReal:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: object) -> ExactReal:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other: object) -> ExactReal:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not self._terms or not o._terms:
            return ZERO
        acc: dict[int, int] = {}
        for n1, c1 in self._terms:
            for n2, c2 in o._terms:
                # sqrt(m)*sqrt(n) = g*sqrt(mn/g^2) for squarefree m, n
                g = math.gcd(n1, n2)
                key = (n1 // g) * (n2 // g)
                acc[key] = acc.get(key, 0) + c1 * c2 * g
        return ExactReal._raw(self._den * o._den, acc)

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> ExactReal:
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division of ExactReal by zero")
            return self * (1 / Fraction(other))
        return NotImplemented

    def conjugate_by(self, prime: int) -> ExactReal:
        """Field automorphism sending ``sqrt(prime) -> -sqrt(prime)``."""
        return ExactReal._raw(
            self._den, {n: (-c if n % prime == 0 else c) for n, c in self._terms}
        )

    # -- comparison -------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._den == o._den and self._terms == o._terms

    def __hash__(self) -> int:
        return self._hash

    def sign(self) -> int:
        return er_sign(self)

    def __lt__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return er_sign(self - o) < 0

    def __le__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return er_sign(self - o) <= 0

    def __gt__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return er_sign(self - o) > 0

    def __ge__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return er_sign(self - o) >= 0

    def __float__(self) -> float:
        if self._float is None:
            self._float = sum(c * math.sqrt(n) for n, c in self._terms) / self._den
        return self._float

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __repr__(self) -> str:
        return f"ExactReal({format_real(self)!r})"

    def __str__(self) -> str:
        return format_real(self)

    def __reduce__(self):
        return (ExactReal, (self.terms,))


ZERO = ExactReal()
ONE = ExactReal(1)


def er_arith(op: str, x: ExactReal, y: ExactReal) -> ExactReal:
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    raise ValueError(f"unknown operation {op!r}")


def interval(x: ExactReal, bits: int) -> tuple[Fraction, Fraction]:
    """Rigorous enclosure of ``x`` using integer square roots at ``bits`` precision."""
    lo = hi = 0
    for n, c in x._terms:
        scaled = n << (2 * bits)
        r = math.isqrt(scaled)
        r_hi = r if r * r == scaled else r + 1
        if c > 0:
            lo += c * r
            hi += c * r_hi
        else:
            lo += c * r_hi
            hi += c * r
    scale = x._den << bits
    return Fraction(lo, scale), Fraction(hi, scale)


def er_sign(x: ExactReal) -> int:
    """Exact sign of ``x``.

    Zero is detected symbolically; a nonzero value is bracketed by intervals of
    doubling precision until the bracket excludes zero.
    """
    if not x._terms:
        return 0
    if len(x._terms) == 1:
        return 1 if x._terms[0][1] > 0 else -1
    bits = 64
    while True:
        lo, hi = interval(x, bits)
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        bits *= 2


# -- points -----------------------------------------------------------------


class ExactPoint:
    __slots__ = ("re", "im", "_hash", "_approx")

    def __init__(self, re: ExactReal | Rational = 0, im: ExactReal | Rational = 0):
        self.re = re if isinstance(re, ExactReal) else ExactReal(re)
        self.im = im if isinstance(im, ExactReal) else ExactReal(im)
        self._hash = hash((self.re, self.im))
        self._approx = None

    def __add__(self, other: ExactPoint) -> ExactPoint:
        return ExactPoint(self.re + other.re, self.im + other.im)

    def __sub__(self, other: ExactPoint) -> ExactPoint:
        return ExactPoint(self.re - other.re, self.im - other.im)

    def __neg__(self) -> ExactPoint:
        return ExactPoint(-self.re, -self.im)

    def __mul__(self, other: object) -> ExactPoint:
        if isinstance(other, ExactPoint):
            return pt_mul(self, other)
        if isinstance(other, (int, Fraction, ExactReal)):
            return ExactPoint(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def conj(self) -> ExactPoint:
        """Complex conjugate (reflection in the real axis)."""
        return ExactPoint(self.re, -self.im)

    def conjugate_by(self, prime: int) -> ExactPoint:
        return ExactPoint(self.re.conjugate_by(prime), self.im.conjugate_by(prime))

    def norm_sq(self) -> ExactReal:
        return self.re * self.re + self.im * self.im

    @property
    def approx(self) -> complex:
        if self._approx is None:
            self._approx = complex(float(self.re), float(self.im))
        return self._approx

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExactPoint):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"ExactPoint({format_point(self)!r})"

    def __str__(self) -> str:
        return format_point(self)

    def __reduce__(self):
        return (ExactPoint, (self.re, self.im))


ORIGIN = ExactPoint(0, 0)


def pt_mul(p: ExactPoint, q: ExactPoint) -> ExactPoint:
    return ExactPoint(p.re * q.re - p.im * q.im, p.re * q.im + p.im * q.re)


def dist_sq(p: ExactPoint, q: ExactPoint) -> ExactReal:
    dx = p.re - q.re
    dy = p.im - q.im
    return dx * dx + dy * dy


def is_unit(p: ExactPoint, q: ExactPoint) -> bool:
    return dist_sq(p, q) == ONE


# -- rotors -----------------------------------------------------------------


@dataclass(frozen=True)
class Rotor:
    """A point transform: multiplication by ``multiplier`` or a field map."""

    name: str
    multiplier: ExactPoint | None = None
    mapping: Callable[[ExactPoint], ExactPoint] | None = None

    def apply(self, p: ExactPoint) -> ExactPoint:
        if self.multiplier is not None:
            return pt_mul(self.multiplier, p)
        return self.mapping(p)

    def power(self, k: int) -> Rotor:
        if self.multiplier is None:
            if k % 2 == 0:
                return Rotor(f"{self.name}^{k}", multiplier=ExactPoint(1))
            return self
        m = ExactPoint(1)
        base = self.multiplier if k >= 0 else inverse_unit(self.multiplier, self.name)
        for _ in range(abs(k)):
            m = pt_mul(m, base)
        return Rotor(f"{self.name}^{k}", multiplier=m)


def inverse_unit(p: ExactPoint, name: str = "") -> ExactPoint:
    """Inverse of a multiplier via ``conj(p)/|p|^2`` (``|p|^2`` must be rational)."""
    n = p.norm_sq()
    if not n.is_rational() or n.is_zero():
        raise ValueError(f"cannot invert multiplier {name or p}")
    return p.conj() * (1 / n.coefficient(1))


def _conj_sqrt33(p: ExactPoint) -> ExactPoint:
    # sqrt(33) -> -sqrt(33) with sqrt(3) fixed forces sqrt(11) -> -sqrt(11)
    return p.conjugate_by(11)


_S3 = ExactReal.sqrt(3)

ROTORS: dict[str, Rotor] = {
    "eta": Rotor("eta", ExactPoint(ExactReal({33: Fraction(1, 6)}), ExactReal({3: Fraction(1, 6)}))),
    "eta_inv": Rotor("eta_inv", ExactPoint(ExactReal({33: Fraction(1, 6)}), ExactReal({3: Fraction(-1, 6)}))),
    "rho": Rotor("rho", ExactPoint(Fraction(7, 8), ExactReal({15: Fraction(1, 8)}))),
    "rho_inv": Rotor("rho_inv", ExactPoint(Fraction(7, 8), ExactReal({15: Fraction(-1, 8)}))),
    "i": Rotor("i", ExactPoint(0, 1)),
    "i_over_sqrt3": Rotor("i_over_sqrt3", ExactPoint(0, ExactReal({3: Fraction(1, 3)}))),
    "omega": Rotor("omega", ExactPoint(Fraction(1, 2), ExactReal({3: Fraction(1, 2)}))),
    "conj_sqrt33": Rotor("conj_sqrt33", mapping=_conj_sqrt33),
}


def rotor(name: str) -> Rotor:
    try:
        return ROTORS[name]
    except KeyError:
        raise ValueError(f"unknown rotor {name!r}; expected one of {sorted(ROTORS)}") from None


# -- text format ------------------------------------------------------------


def _format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_real(x: ExactReal) -> str:
    if x.is_zero():
        return "0"
    parts: list[str] = []
    for n, q in sorted(x.terms.items()):
        neg = q < 0
        a = -q if neg else q
        if n == 1:
            body = _format_rational(a)
        elif a == 1:
            body = f"sqrt({n})"
        else:
            body = f"{_format_rational(a)}*sqrt({n})"
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append(("- " if neg else "+ ") + body)
    return " ".join(parts)


def format_point(p: ExactPoint) -> str:
    return f"({format_real(p.re)}; {format_real(p.im)})"


class ParseError(ValueError):
    """Malformed exact-number text; ``column`` is 1-based."""

    def __init__(self, message: str, column: int = 0, line: int = 0):
        self.message = message
        self.column = column
        self.line = line
        where = f"line {line}, " if line else ""
        super().__init__(f"{where}column {column}: {message}" if column else message)


_TERM = re.compile(
    r"\s*(?P<sign>[+-])?\s*"
    r"(?:(?P<num>\d+)(?:/(?P<den>\d+))?(?:\s*\*\s*sqrt\(\s*(?P<rad1>\d+)\s*\))?"
    r"|sqrt\(\s*(?P<rad2>\d+)\s*\))\s*"
)


def parse_real(text: str, offset: int = 0, strict: bool = True) -> ExactReal:
    """Parse ``q0 + q1*sqrt(n1) + ...``.

    With ``strict`` set, rationals must be in lowest terms and radicands
    squarefree, so every accepted string is already canonical.
    """
    pos = 0
    terms: dict[int, Fraction] = {}
    first = True
    if not text.strip():
        raise ParseError("empty number", offset + 1)
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos or (m.group("num") is None and m.group("rad2") is None):
            raise ParseError(f"unexpected text {text[pos:pos + 12]!r}", offset + pos + 1)
        if m.group("sign") is None and not first:
            raise ParseError("expected '+' or '-' between terms", offset + m.start() + 1)
        col = offset + m.start() + 1
        sign = -1 if m.group("sign") == "-" else 1
        if m.group("num") is not None:
            num = int(m.group("num"))
            den = int(m.group("den")) if m.group("den") else 1
            if den == 0:
                raise ParseError("zero denominator", col)
            if strict and m.group("den") and (math.gcd(num, den) != 1 or den == 1):
                raise ParseError(f"non-canonical rational {num}/{den}", col)
            coef = Fraction(sign * num, den)
            rad = int(m.group("rad1")) if m.group("rad1") else 1
        else:
            coef = Fraction(sign)
            rad = int(m.group("rad2"))
        if rad == 0:
            raise ParseError("sqrt(0) is not allowed", col)
        if strict and not is_squarefree(rad):
            raise ParseError(f"radicand {rad} is not squarefree", col)
        s, f = squarefree_split(rad)
        if strict and f in terms:
            raise ParseError(f"repeated radicand {f}", col)
        terms[f] = terms.get(f, Fraction(0)) + coef * s
        first = False
        pos = m.end()
    return ExactReal(terms)


def parse_point(text: str, offset: int = 0, strict: bool = True) -> ExactPoint:
    s = text.strip()
    lead = len(text) - len(text.lstrip())
    if not (s.startswith("(") and s.endswith(")")):
        raise ParseError("point must look like '(<re>; <im>)'", offset + lead + 1)
    inner = s[1:-1]
    if inner.count(";") != 1:
        raise ParseError("point needs exactly one ';'", offset + lead + 1)
    re_text, im_text = inner.split(";")
    base = offset + lead + 1
    return ExactPoint(
        parse_real(re_text, base, strict),
        parse_real(im_text, base + len(re_text) + 1, strict),
    )


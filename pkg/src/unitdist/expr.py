"""A small expression language for building unit-distance graphs.

Grammar (``+`` is union, ``(+)`` is Minkowski sum and binds tighter)::

    expr    := msum ("+" msum)*
    msum    := term ("(+)" term)*
    term    := [scalar "*" ...] atom ["^" rotspec]
    scalar  := "i" | "eta" ["^" int] | "rho" ["^" int] | "i/sqrt3" | "sqrt3"
               | rational | "(" scalar ("*" scalar)* ")"
    rotspec := uint | "{" int ("," int)* "}"
    atom    := NAME | "(" expr ")" | "trim(" expr "," rational ")"
               | "[" point ("," point)* "]"

``H^m`` is the union of ``eta^a * H`` for ``a`` in ``-m..m``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .exact import ExactPoint, ExactReal, ParseError, parse_point, pt_mul, rotor
from .graph import (
    NAMED_GRAPHS,
    UnitGraph,
    from_points,
    minkowski,
    named_graph,
    rotation_set,
    trim,
)


@dataclass(frozen=True)
class Named:
    name: str


@dataclass(frozen=True)
class Points:
    points: tuple[ExactPoint, ...]


@dataclass(frozen=True)
class Scaled:
    factor: ExactPoint
    label: str
    arg: "Node"


@dataclass(frozen=True)
class Rotated:
    arg: "Node"
    exponents: tuple[int, ...]


@dataclass(frozen=True)
class Union_:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Minkowski:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Trim:
    arg: "Node"
    r_sq: Fraction


Node = Union[Named, Points, Scaled, Rotated, Union_, Minkowski, Trim]

_TOKEN = re.compile(
    r"\s*(?:(?P<oplus>\(\+\))|(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<punct>[-+*/^(){},\[\]]))"
)

class ExprError(ParseError):
    pass


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(src: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos = 0
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        if src[pos:].lstrip().startswith("["):
            # point list: scan raw text up to the matching ']'
            start = src.index("[", pos)
            end = src.find("]", start)
            if end < 0:
                raise ExprError("unterminated point list", start + 1)
            toks.append(_Tok("points", src[start + 1 : end], start + 1))
            pos = end + 1
            continue
        m = _TOKEN.match(src, pos)
        if not m:
            raise ExprError(f"unexpected character {src[pos:].lstrip()[:1]!r}", pos + 1)
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(_Tok("end", "", len(src)))
    return toks


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.toks = _tokenize(src)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: _Tok | None = None) -> ExprError:
        tok = tok or self.tok
        return ExprError(msg, tok.pos + 1)

    def accept(self, text: str) -> bool:
        if self.tok.text == text and self.tok.kind in ("punct", "oplus", "name"):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            raise self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            raise self.error(f"unexpected {self.tok.text!r}")
        return node

    def expr(self) -> Node:
        node = self.msum()
        while self.tok.kind == "punct" and self.tok.text == "+":
            self.i += 1
            node = Union_(node, self.msum())
        return node

    def msum(self) -> Node:
        node = self.term()
        while self.tok.kind == "oplus":
            self.i += 1
            node = Minkowski(node, self.term())
        return node

    def term(self) -> Node:
        factors: list[tuple[ExactPoint, str]] = []
        while True:
            save = self.i
            sc = self.try_scalar()
            if sc is not None and self.accept("*"):
                factors.append(sc)
                continue
            self.i = save
            break
        node = self.atom()
        if self.accept("^"):
            node = Rotated(node, self.rotspec())
        for factor, label in reversed(factors):
            node = Scaled(factor, label, node)
        return node

    def try_scalar(self) -> tuple[ExactPoint, str] | None:
        t = self.tok
        if t.kind == "num":
            q = self.rational()
            return ExactPoint(q, 0), str(q)
        if t.kind == "name":
            if t.text == "i":
                self.i += 1
                if self.tok.text == "/" and self.peek().text == "sqrt3":
                    self.i += 2
                    return rotor("i_over_sqrt3").multiplier, "i/sqrt3"
                return rotor("i").multiplier, "i"
            if t.text == "sqrt3":
                self.i += 1
                return ExactPoint(ExactReal.sqrt(3), 0), "sqrt3"
            if t.text in ("eta", "rho"):
                self.i += 1
                k = 1
                if self.accept("^"):
                    k = self.signed_int()
                return rotor(t.text).power(k).multiplier, f"{t.text}^{k}"
            return None
        if t.kind == "punct" and t.text == "(":
            save = self.i
            self.i += 1
            acc = ExactPoint(1, 0)
            labels = []
            while True:
                sc = self.try_scalar()
                if sc is None:
                    self.i = save
                    return None
                acc = pt_mul(acc, sc[0])
                labels.append(sc[1])
                if self.accept("*"):
                    continue
                if self.accept(")"):
                    return acc, "*".join(labels)
                self.i = save
                return None
        return None

    def rational(self) -> Fraction:
        t = self.tok
        if t.kind != "num":
            raise self.error("expected a rational number")
        self.i += 1
        num = int(t.text)
        if self.tok.text == "/" and self.peek().kind == "num":
            self.i += 1
            den = int(self.tok.text)
            if den == 0:
                raise self.error("zero denominator")
            self.i += 1
            return Fraction(num, den)
        return Fraction(num)

    def signed_int(self) -> int:
        neg = self.accept("-")
        if self.tok.kind != "num":
            raise self.error("expected an integer")
        v = int(self.tok.text)
        self.i += 1
        return -v if neg else v

    def rotspec(self) -> tuple[int, ...]:
        if self.tok.kind == "num":
            m = int(self.tok.text)
            self.i += 1
            return tuple(range(-m, m + 1))
        if self.accept("{"):
            vals = [self.signed_int()]
            while self.accept(","):
                vals.append(self.signed_int())
            self.expect("}")
            return tuple(vals)
        raise self.error("malformed rotation set; expected m or {a,b,...}")

    def atom(self) -> Node:
        t = self.tok
        if t.kind == "points":
            self.i += 1
            return Points(tuple(_parse_point_list(t.text, t.pos)))
        if t.kind == "name" and t.text == "trim" and self.peek().text == "(":
            self.i += 2
            arg = self.expr()
            self.expect(",")
            r = self.rational()
            self.expect(")")
            return Trim(arg, r)
        if t.kind == "name":
            if t.text not in NAMED_GRAPHS:
                raise self.error(f"unknown graph name {t.text!r}")
            self.i += 1
            return Named(t.text)
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        raise self.error(f"expected a graph, found {t.text or 'end of input'!r}")


def _parse_point_list(text: str, offset: int) -> list[ExactPoint]:
    pts = []
    depth = 0
    start = 0
    for k, ch in enumerate(text + ","):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            chunk = text[start:k]
            if chunk.strip():
                pts.append(parse_point(chunk, offset + start))
            start = k + 1
    return pts


def parse(src: str) -> Node:
    return _Parser(src).parse()


def evaluate(node: Node) -> UnitGraph:
    if isinstance(node, Named):
        return named_graph(node.name)
    if isinstance(node, Points):
        return from_points(node.points)
    if isinstance(node, Scaled):
        return evaluate(node.arg).scale(node.factor)
    if isinstance(node, Rotated):
        return rotation_set(evaluate(node.arg), node.exponents)
    if isinstance(node, Union_):
        return evaluate(node.left).union(evaluate(node.right))
    if isinstance(node, Minkowski):
        return minkowski(evaluate(node.left), evaluate(node.right))
    if isinstance(node, Trim):
        return trim(evaluate(node.arg), node.r_sq)
    raise TypeError(f"not an expression node: {node!r}")


def construct(expr: str | Node) -> UnitGraph:
    node = parse(expr) if isinstance(expr, str) else expr
    return evaluate(node)

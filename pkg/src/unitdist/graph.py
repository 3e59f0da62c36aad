"""Strict unit-distance graphs over exact points."""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .exact import (
    ORIGIN,
    ExactPoint,
    ExactReal,
    Rotor,
    er_sign,
    format_point,
    is_unit,
    pt_mul,
    rotor,
)

# float shortlist tolerance; every candidate is confirmed exactly
SHORTLIST_EPS = 1e-6


def _cmp_points(a: tuple[float, ExactReal, str], b: tuple[float, ExactReal, str]) -> int:
    fa, ra, sa = a
    fb, rb, sb = b
    if abs(fa - fb) > 1e-9 * max(1.0, abs(fa), abs(fb)):
        return -1 if fa < fb else 1
    s = er_sign(ra - rb)
    if s:
        return s
    return (sa > sb) - (sa < sb)


def canonical_order(points: Iterable[ExactPoint]) -> list[ExactPoint]:
    """Deduplicate and sort by |v|^2, then by serialized form."""
    uniq = list(dict.fromkeys(points))
    keyed = []
    for p in uniq:
        r = p.norm_sq()
        keyed.append(((float(r), r, format_point(p)), p))
    keyed.sort(key=functools.cmp_to_key(lambda x, y: _cmp_points(x[0], y[0])))
    return [p for _, p in keyed]


def unit_pairs(points: Sequence[ExactPoint], audit: bool = False) -> list[tuple[int, int]]:
    """All index pairs at exactly unit distance.

    The default path shortlists pairs with a k-d tree on float coordinates and
    confirms each candidate exactly; ``audit`` checks every pair exactly.
    """
    n = len(points)
    if n < 2:
        return []
    if audit:
        return [
            (i, j) for i in range(n) for j in range(i + 1, n) if is_unit(points[i], points[j])
        ]
    xy = np.array([[p.approx.real, p.approx.imag] for p in points])
    tree = cKDTree(xy)
    cand = tree.query_pairs(1.0 + SHORTLIST_EPS, output_type="ndarray")
    if len(cand) == 0:
        return []
    d = np.hypot(*(xy[cand[:, 0]] - xy[cand[:, 1]]).T)
    cand = cand[d >= 1.0 - SHORTLIST_EPS]
    out = []
    for i, j in cand.tolist():
        if is_unit(points[i], points[j]):
            out.append((i, j) if i < j else (j, i))
    out.sort()
    return out


class UnitGraph:
    """Immutable strict unit-distance graph.

    Vertices are distinct exact points in canonical order; ``edges`` holds
    every pair at unit distance and nothing else.
    """

    __slots__ = ("vertices", "edges", "_index", "_adj")

    def __init__(self, vertices: Sequence[ExactPoint], edges: Sequence[tuple[int, int]]):
        self.vertices: tuple[ExactPoint, ...] = tuple(vertices)
        self.edges: tuple[tuple[int, int], ...] = tuple(edges)
        self._index: dict[ExactPoint, int] | None = None
        self._adj: list[list[int]] | None = None

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    def __len__(self) -> int:
        return len(self.vertices)

    def __contains__(self, p: object) -> bool:
        return p in self.index

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UnitGraph):
            return NotImplemented
        return self.vertices == other.vertices

    def __hash__(self) -> int:
        return hash(self.vertices)

    def __repr__(self) -> str:
        return f"UnitGraph(n={self.n}, m={self.m})"

    @property
    def index(self) -> dict[ExactPoint, int]:
        if self._index is None:
            self._index = {p: i for i, p in enumerate(self.vertices)}
        return self._index

    def index_of(self, p: ExactPoint) -> int:
        try:
            return self.index[p]
        except KeyError:
            raise KeyError(f"point {format_point(p)} is not a vertex") from None

    @property
    def adjacency(self) -> list[list[int]]:
        if self._adj is None:
            adj: list[list[int]] = [[] for _ in range(self.n)]
            for i, j in self.edges:
                adj[i].append(j)
                adj[j].append(i)
            self._adj = adj
        return self._adj

    def degrees(self) -> list[int]:
        return [len(a) for a in self.adjacency]

    def point_set(self) -> frozenset[ExactPoint]:
        return frozenset(self.vertices)

    def induced(self, keep: Iterable[int]) -> UnitGraph:
        """Induced subgraph on vertex indices (stays strict and canonical)."""
        keep = sorted(set(keep))
        remap = {old: new for new, old in enumerate(keep)}
        edges = [
            (remap[i], remap[j]) for i, j in self.edges if i in remap and j in remap
        ]
        return UnitGraph([self.vertices[i] for i in keep], edges)

    def without(self, deleted: Iterable[int]) -> UnitGraph:
        gone = set(deleted)
        return self.induced(i for i in range(self.n) if i not in gone)

    def transform(self, r: Rotor | str) -> UnitGraph:
        if isinstance(r, str):
            r = rotor(r)
        return from_points(r.apply(p) for p in self.vertices)

    def scale(self, s: ExactPoint | ExactReal | Fraction | int) -> UnitGraph:
        if isinstance(s, ExactPoint):
            return from_points(pt_mul(s, p) for p in self.vertices)
        return from_points(p * s for p in self.vertices)

    def union(self, *others: UnitGraph) -> UnitGraph:
        pts = list(self.vertices)
        for o in others:
            pts.extend(o.vertices)
        return from_points(pts)

    def audit(self) -> bool:
        """Re-scan all pairs exactly and compare with the stored edge set."""
        return list(self.edges) == unit_pairs(self.vertices, audit=True)


def from_points(points: Iterable[ExactPoint], audit: bool = False) -> UnitGraph:
    verts = canonical_order(points)
    return UnitGraph(verts, unit_pairs(verts, audit=audit))


def empty_graph() -> UnitGraph:
    return UnitGraph([], [])


def minkowski(g1: UnitGraph, g2: UnitGraph) -> UnitGraph:
    sums = {p + q for p in g1.vertices for q in g2.vertices}
    return from_points(sums)


def minkowski_power(g: UnitGraph, n: int) -> UnitGraph:
    if n < 1:
        raise ValueError("Minkowski power needs n >= 1")
    pts = set(g.vertices)
    for _ in range(n - 1):
        pts = {p + q for p in pts for q in g.vertices}
    return from_points(pts)


def rotation_set(g: UnitGraph, exponents: Iterable[int], base: str = "eta") -> UnitGraph:
    """Union of ``base^a * g`` over the given exponents."""
    r = rotor(base)
    pts: list[ExactPoint] = []
    for a in sorted(set(exponents)):
        mult = r.power(a)
        pts.extend(mult.apply(p) for p in g.vertices)
    return from_points(pts)


def trim(g: UnitGraph, r_sq: ExactReal | Fraction | int) -> UnitGraph:
    if not isinstance(r_sq, ExactReal):
        r_sq = ExactReal(r_sq)
    if er_sign(r_sq) < 0:
        raise ValueError("trim radius must be non-negative")
    return g.induced(i for i, p in enumerate(g.vertices) if er_sign(p.norm_sq() - r_sq) <= 0)


# -- named graphs -----------------------------------------------------------

_HALF = Fraction(1, 2)
_SQRT3_2 = ExactReal({3: _HALF})


def wheel_points() -> list[ExactPoint]:
    return [
        ORIGIN,
        ExactPoint(1, 0),
        ExactPoint(-1, 0),
        ExactPoint(_HALF, _SQRT3_2),
        ExactPoint(_HALF, -_SQRT3_2),
        ExactPoint(-_HALF, _SQRT3_2),
        ExactPoint(-_HALF, -_SQRT3_2),
    ]


def rhombus_points() -> list[ExactPoint]:
    # two unit triangles sharing the edge (1, omega); tips 0 and 1+omega are sqrt(3) apart
    a = ExactPoint(1, 0)
    b = ExactPoint(_HALF, _SQRT3_2)
    return [ORIGIN, a, b, a + b]


@functools.lru_cache(maxsize=None)
def named_graph(name: str) -> UnitGraph:
    """Graphs addressable by name in expressions."""
    if name == "H":
        return from_points(wheel_points())
    if name == "D":
        return from_points(rhombus_points())
    if name == "MOSER":
        d = named_graph("D")
        return d.union(d.transform(rotor("eta").power(2)))
    h = named_graph("H")
    i3 = rotor("i_over_sqrt3")
    if name == "V25":
        return rotation_set(h, range(-1, 2)).union(h.transform(i3))
    if name == "V31":
        return rotation_set(h, range(-2, 3))
    if name == "V31S":
        # factor of the small subgraph S361: H^1 | i*sqrt(3)*H^{-1,1}
        side = rotation_set(h, (-1, 1)).scale(ExactPoint(0, ExactReal.sqrt(3)))
        return rotation_set(h, range(-1, 2)).union(side)
    if name == "V37":
        h1 = rotation_set(h, range(-1, 2))
        return h1.union(h1.transform(i3))
    if name == "V37T":
        h1 = rotation_set(h, range(-1, 2))
        return h1.union(h1.transform(rotor("rho")))
    if name == "V49":
        h1 = rotation_set(h, range(-1, 2))
        return rotation_set(h, range(-2, 3)).union(h1.transform(i3))
    raise KeyError(f"unknown graph name {name!r}")


NAMED_GRAPHS = ("H", "D", "MOSER", "V25", "V31", "V31S", "V37", "V37T", "V49")


# -- type M assembly --------------------------------------------------------

REFERENCE_R2 = ExactReal(4)
AUX_R2 = (
    ExactReal({1: Fraction(17, 6), 33: Fraction(1, 6)}),
    ExactReal({1: Fraction(17, 6), 33: Fraction(-1, 6)}),
)


@dataclass
class ConnectionReport:
    """Cross edges between ``L`` and ``rho*S`` in an assembled type-M graph.

    Each edge is stored as ``(p, q)`` with ``p`` a vertex of ``L`` and ``q`` a
    vertex of ``S`` in its own (unrotated) frame.
    """

    reference: list[tuple[ExactPoint, ExactPoint]] = field(default_factory=list)
    auxiliary: list[tuple[ExactPoint, ExactPoint]] = field(default_factory=list)
    other: list[tuple[ExactPoint, ExactPoint]] = field(default_factory=list)

    @property
    def n_auxiliary(self) -> int:
        return len(self.auxiliary)


def assemble_type_m(L: UnitGraph, S: UnitGraph, multiplier: str = "rho") -> tuple[UnitGraph, ConnectionReport]:
    """Strict union ``L | multiplier*S`` plus a classification of its cross edges."""
    if ORIGIN not in L or ORIGIN not in S:
        raise ValueError("both subgraphs must contain the origin (the shared vertex)")
    r = rotor(multiplier)
    rS = {r.apply(q): q for q in S.vertices}
    g = from_points(list(L.vertices) + list(rS))
    l_only = L.point_set() - rS.keys()
    s_only = rS.keys() - L.point_set()
    report = ConnectionReport()
    for i, j in g.edges:
        p, q = g.vertices[i], g.vertices[j]
        if p in s_only and q in l_only:
            p, q = q, p
        elif not (p in l_only and q in s_only):
            continue
        rp, rq = p.norm_sq(), q.norm_sq()
        if rp == REFERENCE_R2 and rq == REFERENCE_R2:
            report.reference.append((p, rS[q]))
        elif rp in AUX_R2 and rq in AUX_R2:
            report.auxiliary.append((p, rS[q]))
        else:
            report.other.append((p, rS[q]))
    return g, report


# Patterns for six auxiliary edges, keyed by subtype label.  Each value is a
# canonical signature from ``m6_signature``.
M6_PATTERNS: dict[str, tuple] = {}


def m6_signature(report: ConnectionReport) -> tuple:
    """Configuration of auxiliary edges up to the order-24 base symmetry group.

    The group acts simultaneously on both endpoints of every auxiliary edge;
    the least image (as a sorted tuple of base-coordinate pairs) is returned.
    """
    from .symmetry import TAU_GROUP, to_base_coord

    pairs = [(to_base_coord(p).abcd, to_base_coord(q).abcd) for p, q in report.auxiliary]
    best = None
    for g in TAU_GROUP:
        img = tuple(sorted((g.apply(a), g.apply(b)) for a, b in pairs))
        if best is None or img < best:
            best = img
    return best or ()


def register_m6_pattern(label: str, report: ConnectionReport) -> None:
    M6_PATTERNS[label] = m6_signature(report)


def classify_m_subtype(report: ConnectionReport) -> str:
    n = report.n_auxiliary
    if n == 12:
        return "M12"
    if n == 10:
        return "M10"
    if n == 3:
        return "M3"
    if n == 6 and M6_PATTERNS:
        sig = m6_signature(report)
        for label, pattern in M6_PATTERNS.items():
            if pattern == sig:
                return label
    return f"other({n})"

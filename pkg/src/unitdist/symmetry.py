"""Base coordinates, orbit structure and geometric symmetry groups.

Vertices of the base graphs live in the lattice of points
``(a + b*sqrt(33) + i*(c*sqrt(3) + d*sqrt(11))) / (4*3^h)``.  The order-24 group
acting on these coordinates is generated by a rotation through 2*pi/3, the two
axis reflections and the field conjugation sqrt(33) -> -sqrt(33).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key, lru_cache
from typing import Iterable, Sequence

from .exact import ExactPoint, ExactReal, er_sign, pt_mul, rotor
from .graph import UnitGraph, named_graph, rotation_set

Coord = tuple[int, int, int, int]


# -- base coordinates -------------------------------------------------------


@dataclass(frozen=True, order=True)
class BaseCoord:
    a: int
    b: int
    c: int
    d: int
    h: int = 1

    @property
    def abcd(self) -> Coord:
        return (self.a, self.b, self.c, self.d)

    def is_valid(self) -> bool:
        return self.h != 1 or (self.a - self.b + self.c + self.d) % 4 == 0

    def to_point(self) -> ExactPoint:
        den = 4 * 3**self.h
        re = ExactReal({1: Fraction(self.a, den), 33: Fraction(self.b, den)})
        im = ExactReal({3: Fraction(self.c, den), 11: Fraction(self.d, den)})
        return ExactPoint(re, im)

    def __str__(self) -> str:
        return f"({self.a},{self.b},{self.c},{self.d})"


def to_base_coord(p: ExactPoint, h: int = 1) -> BaseCoord:
    """Recover integer base coordinates; raises ``ValueError`` when ``p`` has none.

    A point lacks a form at level ``h`` if its real part uses radicals other
    than 1 and sqrt(33), its imaginary part radicals other than sqrt(3) and
    sqrt(11), or if scaling by ``4*3^h`` leaves a fractional coefficient.
    """
    if set(p.re.radicands()) - {1, 33} or set(p.im.radicands()) - {3, 11}:
        raise ValueError(f"{p} is not in Q(sqrt3, sqrt11) base form")
    den = 4 * 3**h
    vals = [
        p.re.coefficient(1) * den,
        p.re.coefficient(33) * den,
        p.im.coefficient(3) * den,
        p.im.coefficient(11) * den,
    ]
    if any(v.denominator != 1 for v in vals):
        raise ValueError(f"{p} needs a larger denominator than 4*3^{h}")
    return BaseCoord(*(int(v) for v in vals), h=h)


def base_form(p: ExactPoint, max_h: int = 4) -> BaseCoord | None:
    """Smallest-``h`` base coordinate of ``p``, or ``None`` if there is none."""
    for h in range(max_h + 1):
        try:
            return to_base_coord(p, h)
        except ValueError:
            continue
    return None


# -- the tau transforms -----------------------------------------------------

# Matrices scaled by 2 (entries are halves).  The rotations are derived from
# multiplication by exp(+-2*pi*i/3) in the coordinate basis.
_TAU2: tuple[tuple[tuple[int, ...], ...], ...] = (
    ((2, 0, 0, 0), (0, 2, 0, 0), (0, 0, 2, 0), (0, 0, 0, 2)),
    ((-1, 0, -3, 0), (0, -1, 0, -1), (1, 0, -1, 0), (0, 3, 0, -1)),
    ((-1, 0, 3, 0), (0, -1, 0, 1), (-1, 0, -1, 0), (0, -3, 0, -1)),
    ((-2, 0, 0, 0), (0, -2, 0, 0), (0, 0, 2, 0), (0, 0, 0, 2)),
    ((2, 0, 0, 0), (0, 2, 0, 0), (0, 0, -2, 0), (0, 0, 0, -2)),
    ((2, 0, 0, 0), (0, -2, 0, 0), (0, 0, 2, 0), (0, 0, 0, -2)),
)


@dataclass(frozen=True)
class TauElement:
    """Integer 4x4 matrix over 2, acting on ``(a, b, c, d)``."""

    m2: tuple[tuple[int, ...], ...]

    def apply(self, v: Coord) -> Coord:
        out = []
        for row in self.m2:
            s = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3]
            if s % 2:
                raise ValueError(f"transform leaves non-integral coordinate for {v}")
            out.append(s // 2)
        return tuple(out)

    def __matmul__(self, other: TauElement) -> TauElement:
        rows = []
        for i in range(4):
            rows.append(
                tuple(sum(self.m2[i][k] * other.m2[k][j] for k in range(4)) // 2 for j in range(4))
            )
        return TauElement(tuple(rows))


TAUS = tuple(TauElement(m) for m in _TAU2)


def tau_apply(k: int, v: BaseCoord) -> BaseCoord:
    if not 0 <= k <= 5:
        raise ValueError(f"tau index must be 0..5, got {k}")
    return BaseCoord(*TAUS[k].apply(v.abcd), h=v.h)


def _close(gens: Sequence[TauElement]) -> tuple[TauElement, ...]:
    ident = TAUS[0]
    seen = {ident.m2: ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = g @ x
                if y.m2 not in seen:
                    seen[y.m2] = y
                    nxt.append(y)
        frontier = nxt
    return tuple(seen[k] for k in sorted(seen))


TAU_GROUP: tuple[TauElement, ...] = _close([TAUS[1], TAUS[3], TAUS[4], TAUS[5]])


def _coord_key(v: Coord) -> tuple:
    return (sum(1 for x in v if x), sum(1 for x in v if x < 0), v)


@lru_cache(maxsize=None)
def orbit_members(v: Coord) -> tuple[Coord, ...]:
    """Full orbit of ``v`` under the 24-element group, in display order."""
    return tuple(sorted({g.apply(v) for g in TAU_GROUP}, key=_coord_key))


def orbit_label(v: Coord) -> Coord:
    return orbit_members(v)[0]


def _radius_sq(v: Coord, h: int) -> ExactReal:
    return BaseCoord(*v, h=h).to_point().norm_sq()


@dataclass
class Orbit:
    """A base orbit: its label, its full member list and the members present."""

    representative: BaseCoord
    members: list[BaseCoord]
    full: tuple[BaseCoord, ...] = ()

    @property
    def order(self) -> int:
        return len(self.full) if self.full else len(self.members)

    @property
    def is_filled(self) -> bool:
        return len(self.members) == self.order

    def min_radius_sq(self) -> ExactReal:
        """Smaller of the two radii (the point and its sqrt(33) conjugate)."""
        r = self.representative
        r1 = _radius_sq(r.abcd, r.h)
        r2 = _radius_sq(TAUS[5].apply(r.abcd), r.h)
        return r1 if er_sign(r1 - r2) <= 0 else r2

    def points(self) -> list[ExactPoint]:
        return [m.to_point() for m in (self.full or self.members)]

    def abcd_zero(self) -> bool:
        a, b, c, d = self.representative.abcd
        return a * b * c * d == 0

    def __str__(self) -> str:
        return str(self.representative)


def _sort_orbits(orbits: list[Orbit]) -> list[Orbit]:
    keyed = [(o.order, float(o.min_radius_sq()), o.min_radius_sq(), o.representative.abcd, o) for o in orbits]

    def cmp(x, y):
        if x[0] != y[0]:
            return x[0] - y[0]
        if abs(x[1] - y[1]) > 1e-9:
            return -1 if x[1] < y[1] else 1
        s = er_sign(x[2] - y[2])
        if s:
            return s
        return (x[3] > y[3]) - (x[3] < y[3])

    keyed.sort(key=cmp_to_key(cmp))
    return [k[-1] for k in keyed]


def orbit_decompose(points: Iterable[BaseCoord]) -> list[Orbit]:
    groups: dict[tuple[Coord, int], list[BaseCoord]] = {}
    for p in points:
        if not p.is_valid():
            raise ValueError(f"invalid base coordinate {p}")
        groups.setdefault((orbit_label(p.abcd), p.h), []).append(p)
    out = []
    for (label, h), mem in groups.items():
        full = tuple(BaseCoord(*v, h=h) for v in orbit_members(label))
        order = {v: i for i, v in enumerate(full)}
        mem = sorted(set(mem), key=lambda x: order[x])
        out.append(Orbit(BaseCoord(*label, h=h), mem, full))
    return _sort_orbits(out)


# -- base graph and disk orbits ---------------------------------------------


@lru_cache(maxsize=8)
def base_graph_coords(n: int = 4, m: int = 2) -> frozenset[Coord]:
    """Integer coordinates (h = ceil(m/2)) of the vertices of the n-fold sum of H^m."""
    h = math.ceil(m / 2)
    hm = rotation_set(named_graph("H"), range(-m, m + 1))
    gen = [to_base_coord(p, h).abcd for p in hm.vertices]
    pts: set[Coord] = set(gen)
    for _ in range(n - 1):
        pts = {
            (p[0] + q[0], p[1] + q[1], p[2] + q[2], p[3] + q[3]) for p in pts for q in gen
        }
    return frozenset(pts)


def enumerate_disk_orbits(r: Fraction | int, n: int = 4, m: int = 2) -> list[Orbit]:
    """Base orbits of the n-fold sum of H^m with at least one member within radius ``r``.

    An orbit meets the disk iff the smaller of its two radii is at most ``r``.
    """
    r = Fraction(r)
    if r <= 0:
        raise ValueError("disk radius must be positive")
    h = math.ceil(m / 2)
    labels = {orbit_label(v) for v in base_graph_coords(n, m)}
    r_sq = ExactReal(r * r)
    out = []
    for lab in labels:
        full = tuple(BaseCoord(*v, h=h) for v in orbit_members(lab))
        o = Orbit(full[0], list(full), full)
        if er_sign(o.min_radius_sq() - r_sq) <= 0:
            out.append(o)
    return _sort_orbits(out)


# -- permutation groups -----------------------------------------------------

Perm = tuple[int, ...]


@dataclass
class PermGroup:
    """Group of vertex permutations given by generators; elements on demand."""

    degree: int
    generators: list[Perm] = field(default_factory=list)
    _elements: list[Perm] | None = field(default=None, repr=False)

    @classmethod
    def trivial(cls, degree: int) -> PermGroup:
        return cls(degree, [])

    def identity(self) -> Perm:
        return tuple(range(self.degree))

    def elements(self) -> list[Perm]:
        if self._elements is None:
            ident = self.identity()
            seen = {ident}
            out = [ident]
            frontier = [ident]
            while frontier:
                nxt = []
                for x in frontier:
                    for g in self.generators:
                        y = tuple(g[i] for i in x)
                        if y not in seen:
                            seen.add(y)
                            out.append(y)
                            nxt.append(y)
                frontier = nxt
            out.sort()
            self._elements = out
        return self._elements

    @property
    def order(self) -> int:
        return len(self.elements())

    def orbits(self) -> list[list[int]]:
        parent = list(range(self.degree))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for g in self.generators:
            for i, j in enumerate(g):
                a, b = find(i), find(j)
                if a != b:
                    parent[max(a, b)] = min(a, b)
        groups: dict[int, list[int]] = {}
        for i in range(self.degree):
            groups.setdefault(find(i), []).append(i)
        return sorted(groups.values())

    def restrict(self, keep: Sequence[int]) -> PermGroup:
        """Subgroup stabilizing ``keep`` setwise, re-indexed onto ``keep``."""
        pos = {v: i for i, v in enumerate(keep)}
        ks = set(keep)
        gens = []
        for g in self.elements():
            if all(g[v] in ks for v in keep):
                gens.append(tuple(pos[g[v]] for v in keep))
        return PermGroup(len(keep), gens)


_OMEGA = rotor("omega").multiplier


def _candidate_maps(eta_range: int):
    rots = [ExactPoint(1)]
    for _ in range(5):
        rots.append(pt_mul(rots[-1], _OMEGA))
    etas = [rotor("eta").power(k).multiplier for k in range(-eta_range, eta_range + 1)]
    for rot, e, refl, conj in itertools.product(rots, etas, (False, True), (False, True)):
        mult = pt_mul(rot, e)

        def f(p, mult=mult, refl=refl, conj=conj):
            q = pt_mul(mult, p)
            if refl:
                q = q.conj()
            if conj:
                q = q.conjugate_by(11)
            return q

        yield f


def geometric_auts(
    g: UnitGraph | Sequence[ExactPoint],
    eta_range: int = 2,
    preserve: Sequence[Iterable[ExactPoint]] = (),
) -> PermGroup:
    """Automorphisms of ``g`` induced by the candidate isometry set.

    Candidates are compositions of 60-degree rotations, powers of eta, the
    reflection in the real axis and the sqrt(33) conjugation.  Each
    point set in ``preserve`` must also be mapped onto itself.  The result is a
    subgroup of the full automorphism group.
    """
    pts = list(g.vertices if isinstance(g, UnitGraph) else g)
    index = {p: i for i, p in enumerate(pts)}
    keep = [frozenset(s) for s in preserve]
    # probe far-out vertices first: they reject most candidates quickly
    order = sorted(range(len(pts)), key=lambda i: -abs(pts[i].approx))
    perms: set[Perm] = set()
    for f in _candidate_maps(eta_range):
        perm = [0] * len(pts)
        ok = True
        for i in order:
            j = index.get(f(pts[i]))
            if j is None:
                ok = False
                break
            perm[i] = j
        if not ok:
            continue
        if any(frozenset(f(p) for p in s) != s for s in keep):
            continue
        perms.add(tuple(perm))
    ident = tuple(range(len(pts)))
    return PermGroup(len(pts), sorted(p for p in perms if p != ident))


def canonicalize_subsets(
    subsets: Iterable[Iterable[int]], group: PermGroup | None
) -> list[tuple[int, ...]]:
    """Replace each subset by its least image under ``group`` and drop repeats."""
    elems = group.elements() if group is not None else None
    seen: set[tuple[int, ...]] = set()
    out = []
    for s in subsets:
        s = tuple(sorted(s))
        if elems is None or len(elems) <= 1:
            c = s
        else:
            c = min(tuple(sorted(g[i] for i in s)) for g in elems)
        if c not in seen:
            seen.add(c)
            out.append(c)
    return out


def canonical_subset(s: Iterable[int], group: PermGroup | None) -> tuple[int, ...]:
    s = tuple(sorted(s))
    if group is None or not group.generators:
        return s
    return min(tuple(sorted(g[i] for i in s)) for g in group.elements())


# -- orbit-filling tables ---------------------------------------------------


@dataclass
class OrbitRow:
    orbit: BaseCoord
    order: int
    degree: int
    in_m: int
    m_min: int
    m_max: int
    in_a: int

    @property
    def filled(self) -> bool:
        return self.in_m == self.order

    @property
    def range_text(self) -> str:
        return str(self.m_min) if self.m_min == self.m_max else f"{self.m_min}-{self.m_max}"


@dataclass
class OrbitTable:
    rows: list[OrbitRow]
    names: tuple[str, str, str] = ("M", "{M}", "A")

    def tsv(self) -> str:
        lines = [f"# orbit\tdeg\t{self.names[0]}\t{self.names[1]}\t{self.names[2]}\tfilled"]
        for r in self.rows:
            lines.append(
                f"{r.orbit}\t{r.degree}\t{r.in_m}\t{r.range_text}\t{r.in_a}\t{int(r.filled)}"
            )
        return "\n".join(lines) + "\n"

    def text(self) -> str:
        header = ["orbit", "deg", self.names[0], self.names[1], self.names[2], "filled"]
        body = [
            [str(r.orbit), str(r.degree), str(r.in_m), r.range_text, str(r.in_a), "*" if r.filled else ""]
            for r in self.rows
        ]
        widths = [max(len(x[i]) for x in [header] + body) for i in range(len(header))]
        fmt = lambda row: "  ".join(c.rjust(w) for c, w in zip(row, widths)).rstrip()
        return "\n".join([fmt(header)] + [fmt(r) for r in body]) + "\n"


def _coords_of(g: UnitGraph, h: int) -> dict[Coord, int]:
    out = {}
    for i, p in enumerate(g.vertices):
        out[to_base_coord(p, h).abcd] = i
    return out


def orbit_table(
    B: Sequence[Orbit] | None, A: UnitGraph, Ms: Sequence[UnitGraph], h: int = 1
) -> OrbitTable:
    """Orbit-filling table of ``A`` and the minimal graphs ``Ms`` (``Ms[0]`` is M).

    Rows cover the base orbits that meet ``A``; ``B`` restricts the orbit
    universe when given.  Raises ``ValueError`` for vertices without base form.
    """
    a_coords = _coords_of(A, h)
    ms = [set(_coords_of(m, h)) for m in Ms] or [set()]
    deg = A.degrees()
    allowed = {o.representative.abcd for o in B} if B is not None else None
    orbits = orbit_decompose(BaseCoord(*v, h=h) for v in a_coords)
    rows = []
    for o in orbits:
        if allowed is not None and o.representative.abcd not in allowed:
            continue
        full = {x.abcd for x in o.full}
        counts = [len(full & m) for m in ms]
        rows.append(
            OrbitRow(
                orbit=o.representative,
                order=o.order,
                degree=max(deg[a_coords[x.abcd]] for x in o.members),
                in_m=counts[0],
                m_min=min(counts),
                m_max=max(counts),
                in_a=len(o.members),
            )
        )
    return OrbitTable(rows)

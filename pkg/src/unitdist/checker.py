"""Coloring predicates: k-colorability, mono-pairs, non-mono sets, spindles, key property."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .exact import ExactPoint, ExactReal, format_point, rotor
from .graph import UnitGraph, unit_pairs
from .sat import (
    Backend,
    EmbeddedBackend,
    SplitFormula,
    encode_coloring,
    equal_chain_clauses,
    solve,
    split_common,
)

Edge = tuple[int, int]

_HALF = Fraction(1, 2)
DEFAULT_TRIANGLE = (
    ExactPoint(0, 0),
    ExactPoint(1, 0),
    ExactPoint(_HALF, ExactReal({3: _HALF})),
)


class VacuousError(ValueError):
    """The graph is not k-colorable, so the pair/set question has no meaning."""


def _norm_edges(edges: Iterable[Sequence[int]]) -> list[Edge]:
    return sorted({(min(e), max(e)) for e in edges})


def triangles(n: int, edges: Iterable[Edge], limit: int | None = None) -> list[tuple[int, int, int]]:
    adj: list[set[int]] = [set() for _ in range(n)]
    for i, j in edges:
        adj[i].add(j)
        adj[j].add(i)
    out = []
    for i in range(n):
        for j in sorted(x for x in adj[i] if x > i):
            for l in sorted(x for x in adj[i] & adj[j] if x > j):
                out.append((i, j, l))
                if limit is not None and len(out) >= limit:
                    return out
    return out


def _break_cliques(
    n: int,
    edges: Sequence[Edge],
    k: int,
    points: Sequence[ExactPoint | None] = (),
    first: Sequence[tuple[int, ...]] = (),
    pinned: frozenset[int] = frozenset(),
    limit: int = 64,
) -> list[tuple[int, ...]]:
    """Symmetry-breaking cliques in preference order.

    Order: explicitly supplied cliques, the default unit triangle at the origin,
    triangles made of pinned vertices, then the other triangles by index.
    """
    out = [tuple(c) for c in first if len(c) <= k]
    if k < 3:
        return out
    tris = triangles(n, edges)
    idx = {p: i for i, p in enumerate(points) if p is not None}
    if all(p in idx for p in DEFAULT_TRIANGLE):
        d = tuple(idx[p] for p in DEFAULT_TRIANGLE)
        if tuple(sorted(d)) in set(tris):
            out.append(d)
    out.extend(t for t in tris if all(v in pinned for v in t))
    out.extend(tris[:limit])
    seen = set()
    uniq = []
    for c in out:
        if c not in seen:
            seen.add(c)
            uniq.append(c)
    return uniq


def _solve_graph(
    n: int,
    edges: Sequence[Edge],
    k: int,
    backend: Backend | None,
    extra=(),
    breaks: Sequence[tuple[int, ...]] = (),
):
    sf = split_common(n, edges, k, extra=extra, breaks=breaks)
    return solve(sf.formula(range(n)), backend or EmbeddedBackend())


def colorable(
    n: int,
    edges: Iterable[Sequence[int]],
    k: int,
    backend: Backend | None = None,
    points: Sequence[ExactPoint] = (),
) -> bool:
    """k-colorability of an abstract graph on ``0..n-1``."""
    if k < 1:
        raise ValueError("k must be at least 1")
    edges = _norm_edges(edges)
    return _solve_graph(n, edges, k, backend, breaks=_break_cliques(n, edges, k, points)).sat


def is_k_colorable(g: UnitGraph, k: int, backend: Backend | None = None) -> bool:
    return colorable(g.n, g.edges, k, backend, g.vertices)


def find_coloring(g: UnitGraph, k: int, backend: Backend | None = None) -> list[int] | None:
    """A proper coloring with colors ``1..k`` (checked), or ``None``."""
    if k < 1:
        raise ValueError("k must be at least 1")
    f = encode_coloring(g.n, g.edges, k)
    res = _solve_graph(g.n, list(g.edges), k, backend, breaks=_break_cliques(g.n, g.edges, k, g.vertices))
    if not res.sat:
        return None
    cols = f.decode(res.model)
    if any(c == 0 for c in cols) or any(cols[i] == cols[j] for i, j in g.edges):
        raise AssertionError("decoded coloring is not proper")
    return cols


def chromatic_number(g: UnitGraph, k_max: int, backend: Backend | None = None) -> int:
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    for k in range(1, k_max + 1):
        if is_k_colorable(g, k, backend):
            return k
    raise ValueError(f"chromatic number exceeds k_max = {k_max}")


def _as_abstract(g: UnitGraph | tuple[int, Sequence[Edge]]) -> tuple[int, list[Edge], Sequence]:
    if isinstance(g, UnitGraph):
        return g.n, list(g.edges), g.vertices
    n, edges = g
    return n, _norm_edges(edges), ()


def _require_colorable(n, edges, k, backend, points) -> None:
    if not colorable(n, edges, k, backend, points):
        raise VacuousError(f"graph is not {k}-colorable; the question is vacuous")


def is_mono_pair(
    g: UnitGraph | tuple[int, Sequence[Edge]], u: int, v: int, k: int, backend: Backend | None = None
) -> bool:
    """True iff ``u`` and ``v`` share a color in every proper k-coloring of ``g``."""
    n, edges, pts = _as_abstract(g)
    if u == v:
        raise ValueError("mono-pair needs two distinct vertices")
    if not (0 <= u < n and 0 <= v < n):
        raise IndexError("vertex index out of range")
    if (min(u, v), max(u, v)) in set(edges):
        raise ValueError(f"vertices {u} and {v} are adjacent")
    _require_colorable(n, edges, k, backend, pts)
    return not colorable(n, edges + [(min(u, v), max(u, v))], k, backend, pts)


def is_non_mono_set(
    g: UnitGraph | tuple[int, Sequence[Edge]],
    members: Sequence[int],
    k: int,
    method: str = "clique_companion",
    backend: Backend | None = None,
    pin: bool = False,
) -> bool:
    """True iff the vertices in ``members`` can never all share one color.

    ``clique_companion`` attaches a fresh (k-1)-clique joined to every member;
    ``equal_chain`` adds implication chains; ``both`` runs the two and insists
    they agree.  ``pin`` fixes the colors of the clique and of every member
    (clique method only), which is sound because the members are forced to the
    one color the clique leaves free.
    """
    members = list(dict.fromkeys(members))
    if len(members) < 2:
        raise ValueError("non-mono set needs at least two vertices")
    n, edges, pts = _as_abstract(g)
    if any(not 0 <= x < n for x in members):
        raise IndexError("vertex index out of range")
    if method == "both":
        a = is_non_mono_set(g, members, k, "clique_companion", backend, pin)
        b = is_non_mono_set(g, members, k, "equal_chain", backend)
        if a != b:
            raise AssertionError("clique and chain methods disagree")
        return a
    _require_colorable(n, edges, k, backend, pts)
    if method == "clique_companion":
        fresh = list(range(n, n + k - 1))
        e2 = list(edges)
        e2 += [(a, b) for x, a in enumerate(fresh) for b in fresh[x + 1 :]]
        e2 += [(m, c) for c in fresh for m in members]
        extra = []
        if pin:
            extra = [((c * k + j + 1),) for j, c in enumerate(fresh)]
            extra += [((m * k + k),) for m in members]
        res = _solve_graph(n + k - 1, _norm_edges(e2), k, backend, extra=extra, breaks=[tuple(fresh)])
        return not res.sat
    if method == "equal_chain":
        extra = equal_chain_clauses(members, k)
        return not _solve_graph(n, edges, k, backend, extra=extra, breaks=_break_cliques(n, edges, k, pts)).sat
    raise ValueError(f"unknown method {method!r}")


def verify_spindle(
    g: UnitGraph | tuple[int, Sequence[Edge]],
    pair_a: Sequence[int],
    pair_b: Sequence[int],
    k: int,
    backend: Backend | None = None,
) -> bool:
    """Check that two mono-pairs with a common vertex close into a spindle.

    Both pairs are tested in ``g`` with the closing edge removed; the spindle
    then certifies that ``g`` itself is not k-colorable.
    """
    n, edges, pts = _as_abstract(g)
    shared = set(pair_a) & set(pair_b)
    if len(set(pair_a)) != 2 or len(set(pair_b)) != 2 or len(shared) != 1:
        raise ValueError("the two pairs must share exactly one vertex")
    (x,) = shared
    y = next(v for v in pair_a if v != x)
    z = next(v for v in pair_b if v != x)
    close = (min(y, z), max(y, z))
    if close not in set(edges):
        raise ValueError(f"far endpoints {y} and {z} are not joined by an edge")
    opened = [e for e in edges if e != close]
    try:
        return is_mono_pair((n, opened), x, y, k, backend) and is_mono_pair((n, opened), x, z, k, backend)
    except VacuousError:
        return False


def rotation_chord_sq(r_sq: ExactReal | Fraction | int, rotor_name: str) -> ExactReal:
    """Squared distance between a point at squared radius ``r_sq`` and its rotated image."""
    m = rotor(rotor_name).multiplier
    d = ExactPoint(1, 0) - m
    return d.norm_sq() * (r_sq if isinstance(r_sq, ExactReal) else ExactReal(r_sq))


# -- companions and the key property ----------------------------------------


@dataclass(frozen=True)
class Companion:
    """Structure C attached to a working graph W.

    ``points`` are the mono pair or non-mono set for those kinds.  ``hanging``
    points are extra fixed vertices added geometrically to ``W ∪ C``; they are
    never deleted and are typically used to cut down or restore symmetry.
    """

    kind: str = "none"
    points: tuple[ExactPoint, ...] = ()
    graph: UnitGraph | None = None
    rotor: str | None = None
    hanging: tuple[ExactPoint, ...] = ()

    KINDS = ("none", "mono_edge", "nonmono_clique", "subgraph")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown companion kind {self.kind!r}")
        if self.kind == "mono_edge" and len(set(self.points)) != 2:
            raise ValueError("mono_edge companion needs two distinct points")
        if self.kind == "nonmono_clique" and len(set(self.points)) < 2:
            raise ValueError("nonmono_clique companion needs at least two points")
        if self.kind == "subgraph" and self.graph is None:
            raise ValueError("subgraph companion needs a graph")

    @classmethod
    def none(cls, hanging: Iterable[ExactPoint] = ()) -> Companion:
        return cls("none", hanging=tuple(hanging))

    @classmethod
    def mono_edge(cls, u: ExactPoint, v: ExactPoint) -> Companion:
        return cls("mono_edge", (u, v))

    @classmethod
    def nonmono_clique(cls, pts: Iterable[ExactPoint]) -> Companion:
        return cls("nonmono_clique", tuple(pts))

    @classmethod
    def subgraph(cls, g: UnitGraph, rotor_name: str | None = None) -> Companion:
        return cls("subgraph", graph=g, rotor=rotor_name)

    def geometric_points(self) -> list[ExactPoint]:
        pts = list(self.hanging)
        if self.kind == "subgraph":
            g = self.graph if self.rotor is None else self.graph.transform(self.rotor)
            pts = list(g.vertices) + pts
        return pts

    def describe(self) -> str:
        if self.kind == "subgraph":
            return f"subgraph(n={self.graph.n}, rotor={self.rotor or 'none'})"
        if self.points:
            return f"{self.kind}({', '.join(format_point(p) for p in self.points)})"
        return self.kind


@dataclass(frozen=True)
class Realized:
    """``W ∪ C`` as an abstract graph; W keeps indices ``0..n_w-1``."""

    n_w: int
    n: int
    edges: tuple[Edge, ...]
    pinned: frozenset[int]
    points: tuple[ExactPoint | None, ...]
    breaks: tuple[tuple[int, ...], ...]
    extra: tuple[tuple[int, ...], ...] = ()


def realize(W: UnitGraph, C: Companion, k: int) -> Realized:
    pts: list[ExactPoint | None] = list(W.vertices)
    idx = dict(W.index)
    pinned: set[int] = set()
    geo = C.geometric_points()
    for p in geo:
        if p not in idx:
            idx[p] = len(pts)
            pts.append(p)
        pinned.add(idx[p])
    edges = set(W.edges)
    if len(pts) > W.n:
        # only pairs touching a companion point can be new
        for i, j in unit_pairs(pts):
            edges.add((i, j))
    first: list[tuple[int, ...]] = []
    if C.kind in ("mono_edge", "nonmono_clique"):
        try:
            mem = [idx[p] for p in C.points]
        except KeyError as exc:
            raise ValueError(f"companion point {exc.args[0]} is not a vertex of W") from None
        pinned.update(mem)
        if C.kind == "mono_edge":
            edges.add((min(mem), max(mem)))
        else:
            fresh = list(range(len(pts), len(pts) + k - 1))
            pts.extend([None] * len(fresh))
            edges.update((a, b) for x, a in enumerate(fresh) for b in fresh[x + 1 :])
            edges.update((min(m, c), max(m, c)) for c in fresh for m in mem)
            pinned.update(fresh)
            if fresh:
                first.append(tuple(fresh))
    edges_s = tuple(sorted(edges))
    pin = frozenset(pinned)
    breaks = _break_cliques(len(pts), edges_s, k, pts, first, pin)
    return Realized(W.n, len(pts), edges_s, pin, tuple(pts), tuple(breaks))


@dataclass(frozen=True)
class KeyProperty:
    """``W`` has the property iff ``W ∪ C`` is not k-colorable."""

    k: int = 4
    companion: Companion = field(default_factory=Companion)

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")


class PropertyOracle:
    """Memoized key-property checks on vertex-deleted subgraphs of a fixed ``W``.

    Queries name the deleted W-indices.  The common clause block is built once;
    each query only adds vertex clauses for the survivors.
    """

    def __init__(self, W: UnitGraph, kp: KeyProperty, backend: Backend | None = None):
        self.W = W
        self.kp = kp
        self.backend = backend or EmbeddedBackend()
        self.real = realize(W, kp.companion, kp.k)
        self.split: SplitFormula = split_common(
            self.real.n, self.real.edges, kp.k, self.real.pinned, self.real.extra, self.real.breaks
        )
        self.pinned_w = frozenset(i for i in self.real.pinned if i < W.n)
        self.memo: dict[frozenset[int], bool] = {}
        self.checks = 0
        self.hits = 0
        self._lock = threading.Lock()

    def __getstate__(self):
        st = self.__dict__.copy()
        del st["_lock"]
        return st

    def __setstate__(self, st):
        self.__dict__.update(st)
        self._lock = threading.Lock()

    @property
    def deletable(self) -> list[int]:
        return [i for i in range(self.W.n) if i not in self.pinned_w]

    def holds(self, deleted: Iterable[int] = ()) -> bool:
        gone = frozenset(deleted)
        if gone & self.pinned_w:
            raise ValueError("cannot delete companion (pinned) vertices")
        with self._lock:
            if gone in self.memo:
                self.hits += 1
                return self.memo[gone]
        survivors = [i for i in range(self.real.n) if i not in gone]
        res = solve(self.split.formula(survivors), self.backend)
        with self._lock:
            self.checks += 1
            self.memo[gone] = not res.sat
        return not res.sat

    def holds_keep(self, keep: Iterable[int]) -> bool:
        keep = set(keep)
        return self.holds(i for i in range(self.W.n) if i not in keep)


def key_property(W: UnitGraph, kp: KeyProperty, backend: Backend | None = None) -> bool:
    return PropertyOracle(W, kp, backend).holds(())

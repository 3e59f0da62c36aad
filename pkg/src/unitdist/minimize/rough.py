"""Heuristic passes that shrink a large graph while keeping the key property."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from ..checker import KeyProperty, PropertyOracle
from ..exact import ExactPoint, ExactReal, er_sign
from ..graph import UnitGraph
from ..sat import Backend
from .expand import PointOrbit, universe_orbits
from .hyper import PropertyLostError, build_hypergraph
from .reduce import maximal_independent_sets


@dataclass
class RoughOptions:
    trim_r_sq: Fraction | ExactReal | None = None
    peel_threshold: int | None = None
    fix: bool = False
    orbit_removal: bool = False
    indicators: bool = False
    indicator_degree: int = 2


@dataclass
class RoughResult:
    graph: UnitGraph
    fixed: list[ExactPoint] = field(default_factory=list)
    log: list[str] = field(default_factory=list)
    scores: list[tuple[PointOrbit, dict[str, int]]] = field(default_factory=list)


def _holds(g: UnitGraph, kp: KeyProperty, backend) -> bool:
    return PropertyOracle(g, kp, backend).holds(())


def peel(g: UnitGraph, kp: KeyProperty, threshold: int, backend=None) -> UnitGraph:
    """Repeatedly delete non-companion vertices of degree < ``threshold`` in ``W ∪ C``."""
    cur = g
    while True:
        orc = PropertyOracle(cur, kp, backend)
        deg = [0] * orc.real.n
        for i, j in orc.real.edges:
            deg[i] += 1
            deg[j] += 1
        low = [i for i in orc.deletable if deg[i] < threshold]
        if not low:
            return cur
        cur = cur.without(low)


def fixed_vertices(g: UnitGraph, kp: KeyProperty, backend=None) -> list[int]:
    """Vertices whose single deletion loses the property (they belong to every minimum)."""
    orc = PropertyOracle(g, kp, backend)
    return [i for i in orc.deletable if not orc.holds([i])]


def orbit_feasibility(
    g: UnitGraph, kp: KeyProperty, orbits: Sequence[PointOrbit], backend=None
) -> list[bool]:
    """For each orbit: does deleting its vertices (alone) keep the property?"""
    orc = PropertyOracle(g, kp, backend)
    out = []
    for o in orbits:
        idx = [g.index[p] for p in o if p in g.index]
        idx = [i for i in idx if i not in orc.pinned_w]
        out.append(orc.holds(idx) if idx else True)
    return out


def indicators(W: UnitGraph, kp: KeyProperty, degree: int = 2, backend=None) -> dict[str, int]:
    """Raw metrics of a working graph: free vertices, low-degree hyperedges, MIS order."""
    orc = PropertyOracle(W, kp, backend)
    Y = build_hypergraph(orc, degree)
    d2 = [tuple(sorted(e)) for e in Y.of_degree(2)]
    in12 = Y.covered(1) | {v for e in d2 for v in e}
    mis = maximal_independent_sets({v for e in d2 for v in e}, d2, cap=10000)
    return {
        "vertices": W.n,
        "free": sum(1 for v in Y.universe if v not in in12),
        **{f"deg{n}": len(Y.of_degree(n)) for n in range(1, degree + 1)},
        "mis": max((len(m) for m in mis), default=0),
    }


def rough_reduce(
    g: UnitGraph, kp: KeyProperty, options: RoughOptions, backend: Backend | None = None
) -> RoughResult:
    """Apply the enabled passes in order; any pass that loses the property is undone."""
    if not _holds(g, kp, backend):
        raise PropertyLostError("graph does not have the key property")
    res = RoughResult(g)
    pinned_pts = set(kp.companion.geometric_points()) | set(kp.companion.points)

    def attempt(name: str, new: UnitGraph) -> None:
        if new.n == res.graph.n:
            res.log.append(f"{name}: no change")
            return
        if _holds(new, kp, backend):
            res.log.append(f"{name}: {res.graph.n} -> {new.n}")
            res.graph = new
        else:
            res.log.append(f"{name}: rolled back ({res.graph.n} -> {new.n} loses the property)")

    if options.trim_r_sq is not None:
        r = options.trim_r_sq if isinstance(options.trim_r_sq, ExactReal) else ExactReal(options.trim_r_sq)
        cur = res.graph
        keep = [
            i for i, p in enumerate(cur.vertices) if p in pinned_pts or er_sign(p.norm_sq() - r) <= 0
        ]
        attempt("trim", cur.induced(keep))
    if options.peel_threshold is not None:
        attempt("peel", peel(res.graph, kp, options.peel_threshold, backend))
    if options.fix:
        fx = fixed_vertices(res.graph, kp, backend)
        res.fixed = [res.graph.vertices[i] for i in fx]
        res.log.append(f"fix: {len(fx)} vertices fixed")
    if options.orbit_removal or options.indicators:
        fixed = set(res.fixed)
        orbits = [
            o
            for o in universe_orbits(res.graph.vertices, [tuple(pinned_pts)] if pinned_pts else ())
            if not any(p in fixed or p in pinned_pts for p in o)
        ]
        # largest orbits first, farthest out first within a size
        orbits.sort(key=lambda o: (-len(o), -max(abs(p.approx) for p in o)))
        if options.indicators:
            for o in orbits:
                sub = res.graph.without(res.graph.index[p] for p in o)
                if _holds(sub, kp, backend):
                    res.scores.append((o, indicators(sub, kp, options.indicator_degree, backend)))
            res.log.append(f"indicators: {len(res.scores)} scored candidates")
        else:
            for o in orbits:
                cur = res.graph
                if not all(p in cur.index for p in o):
                    continue
                attempt("orbit", cur.without(cur.index[p] for p in o))
    return res

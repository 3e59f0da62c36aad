"""Orbit universes, the reserve graph and expansion schedules."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial import cKDTree

from ..exact import ExactPoint, is_unit
from ..graph import SHORTLIST_EPS, UnitGraph, from_points
from ..symmetry import Orbit, base_form, geometric_auts, orbit_decompose, to_base_coord

PointOrbit = tuple[ExactPoint, ...]


def universe_orbits(points: Iterable[ExactPoint], fixed: Sequence[Iterable[ExactPoint]] = ()) -> list[PointOrbit]:
    """Split a vertex universe into orbits.

    Base orbits are used when every point has a base coordinate at a common
    level; otherwise orbits of the geometric automorphism group (preserving each
    ``fixed`` set) are used.
    """
    pts = list(dict.fromkeys(points))
    if not pts:
        return []
    forms = [base_form(p) for p in pts]
    if all(f is not None for f in forms):
        h = max(f.h for f in forms)
        coords = [to_base_coord(p, h) for p in pts]
        if all(c.is_valid() for c in coords):
            orbits = orbit_decompose(coords)
            return [tuple(m.to_point() for m in o.members) for o in orbits]
    g = from_points(pts)
    grp = geometric_auts(g, preserve=fixed)
    return [tuple(g.vertices[i] for i in orb) for orb in grp.orbits()]


def orbits_of(orbits: Sequence[Orbit] | Sequence[PointOrbit]) -> list[PointOrbit]:
    out = []
    for o in orbits:
        out.append(tuple(o.points()) if isinstance(o, Orbit) else tuple(o))
    return out


def neighbor_counts(points: Sequence[ExactPoint], target: Sequence[ExactPoint]) -> list[int]:
    """For each point, the number of ``target`` points at exactly unit distance."""
    if not points or not target:
        return [0] * len(points)
    txy = np.array([[p.approx.real, p.approx.imag] for p in target])
    tree = cKDTree(txy)
    out = []
    for p in points:
        near = tree.query_ball_point([p.approx.real, p.approx.imag], 1.0 + SHORTLIST_EPS)
        out.append(sum(1 for j in near if target[j] != p and is_unit(p, target[j])))
    return out


@dataclass
class Reserve:
    graph: UnitGraph
    orbits: list[PointOrbit] = field(default_factory=list)
    degrees: list[int] = field(default_factory=list)


def build_reserve(
    A: UnitGraph, B: Sequence[Orbit] | Sequence[PointOrbit], min_degree: int = 4
) -> Reserve:
    """Orbits gaining a vertex of degree >= ``min_degree`` when added to ``A``.

    A new vertex's degree is taken in ``A`` plus the added orbit.  Qualifying
    orbits are ordered by decreasing best degree, then by position in ``B``.
    """
    have = A.point_set()
    scored = []
    for pos, orb in enumerate(orbits_of(B)):
        new = [p for p in orb if p not in have]
        if not new:
            continue
        best = max(neighbor_counts(new, list(A.vertices) + new))
        if best >= min_degree:
            scored.append((-best, pos, tuple(new)))
    scored.sort(key=lambda t: (t[0], t[1]))
    orbs = [t[2] for t in scored]
    pts = list(A.vertices) + [p for o in orbs for p in o]
    return Reserve(from_points(pts), orbs, [-t[0] for t in scored])


def parse_schedule(schedule: str) -> list[tuple[str, int | None]]:
    """``none``, ``fill[:N]``, ``reserve:N``, ``smallest:N`` joined by ``+``."""
    out = []
    for part in schedule.split("+"):
        part = part.strip()
        name, _, arg = part.partition(":")
        if name not in ("none", "fill", "reserve", "smallest"):
            raise ValueError(f"unknown schedule item {part!r}")
        if name in ("reserve", "smallest") and not arg:
            raise ValueError(f"schedule item {name!r} needs a count")
        n = None
        if arg:
            n = int(arg)
            if n < 0:
                raise ValueError("schedule counts must be non-negative")
        out.append((name, n))
    return out


def expansion_moves(
    A: UnitGraph,
    universe: Sequence[PointOrbit],
    reserve: Reserve | None,
    schedule: str,
) -> list[tuple[str, tuple[ExactPoint, ...]]]:
    """Ordered list of (label, new points) expansions to try.

    ``fill`` proposes each partially filled orbit, smallest orbit first;
    ``reserve:N`` proposes consecutive groups of N reserve orbits;
    ``smallest:N`` proposes groups of N untouched universe orbits, smallest first.
    """
    have = A.point_set()
    moves: list[tuple[str, tuple[ExactPoint, ...]]] = []
    for name, n in parse_schedule(schedule):
        if name == "fill":
            part = [
                (len(o), pos, tuple(p for p in o if p not in have))
                for pos, o in enumerate(universe)
                if any(p in have for p in o) and any(p not in have for p in o)
            ]
            part.sort(key=lambda t: (t[0], t[1]))
            if n is not None:
                part = part[:n]
            moves.extend((f"fill#{pos}", new) for _, pos, new in part)
        elif name == "reserve":
            if reserve is None or n == 0:
                continue
            orbs = [tuple(p for p in o if p not in have) for o in reserve.orbits]
            orbs = [o for o in orbs if o]
            for i in range(0, len(orbs), n):
                grp = orbs[i : i + n]
                moves.append((f"reserve#{i}", tuple(p for o in grp for p in o)))
        elif name == "smallest":
            if n == 0:
                continue
            fresh = [
                (len(o), pos, o) for pos, o in enumerate(universe) if not any(p in have for p in o)
            ]
            fresh.sort(key=lambda t: (t[0], t[1]))
            for i in range(0, len(fresh), n):
                grp = fresh[i : i + n]
                moves.append((f"smallest#{i}", tuple(p for _, _, o in grp for p in o)))
    return moves


def expand(
    A: UnitGraph,
    universe: Sequence[PointOrbit],
    schedule: str,
    reserve: Reserve | None = None,
    move: int = 0,
) -> UnitGraph:
    """``A`` plus the points of the ``move``-th scheduled expansion (``A`` if none)."""
    moves = expansion_moves(A, universe, reserve, schedule)
    if move >= len(moves):
        return A
    return from_points(list(A.vertices) + list(moves[move][1]))

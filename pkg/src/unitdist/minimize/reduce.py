"""Phase 2: candidate deletion sets and the stepwise search for minimum subgraphs."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from ..checker import PropertyOracle
from ..graph import UnitGraph
from ..symmetry import PermGroup, canonical_subset
from .hyper import Deletion, Hypergraph, PropertyLostError, evaluate

PHASE2_BUDGET = 10**6


def maximal_independent_sets(
    vertices: Iterable[int], edges: Iterable[tuple[int, int]], cap: int | None = None
) -> list[frozenset[int]]:
    """Maximal independent sets via Bron-Kerbosch with pivoting on the complement.

    At most ``cap`` sets are produced; output order is deterministic.
    """
    verts = sorted(set(vertices))
    nbr: dict[int, set[int]] = {v: set() for v in verts}
    for a, b in edges:
        nbr[a].add(b)
        nbr[b].add(a)
    # non-neighbors play the role of neighbors in the clique search
    allv = set(verts)
    comp = {v: allv - nbr[v] - {v} for v in verts}
    out: list[frozenset[int]] = []

    def bk(r: set[int], p: set[int], x: set[int]) -> bool:
        if not p and not x:
            out.append(frozenset(r))
            return cap is not None and len(out) >= cap
        pivot = max(sorted(p | x), key=lambda u: len(comp[u] & p))
        for v in sorted(p - comp[pivot]):
            if bk(r | {v}, p & comp[v], x & comp[v]):
                return True
            p = p - {v}
            x = x | {v}
        return False

    if verts:
        bk(set(), set(verts), set())
    return sorted(out, key=lambda s: (-len(s), sorted(s)))


def _split(s: frozenset[int], high: list[Deletion]) -> list[frozenset[int]]:
    for e in high:
        if e <= s:
            out: list[frozenset[int]] = []
            for v in sorted(e):
                out.extend(_split(s - {v}, high))
            return out
    return [s]


def candidate_deletions(
    W: UnitGraph | int,
    Y: Hypergraph,
    current_min: int | None = None,
    mis_cap: int | None = None,
) -> list[frozenset[int]]:
    """Maximal deletion sets that contain no hyperedge.

    Vertices of degree-1 hyperedges are never deleted.  Each maximal
    independent set of the degree-2 conflict graph gets the free vertices
    added; sets containing a higher-degree hyperedge are split by dropping one
    of its vertices.  Sets that would leave more than ``current_min`` vertices
    are dropped.  Largest sets come first.
    """
    n = W if isinstance(W, int) else W.n
    fixed = Y.covered(1)
    pool = [v for v in Y.universe if v not in fixed]
    deg2 = [tuple(sorted(e)) for e in Y.of_degree(2)]
    in2 = {v for e in deg2 for v in e}
    free = frozenset(v for v in pool if v not in in2)
    if in2:
        sets = [m | free for m in maximal_independent_sets(sorted(in2), deg2, mis_cap)]
    else:
        sets = [free]
    high = [e for d in sorted(Y.edges) if d >= 3 for e in Y.edges[d]]
    split: set[frozenset[int]] = set()
    for s in sets:
        split.update(_split(s, high))
    # keep only maximal sets
    ordered = sorted(split, key=lambda s: (-len(s), sorted(s)))
    maximal: list[frozenset[int]] = []
    for s in ordered:
        if not any(s < t for t in maximal):
            maximal.append(s)
    if current_min is not None:
        maximal = [s for s in maximal if n - len(s) <= current_min]
    return [s for s in maximal if s]


@dataclass
class ReduceResult:
    """Minimum-order subgraphs found in one reduction.

    ``deletions`` lists every deletion set found (all symmetric images),
    ``representatives`` one per orbit of the output group.
    """

    order: int | None
    deletions: list[frozenset[int]] = field(default_factory=list)
    representatives: list[frozenset[int]] = field(default_factory=list)
    graphs: list[UnitGraph] = field(default_factory=list)
    partial: bool = False
    checks: int = 0
    steps: list[tuple[int, int, int]] = field(default_factory=list)  # (size, tested, found)


def _subsets_of_size(cands: Sequence[frozenset[int]], s: int, group: PermGroup | None):
    seen: set[tuple[int, ...]] = set()
    out = []
    for c in cands:
        if len(c) < s:
            continue
        for sub in itertools.combinations(sorted(c), s):
            key = canonical_subset(sub, group)
            if key not in seen:
                seen.add(key)
                out.append(key)
    return out


def reduce(
    oracle: PropertyOracle,
    Y: Hypergraph,
    current_min: int | None = None,
    group: PermGroup | None = None,
    budget: int = PHASE2_BUDGET,
    mis_cap: int | None = None,
    jobs: int = 1,
) -> ReduceResult:
    """Search deletions from the largest size down; stop at the first size with a hit.

    Only subsets of the candidate deletion sets are tried, which is complete
    because a deletion keeping the property can contain no hyperedge.  Each
    size step tests at most ``budget`` sets; when a step is cut short the
    result is flagged ``partial``.
    """
    W = oracle.W
    if not oracle.holds(()):
        raise PropertyLostError("working graph lost property")
    start = oracle.checks
    cands = candidate_deletions(W, Y, current_min, mis_cap)
    res = ReduceResult(order=None)
    top = max((len(c) for c in cands), default=0)
    lowest = 0 if current_min is None else max(0, W.n - current_min)
    for s in range(top, lowest - 1, -1):
        subs = _subsets_of_size(cands, s, group) if s else [()]
        if len(subs) > budget:
            subs = subs[:budget]
            res.partial = True
        verdicts = evaluate(oracle, subs, jobs)
        hits = [frozenset(d) for d, ok in zip(subs, verdicts) if ok]
        res.steps.append((s, len(subs), len(hits)))
        if hits:
            res.order = W.n - s
            res.representatives = hits
            allhits: set[frozenset[int]] = set()
            for h in hits:
                if group is None or not group.generators:
                    allhits.add(h)
                else:
                    allhits.update(frozenset(g[i] for i in h) for g in group.elements())
            res.deletions = sorted(allhits, key=sorted)
            res.graphs = [W.without(d) for d in res.deletions]
            break
        if res.partial:
            break
    res.checks = oracle.checks - start
    return res

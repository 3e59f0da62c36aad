"""Critical-set hypergraph and batched deletion checks."""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from ..checker import PropertyOracle
from ..symmetry import PermGroup, canonical_subset

Deletion = frozenset[int]


class PropertyLostError(RuntimeError):
    """The working graph does not have the key property to begin with."""


# -- parallel evaluation ----------------------------------------------------

_WORKER: PropertyOracle | None = None


def _init_worker(W, kp, backend) -> None:
    global _WORKER
    _WORKER = PropertyOracle(W, kp, backend)


def _worker_holds(sets: list[Deletion]) -> list[bool]:
    return [_WORKER.holds(s) for s in sets]


def _worker_batch(sets: list[Deletion]) -> tuple[list[bool], int]:
    before = _WORKER.checks
    out = _batch_chunk(_WORKER, sets)
    return out, _WORKER.checks - before


def _chunks(seq: Sequence, size: int) -> list[list]:
    return [list(seq[i : i + size]) for i in range(0, len(seq), size)]


def evaluate(oracle: PropertyOracle, sets: Sequence[Iterable[int]], jobs: int = 1) -> list[bool]:
    """``holds`` for every deletion set, in input order, optionally in worker processes."""
    sets = [frozenset(s) for s in sets]
    todo = [s for s in dict.fromkeys(sets) if s not in oracle.memo]
    if jobs > 1 and len(todo) > 1:
        size = max(1, len(todo) // (4 * jobs))
        with ProcessPoolExecutor(
            jobs, initializer=_init_worker, initargs=(oracle.W, oracle.kp, oracle.backend)
        ) as ex:
            parts = list(ex.map(_worker_holds, _chunks(todo, size)))
        for s, v in zip(todo, itertools.chain.from_iterable(parts)):
            oracle.memo[s] = v
            oracle.checks += 1
    return [oracle.holds(s) for s in sets]


# -- 8-4-2-1 batching -------------------------------------------------------


def _batch_chunk(oracle: PropertyOracle, sets: list[Deletion]) -> list[bool]:
    if len(sets) == 1:
        return [oracle.holds(sets[0])]
    union = frozenset().union(*sets)
    if oracle.holds(union):
        # a larger deletion keeps the property, so every part does too
        return [True] * len(sets)
    half = (len(sets) + 1) // 2
    return _batch_chunk(oracle, sets[:half]) + _batch_chunk(oracle, sets[half:])


def batch_8421(
    oracle: PropertyOracle, deletion_sets: Sequence[Iterable[int]], group_size: int = 8, jobs: int = 1
) -> list[bool]:
    """Per-set ``holds`` verdicts, testing unions of 8, then 4, 2 and 1 sets.

    A union that keeps the property certifies all of its members at once.
    Results equal one-by-one testing because deleting fewer vertices can only
    keep the property.
    """
    sets = [frozenset(s) for s in deletion_sets]
    if any(not s for s in sets):
        raise ValueError("deletion sets must be nonempty")
    chunks = _chunks(sets, group_size)
    if jobs > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(
            jobs, initializer=_init_worker, initargs=(oracle.W, oracle.kp, oracle.backend)
        ) as ex:
            parts = list(ex.map(_worker_batch, chunks))
        out = []
        for chunk, (verdicts, n) in zip(chunks, parts):
            oracle.checks += n
            for s, v in zip(chunk, verdicts):
                oracle.memo.setdefault(s, v)
            out.extend(verdicts)
        return out
    out = []
    for chunk in chunks:
        out.extend(_batch_chunk(oracle, chunk))
    return out


# -- hypergraph -------------------------------------------------------------


@dataclass
class Hypergraph:
    """Minimal vertex sets of ``W`` whose joint deletion loses the key property."""

    universe: tuple[int, ...]
    edges: dict[int, list[Deletion]] = field(default_factory=dict)
    max_degree: int = 0
    checks: int = 0

    def add(self, e: Iterable[int]) -> None:
        e = frozenset(e)
        self.edges.setdefault(len(e), [])
        if e not in self.edges[len(e)]:
            self.edges[len(e)].append(e)
            self.edges[len(e)].sort(key=sorted)

    def of_degree(self, n: int) -> list[Deletion]:
        return self.edges.get(n, [])

    def all_edges(self) -> list[Deletion]:
        return [e for n in sorted(self.edges) for e in self.edges[n]]

    def contains_edge(self, s: Iterable[int]) -> bool:
        s = frozenset(s)
        return any(e <= s for e in self.all_edges())

    def is_minimal(self) -> bool:
        es = self.all_edges()
        return not any(a < b for a in es for b in es)

    def counts(self) -> dict[int, int]:
        return {n: len(v) for n, v in sorted(self.edges.items())}

    def covered(self, n: int) -> set[int]:
        return set().union(*self.of_degree(n)) if self.of_degree(n) else set()


def _images(s: Deletion, group: PermGroup | None) -> set[Deletion]:
    if group is None or not group.generators:
        return {s}
    return {frozenset(g[i] for i in s) for g in group.elements()}


def build_hypergraph(
    oracle: PropertyOracle,
    max_degree: int,
    group: PermGroup | None = None,
    batch: bool = True,
    jobs: int = 1,
    limit: int | None = None,
) -> Hypergraph:
    """Find all hyperedges up to ``max_degree``, lowest degree first.

    A candidate n-set is tested only if each of its (n-1)-subsets was tested and
    kept the property, so no candidate contains a lower-degree hyperedge.
    Candidates are reduced to one representative per ``group`` orbit; every
    image of a losing representative is recorded.  ``group`` must act on the
    indices of ``oracle.W`` and fix the companion.
    """
    if not oracle.holds(()):
        raise PropertyLostError("working graph lost property")
    start = oracle.checks
    universe = tuple(oracle.deletable)
    Y = Hypergraph(universe, max_degree=max_degree)
    safe: set[tuple[int, ...]] = {()}
    for n in range(1, max_degree + 1):
        cands: list[tuple[int, ...]] = []
        seen: set[tuple[int, ...]] = set()
        for base in sorted(safe):
            for v in universe:
                if v in base:
                    continue
                c = canonical_subset(base + (v,), group)
                if c in seen:
                    continue
                seen.add(c)
                if all(
                    canonical_subset(c[:x] + c[x + 1 :], group) in safe for x in range(n)
                ):
                    cands.append(c)
        cands.sort()
        if limit is not None and len(cands) > limit:
            raise RuntimeError(f"{len(cands)} degree-{n} candidates exceed the limit {limit}")
        if not cands:
            break
        if batch:
            verdicts = batch_8421(oracle, cands, jobs=jobs)
        else:
            verdicts = evaluate(oracle, cands, jobs)
        safe = set()
        for c, ok in zip(cands, verdicts):
            if ok:
                safe.add(c)
            else:
                for img in _images(frozenset(c), group):
                    Y.add(img)
    Y.checks = oracle.checks - start
    return Y

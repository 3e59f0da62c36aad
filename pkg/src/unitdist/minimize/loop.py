"""The expand/reduce iteration and its run log."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from ..checker import KeyProperty, PropertyOracle
from ..graph import UnitGraph, from_points
from ..sat import Backend, EmbeddedBackend
from ..symmetry import PermGroup, geometric_auts
from .expand import PointOrbit, build_reserve, expansion_moves
from .hyper import Hypergraph, PropertyLostError, build_hypergraph
from .reduce import PHASE2_BUDGET, ReduceResult, reduce


@dataclass
class Strategy:
    schedule: str = "fill+reserve:1"
    max_degree: int = 2
    budget: int = PHASE2_BUDGET
    max_iterations: int = 20
    symmetry: bool = True
    batch: bool = True
    mis_cap: int | None = 100000
    reserve_degree: int = 4
    jobs: int = 1

    def __post_init__(self):
        if self.budget < 1 or self.max_iterations < 0 or self.max_degree < 0:
            raise ValueError("budgets must be positive")


@dataclass
class MinimizationState:
    M: UnitGraph
    setM: list[UnitGraph]
    A: UnitGraph
    W: UnitGraph
    R: UnitGraph
    B: list[PointOrbit]
    kp: KeyProperty
    Y: Hypergraph | None = None

    @property
    def order(self) -> int:
        return self.M.n


class RunLog:
    """Line-oriented ``key=value`` records.

    Records carry a sequence number; wall-clock time is added only when a
    ``clock`` is supplied, so that default logs are reproducible.
    """

    def __init__(self, clock: Callable[[], float] | None = None):
        self.clock = clock
        self.lines: list[str] = []

    def record(self, event: str, **fields) -> None:
        parts = [f"seq={len(self.lines)}"]
        if self.clock is not None:
            parts.append(f"t={self.clock():.3f}")
        parts.append(f"event={event}")
        parts.extend(f"{k}={v}" for k, v in fields.items())
        self.lines.append(" ".join(parts))

    def text(self) -> str:
        return "\n".join(self.lines) + ("\n" if self.lines else "")


def _group_for(W: UnitGraph, kp: KeyProperty, use: bool) -> PermGroup | None:
    if not use:
        return None
    fixed = [kp.companion.geometric_points(), list(kp.companion.points)]
    return geometric_auts(W, preserve=[f for f in fixed if f])


def initial_state(
    A: UnitGraph, universe: Sequence[PointOrbit], kp: KeyProperty, reserve_degree: int = 4
) -> MinimizationState:
    R = build_reserve(A, universe, reserve_degree).graph
    return MinimizationState(M=A, setM=[A], A=A, W=A, R=R, B=list(universe), kp=kp)


def reduce_once(
    W: UnitGraph,
    kp: KeyProperty,
    strategy: Strategy,
    current_min: int | None,
    backend: Backend,
    log: RunLog | None = None,
    label: str = "",
) -> tuple[Hypergraph, ReduceResult]:
    oracle = PropertyOracle(W, kp, backend)
    group = _group_for(W, kp, strategy.symmetry)
    Y = build_hypergraph(oracle, strategy.max_degree, group, strategy.batch, strategy.jobs)
    if log:
        log.record(
            "hypergraph",
            move=label or "-",
            W=W.n,
            group=group.order if group else 1,
            edges=",".join(f"{d}:{c}" for d, c in Y.counts().items()) or "0",
            checks=Y.checks,
        )
    res = reduce(oracle, Y, current_min, group, strategy.budget, strategy.mis_cap, strategy.jobs)
    if log:
        log.record(
            "reduce",
            move=label or "-",
            order=res.order if res.order is not None else "none",
            found=len(res.graphs),
            reps=len(res.representatives),
            partial=int(res.partial),
            checks=res.checks,
        )
    return Y, res


def iterate(
    state: MinimizationState,
    strategy: Strategy,
    backend: Backend | None = None,
    log: RunLog | None = None,
) -> tuple[MinimizationState, RunLog]:
    """Alternate expansion and reduction until no scheduled expansion succeeds.

    An expansion succeeds when the reduction either finds a smaller order or
    new minimal graphs of the current order.  A first pass reduces ``A``
    itself with no expansion.
    """
    backend = backend or EmbeddedBackend()
    log = log or RunLog()
    kp = state.kp
    if not PropertyOracle(state.A, kp, backend).holds(()):
        raise PropertyLostError("initial graph does not have the key property")
    log.record("start", A=state.A.n, M=state.M.n, setM=len(state.setM), universe=sum(len(o) for o in state.B))

    def absorb(res: ReduceResult, W: UnitGraph, Y: Hypergraph, label: str) -> bool:
        if res.order is None:
            return False
        have = {g.point_set() for g in state.setM}
        new = [g for g in res.graphs if g.point_set() not in have]
        if res.order < state.M.n:
            state.setM = list(res.graphs)
        elif res.order == state.M.n and new:
            state.setM = state.setM + new
        else:
            return False
        state.setM.sort(key=lambda g: [str(p) for p in g.vertices])
        state.M = state.setM[0]
        state.A = from_points(p for g in state.setM for p in g.vertices)
        state.W = W
        state.Y = Y
        log.record("accept", move=label, M=state.M.n, setM=len(state.setM), A=state.A.n)
        return True

    # reduce the starting graph itself
    W0 = state.A
    Y, res = reduce_once(W0, kp, strategy, None, backend, log, "initial")
    if res.order is not None:
        state.setM = sorted(res.graphs, key=lambda g: [str(p) for p in g.vertices])
        state.M = state.setM[0]
        state.A = from_points(p for g in state.setM for p in g.vertices)
        state.W, state.Y = W0, Y
        log.record("accept", move="initial", M=state.M.n, setM=len(state.setM), A=state.A.n)

    for it in range(strategy.max_iterations):
        reserve = build_reserve(state.A, state.B, strategy.reserve_degree)
        state.R = reserve.graph
        moves = expansion_moves(state.A, state.B, reserve, strategy.schedule)
        log.record("iteration", i=it, A=state.A.n, R=state.R.n, moves=len(moves))
        success = False
        for label, pts in moves:
            W = from_points(list(state.A.vertices) + list(pts))
            Y, res = reduce_once(W, kp, strategy, state.M.n, backend, log, label)
            if absorb(res, W, Y, label):
                success = True
                break
        if not success:
            log.record("fixpoint", i=it, M=state.M.n, setM=len(state.setM), A=state.A.n)
            break
    else:
        log.record("iteration-cap", M=state.M.n, setM=len(state.setM))
    return state, log

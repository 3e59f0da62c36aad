"""A compact conflict-driven clause-learning SAT solver.

Two watched literals, first-UIP learning with recursive-free minimization,
VSIDS-style activities, phase saving, Luby restarts and periodic learnt-clause
reduction.  No preprocessing.
"""

from __future__ import annotations

import heapq
from typing import Iterable, Sequence


def luby(i: int) -> int:
    """The i-th term (1-based) of the Luby sequence 1,1,2,1,1,2,4,..."""
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while True:
        if i == (1 << k) - 1:
            return 1 << (k - 1)
        i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i:
            k += 1


class CDCLSolver:
    """Solve a CNF given as lists of nonzero ints over variables ``1..num_vars``.

    Literals are stored internally as ``2*v`` (positive) and ``2*v+1`` (negative).
    """

    def __init__(self, num_vars: int, clauses: Iterable[Sequence[int]], restart_base: int = 100):
        self.nv = num_vars
        self.restart_base = restart_base
        n2 = 2 * (num_vars + 1)
        self.value = [0] * n2  # per literal: 1 true, -1 false, 0 open
        self.level = [0] * (num_vars + 1)
        self.reason: list[list[int] | None] = [None] * (num_vars + 1)
        self.phase = [1] * (num_vars + 1)  # 1 -> try negative first
        self.activity = [0.0] * (num_vars + 1)
        self.inc = 1.0
        self.watches: list[list[list[int]]] = [[] for _ in range(n2)]
        self.trail: list[int] = []
        self.lim: list[int] = []
        self.qhead = 0
        self.learnts: list[list[int]] = []
        self.heap = [(-0.0, v) for v in range(1, num_vars + 1)]
        self.ok = True
        self.conflicts = 0
        self.decisions = 0
        self.propagations = 0
        self._units: list[int] = []
        for cl in clauses:
            self._add_input(cl)

    # -- setup ------------------------------------------------------------

    def _add_input(self, cl: Sequence[int]) -> None:
        lits = set()
        for x in cl:
            if x == 0 or abs(x) > self.nv:
                raise ValueError(f"literal {x} out of range")
            lits.add(2 * x if x > 0 else -2 * x + 1)
        if any((l ^ 1) in lits for l in lits):
            return  # tautology
        lits = sorted(lits)
        if not lits:
            self.ok = False
        elif len(lits) == 1:
            self._units.append(lits[0])
        else:
            self.watches[lits[0] ^ 1].append(lits)
            self.watches[lits[1] ^ 1].append(lits)

    # -- core -------------------------------------------------------------

    def _assign(self, lit: int, reason: list[int] | None) -> None:
        v = lit >> 1
        self.value[lit] = 1
        self.value[lit ^ 1] = -1
        self.level[v] = len(self.lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _propagate(self) -> list[int] | None:
        value = self.value
        watches = self.watches
        trail = self.trail
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            self.propagations += 1
            false_lit = p ^ 1
            ws = watches[p]
            i = j = 0
            n = len(ws)
            while i < n:
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0], c[1] = c[1], false_lit
                first = c[0]
                if value[first] == 1:
                    ws[j] = c
                    j += 1
                    continue
                found = False
                for k in range(2, len(c)):
                    lk = c[k]
                    if value[lk] != -1:
                        c[1], c[k] = lk, false_lit
                        watches[lk ^ 1].append(c)
                        found = True
                        break
                if found:
                    continue
                ws[j] = c
                j += 1
                if value[first] == -1:
                    while i < n:
                        ws[j] = ws[i]
                        j += 1
                        i += 1
                    del ws[j:]
                    return c
                self._assign(first, c)
            del ws[j:]
        return None

    def _bump(self, v: int) -> None:
        self.activity[v] += self.inc
        if self.activity[v] > 1e100:
            self.activity = [a * 1e-100 for a in self.activity]
            self.inc *= 1e-100
            self.heap = [(-self.activity[u], u) for u in range(1, self.nv + 1) if self.value[2 * u] == 0]
            heapq.heapify(self.heap)
        elif self.value[2 * v] == 0:
            heapq.heappush(self.heap, (-self.activity[v], v))

    def _analyze(self, confl: list[int]) -> tuple[list[int], int]:
        seen = [False] * (self.nv + 1)
        learnt = [0]
        counter = 0
        p = -1
        idx = len(self.trail) - 1
        cur = len(self.lim)
        c = confl
        while True:
            for q in c:
                if q == p:
                    continue
                v = q >> 1
                if not seen[v] and self.level[v] > 0:
                    seen[v] = True
                    self._bump(v)
                    if self.level[v] >= cur:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[self.trail[idx] >> 1]:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            v = p >> 1
            seen[v] = False
            counter -= 1
            if counter == 0:
                break
            c = self.reason[v]
        learnt[0] = p ^ 1
        # drop literals implied by others in the clause
        keep = [learnt[0]]
        for q in learnt[1:]:
            r = self.reason[q >> 1]
            if r is None or not all(seen[x >> 1] or self.level[x >> 1] == 0 for x in r if x != (q ^ 1)):
                keep.append(q)
        learnt = keep
        self.inc /= 0.95
        if len(learnt) == 1:
            return learnt, 0
        mi = max(range(1, len(learnt)), key=lambda t: self.level[learnt[t] >> 1])
        learnt[1], learnt[mi] = learnt[mi], learnt[1]
        return learnt, self.level[learnt[1] >> 1]

    def _cancel(self, lvl: int) -> None:
        if len(self.lim) <= lvl:
            return
        stop = self.lim[lvl]
        for lit in self.trail[stop:]:
            v = lit >> 1
            self.value[lit] = 0
            self.value[lit ^ 1] = 0
            self.reason[v] = None
            self.phase[v] = lit & 1
            heapq.heappush(self.heap, (-self.activity[v], v))
        del self.trail[stop:]
        del self.lim[lvl:]
        self.qhead = len(self.trail)

    def _pick(self) -> int:
        heap = self.heap
        while heap:
            _, v = heapq.heappop(heap)
            if self.value[2 * v] == 0:
                return 2 * v + self.phase[v]
        return -1

    def _reduce_db(self) -> None:
        locked = {id(self.reason[l >> 1]) for l in self.trail if self.reason[l >> 1] is not None}
        self.learnts.sort(key=len)
        half = len(self.learnts) // 2
        kept = self.learnts[:half] + [c for c in self.learnts[half:] if id(c) in locked or len(c) <= 2]
        drop = {id(c) for c in self.learnts} - {id(c) for c in kept}
        self.learnts = kept
        for w in range(len(self.watches)):
            self.watches[w] = [c for c in self.watches[w] if id(c) not in drop]

    # -- driver -----------------------------------------------------------

    def solve(self, conflict_limit: int | None = None) -> bool | None:
        """True (SAT), False (UNSAT) or None when ``conflict_limit`` is hit."""
        if not self.ok:
            return False
        for u in self._units:
            if self.value[u] == -1:
                self.ok = False
                return False
            if self.value[u] == 0:
                self._assign(u, None)
        if self._propagate() is not None:
            self.ok = False
            return False
        max_learnts = max(1000, sum(len(w) for w in self.watches) // 6)
        restart_i = 1
        budget = luby(restart_i) * self.restart_base
        since = 0
        while True:
            confl = self._propagate()
            if confl is not None:
                self.conflicts += 1
                since += 1
                if not self.lim:
                    self.ok = False
                    return False
                learnt, back = self._analyze(confl)
                self._cancel(back)
                if len(learnt) == 1:
                    self._assign(learnt[0], None)
                else:
                    self.watches[learnt[0] ^ 1].append(learnt)
                    self.watches[learnt[1] ^ 1].append(learnt)
                    self.learnts.append(learnt)
                    self._assign(learnt[0], learnt)
                if conflict_limit is not None and self.conflicts >= conflict_limit:
                    self._cancel(0)
                    return None
                continue
            if since >= budget:
                since = 0
                restart_i += 1
                budget = luby(restart_i) * self.restart_base
                self._cancel(0)
            if len(self.learnts) - len(self.trail) >= max_learnts:
                self._reduce_db()
                max_learnts = int(max_learnts * 1.1)
            lit = self._pick()
            if lit < 0:
                return True
            self.decisions += 1
            self.lim.append(len(self.trail))
            self._assign(lit, None)

    def model(self) -> list[bool]:
        """Values indexed by variable; index 0 is a placeholder."""
        return [False] + [self.value[2 * v] == 1 for v in range(1, self.nv + 1)]


def solve_clauses(num_vars: int, clauses: Iterable[Sequence[int]]) -> list[bool] | None:
    s = CDCLSolver(num_vars, clauses)
    return s.model() if s.solve() else None

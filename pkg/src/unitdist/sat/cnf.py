"""CNF encodings of graph k-coloring and DIMACS text I/O."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

Clause = tuple[int, ...]


@dataclass(frozen=True)
class CnfFormula:
    """Immutable CNF formula, optionally tagged with the coloring it encodes.

    Variable ``var(i, c)`` (vertex ``i``, color ``c`` in ``1..k``) is
    ``i*k + c``.  Equality compares only the variable count and clauses.
    """

    var_count: int
    clauses: tuple[Clause, ...]
    k: int = field(default=0, compare=False)
    n: int = field(default=0, compare=False)
    edges: frozenset[tuple[int, int]] = field(default=frozenset(), compare=False, repr=False)

    def __post_init__(self):
        for cl in self.clauses:
            if not cl:
                raise ValueError("empty clause")
            for lit in cl:
                if lit == 0 or abs(lit) > self.var_count:
                    raise ValueError(f"literal {lit} out of range 1..{self.var_count}")

    def var(self, vertex: int, color: int) -> int:
        if not (0 <= vertex < self.n and 1 <= color <= self.k):
            raise IndexError(f"no variable for vertex {vertex}, color {color}")
        return vertex * self.k + color

    @property
    def var_map(self) -> dict[tuple[int, int], int]:
        return {(i, c): self.var(i, c) for i in range(self.n) for c in range(1, self.k + 1)}

    def with_clauses(self, extra: Iterable[Clause]) -> CnfFormula:
        return CnfFormula(
            self.var_count, self.clauses + tuple(tuple(c) for c in extra), self.k, self.n, self.edges
        )

    def decode(self, model: Sequence[bool]) -> list[int]:
        """Pick the first true color of every vertex (0 when none is set).

        ``model[v]`` is the value of variable ``v``; index 0 is unused.
        """
        out = []
        for i in range(self.n):
            col = 0
            for c in range(1, self.k + 1):
                if model[self.var(i, c)]:
                    col = c
                    break
            out.append(col)
        return out


def vertex_clause(i: int, k: int) -> Clause:
    return tuple(i * k + c for c in range(1, k + 1))


def edge_clauses(i: int, j: int, k: int) -> list[Clause]:
    return [(-(i * k + c), -(j * k + c)) for c in range(1, k + 1)]


def encode_coloring(
    n: int, edges: Iterable[tuple[int, int]], k: int, order: Sequence[int] | None = None
) -> CnfFormula:
    """Vertex clauses first, then ``k`` clauses per edge.

    ``order`` lists vertices in the order their vertex clauses are emitted.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    edges = [tuple(sorted(e)) for e in edges]
    order = range(n) if order is None else order
    clauses: list[Clause] = [vertex_clause(i, k) for i in order]
    for i, j in edges:
        if i == j:
            raise ValueError(f"self-loop at vertex {i}")
        clauses.extend(edge_clauses(i, j, k))
    return CnfFormula(n * k, tuple(clauses), k, n, frozenset(edges))


def encode_k_coloring(g, k: int) -> CnfFormula:
    """Encode a UnitGraph; its canonical order is already by distance from the origin."""
    return encode_coloring(g.n, g.edges, k)


def add_clique_break(f: CnfFormula, clique: Sequence[int]) -> CnfFormula:
    """Fix the j-th clique member to color j with unit clauses."""
    clique = list(clique)
    if len(set(clique)) != len(clique):
        raise ValueError("clique has repeated vertices")
    if len(clique) > f.k:
        raise ValueError(f"clique of size {len(clique)} exceeds k = {f.k}")
    for a in range(len(clique)):
        for b in range(a + 1, len(clique)):
            e = tuple(sorted((clique[a], clique[b])))
            if e not in f.edges:
                raise ValueError(f"vertices {e[0]} and {e[1]} are not adjacent; not a clique")
    return f.with_clauses((f.var(v, j + 1),) for j, v in enumerate(clique))


def equal_chain_clauses(members: Sequence[int], k: int) -> list[Clause]:
    m = len(members)
    out = []
    for c in range(1, k + 1):
        for j in range(m):
            a, b = members[j], members[(j + 1) % m]
            out.append((-(a * k + c), b * k + c))
    return out


def add_equal_chain(f: CnfFormula, members: Sequence[int]) -> CnfFormula:
    """Cyclic implications ``v[j],c -> v[j+1],c``: the set shares its colors."""
    members = list(members)
    if len(members) < 2:
        raise ValueError("equal chain needs at least two vertices")
    for v in members:
        f.var(v, 1)
    return f.with_clauses(equal_chain_clauses(members, f.k))


@dataclass(frozen=True)
class SplitFormula:
    """Edge clauses shared by every subgraph, plus per-subgraph vertex clauses.

    ``pinned`` vertices always keep their vertex clause.  ``extra`` clauses
    (companion chains and the like) belong to the common part.  Each of the
    ``breaks`` cliques is a candidate for symmetry breaking; the first one whose
    members all survive is used.
    """

    common: CnfFormula
    pinned: frozenset[int] = frozenset()
    breaks: tuple[tuple[int, ...], ...] = ()

    @property
    def n(self) -> int:
        return self.common.n

    @property
    def k(self) -> int:
        return self.common.k

    def delta(self, surviving: Iterable[int]) -> list[Clause]:
        alive = set(surviving) | self.pinned
        k = self.k
        out = [vertex_clause(i, k) for i in sorted(alive)]
        for cl in self.breaks:
            if all(v in alive for v in cl):
                out.extend(((v * k + j + 1),) for j, v in enumerate(cl))
                break
        return out

    def formula(self, surviving: Iterable[int]) -> CnfFormula:
        return self.common.with_clauses(self.delta(surviving))


def split_common(
    n: int,
    edges: Iterable[tuple[int, int]],
    k: int,
    pinned: Iterable[int] = (),
    extra: Iterable[Clause] = (),
    breaks: Iterable[Sequence[int]] = (),
) -> SplitFormula:
    """Split the coloring formula of a graph ``W ∪ C`` into common and variable parts.

    Deleted vertices keep their variables but lose their vertex clause, so
    setting all their colors false satisfies every edge clause they touch.
    """
    edges = sorted({tuple(sorted(e)) for e in edges})
    clauses: list[Clause] = []
    for i, j in edges:
        clauses.extend(edge_clauses(i, j, k))
    clauses.extend(tuple(c) for c in extra)
    common = CnfFormula(n * k, tuple(clauses), k, n, frozenset(edges))
    eset = common.edges
    good = []
    for cl in breaks:
        cl = tuple(cl)
        if len(cl) <= k and all(
            tuple(sorted((a, b))) in eset for x, a in enumerate(cl) for b in cl[x + 1 :]
        ):
            good.append(cl)
    return SplitFormula(common, frozenset(pinned), tuple(good))


# -- DIMACS -----------------------------------------------------------------

_META = re.compile(r"^c unitdist k=(\d+) n=(\d+)$")


def to_dimacs(f: CnfFormula, comments: Iterable[str] = ()) -> str:
    lines = [f"c {c}" for c in comments]
    if f.k:
        lines.append(f"c unitdist k={f.k} n={f.n}")
    lines.append(f"p cnf {f.var_count} {len(f.clauses)}")
    lines.extend(" ".join(map(str, cl)) + " 0" for cl in f.clauses)
    return "\n".join(lines) + "\n"


class DimacsError(ValueError):
    pass


def from_dimacs(text: str) -> CnfFormula:
    header = None
    k = n = 0
    clauses: list[Clause] = []
    cur: list[int] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s:
            continue
        if s.startswith("c"):
            m = _META.match(s)
            if m:
                k, n = int(m.group(1)), int(m.group(2))
            continue
        if s.startswith("p"):
            parts = s.split()
            if len(parts) != 4 or parts[1] != "cnf" or header is not None:
                raise DimacsError(f"line {lineno}: bad problem line {s!r}")
            header = (int(parts[2]), int(parts[3]))
            continue
        if header is None:
            raise DimacsError(f"line {lineno}: clause before problem line")
        try:
            nums = [int(x) for x in s.split()]
        except ValueError:
            raise DimacsError(f"line {lineno}: non-integer token") from None
        for x in nums:
            if x == 0:
                clauses.append(tuple(cur))
                cur = []
            else:
                cur.append(x)
    if header is None:
        raise DimacsError("missing problem line")
    if cur:
        raise DimacsError("last clause is not 0-terminated")
    if len(clauses) != header[1]:
        raise DimacsError(f"header announces {header[1]} clauses, found {len(clauses)}")
    if k and n * k != header[0]:
        k = n = 0
    return CnfFormula(header[0], tuple(clauses), k, n)


def verify_model(f: CnfFormula, model: Sequence[bool]) -> Clause | None:
    """Return the first clause violated by ``model``, or ``None``."""
    for cl in f.clauses:
        if not any((model[l] if l > 0 else not model[-l]) for l in cl):
            return cl
    return None

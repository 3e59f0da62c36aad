from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

from oracles import backtrack_colorable, critical_sets, minimum_property_subsets
from toys import MOSER, as_index_sets, moser_with_noise, noise_pool, two_spindles
from unitdist.checker import KeyProperty, PropertyOracle
from unitdist.exact import ExactPoint, is_unit
from unitdist.expr import construct
from unitdist.graph import empty_graph, from_points, named_graph
from unitdist.minimize import (
    Hypergraph,
    PropertyLostError,
    RoughOptions,
    RunLog,
    Strategy,
    batch_8421,
    build_hypergraph,
    build_reserve,
    candidate_deletions,
    evaluate,
    expand,
    expansion_moves,
    fixed_vertices,
    indicators,
    initial_state,
    iterate,
    maximal_independent_sets,
    orbit_feasibility,
    parse_schedule,
    peel,
    reduce,
    rough_reduce,
    universe_orbits,
)
from unitdist.symmetry import BaseCoord, enumerate_disk_orbits, geometric_auts, orbit_members

KP3 = KeyProperty(3)


def isolated(*xs):
    return [ExactPoint(x, 0) for x in xs]


def with_pendant_path():
    # vertex 1 of the spindle sits at (1, 0); the path runs further along the axis
    a, b = ExactPoint(2, 0), ExactPoint(3, 0)
    return from_points(list(MOSER.vertices) + [a, b])


# -- hypergraph -------------------------------------------------------------


def test_moser_is_vertex_critical():
    Y = build_hypergraph(PropertyOracle(MOSER, KP3), 1)
    assert sorted(sorted(e) for e in Y.of_degree(1)) == [[v] for v in range(7)]


def test_isolated_vertex_in_no_hyperedge():
    W = from_points(list(MOSER.vertices) + isolated(9))
    Y = build_hypergraph(PropertyOracle(W, KP3), 2)
    iso = W.index[ExactPoint(9, 0)]
    assert all(iso not in e for e in Y.all_edges())
    assert len(Y.of_degree(1)) == 7


def test_pendant_path_matches_oracle():
    W = with_pendant_path()
    assert W.n == 9
    Y = build_hypergraph(PropertyOracle(W, KP3), 2)
    assert sorted(map(sorted, Y.all_edges())) == sorted(map(sorted, critical_sets(W.n, W.edges, 3, 2)))
    assert Y.is_minimal()


def test_hypergraph_soundness_and_symmetry():
    W = moser_with_noise()
    orc = PropertyOracle(W, KP3)
    grp = geometric_auts(W)
    Y = build_hypergraph(orc, 2, grp)
    plain = build_hypergraph(PropertyOracle(W, KP3), 2, None, batch=False)
    assert sorted(map(sorted, Y.all_edges())) == sorted(map(sorted, plain.all_edges()))
    for e in Y.all_edges():
        keep = [v for v in range(W.n) if v not in e]
        assert backtrack_colorable(W.n, W.edges, 3, keep)
    assert Y.is_minimal()


def test_hypergraph_requires_property():
    with pytest.raises(PropertyLostError):
        build_hypergraph(PropertyOracle(MOSER.without([0]), KP3), 1)


# -- 8-4-2-1 ----------------------------------------------------------------


def test_batch_matches_naive():
    W = moser_with_noise()
    rng = random.Random(1)
    sets = [frozenset(rng.sample(range(W.n), rng.randint(1, 3))) for _ in range(64)]
    naive = [PropertyOracle(W, KP3).holds(s) for s in sets]
    assert batch_8421(PropertyOracle(W, KP3), sets) == naive


def test_batch_single_set_one_check():
    orc = PropertyOracle(MOSER, KP3)
    assert batch_8421(orc, [[0]]) == [False]
    assert orc.checks == 1


def test_batch_safe_group_one_check():
    W = from_points(list(MOSER.vertices) + isolated(9, 11, 13, 15, 17, 19, 21, 23))
    orc = PropertyOracle(W, KP3)
    iso = [W.index[p] for p in isolated(9, 11, 13, 15, 17, 19, 21, 23)]
    assert batch_8421(orc, [[v] for v in iso]) == [True] * 8
    assert orc.checks == 1


def test_batch_rejects_empty_set():
    with pytest.raises(ValueError):
        batch_8421(PropertyOracle(MOSER, KP3), [[]])


def test_parallel_evaluation_matches():
    W = moser_with_noise()
    sets = [frozenset([v]) for v in range(W.n)]
    seq = evaluate(PropertyOracle(W, KP3), sets)
    assert evaluate(PropertyOracle(W, KP3), sets, jobs=2) == seq
    assert batch_8421(PropertyOracle(W, KP3), sets, jobs=2) == seq


# -- candidate deletions ----------------------------------------------------


def test_mis():
    assert maximal_independent_sets([0, 1, 2], [(0, 1)]) == [frozenset({0, 2}), frozenset({1, 2})]
    path = maximal_independent_sets(range(4), [(0, 1), (1, 2), (2, 3)])
    assert sorted(map(sorted, path)) == [[0, 2], [0, 3], [1, 3]]
    assert len(maximal_independent_sets(range(6), [], cap=1)) == 1


def test_candidates_all_fixed():
    Y = Hypergraph((0, 1, 2), {1: [frozenset([0]), frozenset([1]), frozenset([2])]})
    assert candidate_deletions(3, Y) == []


def test_candidates_single_conflict():
    Y = Hypergraph((0, 1, 2), {2: [frozenset([0, 1])]})
    assert candidate_deletions(3, Y) == [frozenset({0, 2}), frozenset({1, 2})]


def test_candidates_split_by_higher_degree():
    Y = Hypergraph((0, 1, 2, 3), {3: [frozenset([0, 1, 2])]})
    got = candidate_deletions(4, Y)
    assert sorted(map(sorted, got)) == [[0, 1, 3], [0, 2, 3], [1, 2, 3]]
    assert candidate_deletions(4, Y, current_min=0) == []


def test_candidates_match_brute_force():
    W = moser_with_noise()
    Y = build_hypergraph(PropertyOracle(W, KP3), 2)
    edges = Y.all_edges()
    ok = [frozenset(s) for r in range(W.n + 1) for s in itertools.combinations(range(W.n), r)
          if not any(e <= set(s) for e in edges)]
    maximal = {s for s in ok if not any(s < t for t in ok) and s}
    assert set(candidate_deletions(W, Y)) == maximal


# -- reduce -----------------------------------------------------------------


def test_reduce_moser_plus_isolated():
    W = from_points(list(MOSER.vertices) + isolated(9, 11, 13))
    orc = PropertyOracle(W, KP3)
    res = reduce(orc, build_hypergraph(orc, 2))
    assert res.order == 7 and res.graphs == [MOSER]


def test_reduce_already_minimal():
    orc = PropertyOracle(MOSER, KP3)
    res = reduce(orc, build_hypergraph(orc, 1))
    assert res.order == 7 and res.graphs == [MOSER] and res.deletions == [frozenset()]


def test_reduce_two_spindles():
    W = two_spindles()
    orc = PropertyOracle(W, KP3)
    res = reduce(orc, build_hypergraph(orc, 2), current_min=W.n)
    size, hits = minimum_property_subsets(W.n, W.edges, 3)
    assert res.order == size == 7
    assert as_index_sets(W, res.graphs) == sorted(tuple(sorted(h)) for h in hits)


def test_reduce_with_group_expands_images():
    W = moser_with_noise()
    grp = geometric_auts(W)
    orc = PropertyOracle(W, KP3)
    res = reduce(orc, build_hypergraph(orc, 2, grp), group=grp)
    size, hits = minimum_property_subsets(W.n, W.edges, 3)
    assert res.order == size
    assert as_index_sets(W, res.graphs) == sorted(tuple(sorted(h)) for h in hits)
    assert len(res.representatives) <= len(res.graphs)


def test_reduce_never_grows():
    W = moser_with_noise()
    orc = PropertyOracle(W, KP3)
    res = reduce(orc, build_hypergraph(orc, 2), current_min=6)
    assert res.order is None


def test_reduce_budget_marks_partial():
    W = two_spindles()
    orc = PropertyOracle(W, KP3)
    res = reduce(orc, build_hypergraph(orc, 1), budget=1)
    assert res.partial and res.order is None
    assert res.steps[-1] == (14, 1, 0)


# -- rough passes -----------------------------------------------------------


def test_peel_removes_isolated():
    W = from_points(list(MOSER.vertices) + isolated(9, 11))
    assert peel(W, KP3, 1) == MOSER
    res = rough_reduce(W, KP3, RoughOptions(peel_threshold=1))
    assert res.graph == MOSER


def test_trim_covering_everything_is_identity():
    W = moser_with_noise()
    res = rough_reduce(W, KP3, RoughOptions(trim_r_sq=Fraction(100)))
    assert res.graph == W


def test_trim_rollback():
    res = rough_reduce(MOSER, KP3, RoughOptions(trim_r_sq=Fraction(1, 2)))
    assert res.graph == MOSER and "rolled back" in res.log[0]


def test_fixed_vertices():
    W = from_points(list(MOSER.vertices) + isolated(9))
    assert [W.vertices[i] for i in fixed_vertices(W, KP3)] == list(MOSER.vertices)


def test_orbit_feasibility_matches_oracle():
    g = named_graph("V25")
    orbits = universe_orbits(g.vertices)
    got = orbit_feasibility(g, KP3, orbits)
    for o, ok in zip(orbits, got):
        keep = [i for i, p in enumerate(g.vertices) if p not in o]
        assert ok == (not backtrack_colorable(g.n, g.edges, 3, keep))
    res = rough_reduce(g, KP3, RoughOptions(orbit_removal=True))
    assert res.graph.n < g.n
    assert PropertyOracle(res.graph, KP3).holds(())


def test_indicators():
    W = from_points(list(MOSER.vertices) + isolated(9))
    ind = indicators(W, KP3)
    assert ind == {"vertices": 8, "free": 1, "deg1": 7, "deg2": 0, "mis": 0}
    res = rough_reduce(W, KP3, RoughOptions(indicators=True))
    assert res.graph == W and res.scores


def test_rough_requires_property():
    with pytest.raises(PropertyLostError):
        rough_reduce(MOSER.without([0]), KP3, RoughOptions())


# -- reserve and expansion --------------------------------------------------


def test_reserve_empty():
    r = build_reserve(empty_graph(), enumerate_disk_orbits(1))
    assert r.graph.n == 0 and r.orbits == []


def test_reserve_contains_a():
    A = construct("H^1 (+) H^1")
    r = build_reserve(A, universe_orbits(A.vertices))
    assert set(A.vertices) <= r.graph.point_set()


def test_reserve_recount_on_h2():
    A = named_graph("V31")
    r = build_reserve(A, enumerate_disk_orbits(2))
    assert r.orbits
    assert len(r.orbits) == 8
    for orb, deg in zip(r.orbits, r.degrees):
        pool = list(A.vertices) + list(orb)
        recount = max(sum(1 for q in pool if is_unit(p, q)) for p in orb)
        assert recount == deg >= 4
    assert r.degrees == sorted(r.degrees, reverse=True)


def test_fill_half_orbit():
    full = [BaseCoord(*m).to_point() for m in orbit_members((0, 4, 4, 0))]
    A = from_points(full[:6] + [ExactPoint(0)])
    uni = universe_orbits(full + [ExactPoint(0)])
    W = expand(A, uni, "fill")
    assert 0 < W.n - A.n <= 6


def test_smallest_zero_is_identity():
    A = named_graph("H")
    assert expand(A, universe_orbits(construct("H^1").vertices), "smallest:0") == A
    assert expand(A, [], "none") == A


def test_expansion_adds_scheduled_points():
    W = moser_with_noise()
    uni = universe_orbits(list(W.vertices) + list(construct("H^1 (+) H^0").vertices))
    moves = expansion_moves(W, uni, None, "smallest:1")
    assert moves
    for i, (_, pts) in enumerate(moves[:5]):
        assert expand(W, uni, "smallest:1", move=i).point_set() == W.point_set() | set(pts)
    assert expansion_moves(W, uni, None, "smallest:1") == moves


def test_schedule_parsing():
    assert parse_schedule("fill+reserve:2+smallest:1") == [("fill", None), ("reserve", 2), ("smallest", 1)]
    for bad in ["grow", "reserve", "smallest:-1"]:
        with pytest.raises(ValueError):
            parse_schedule(bad)


# -- iterate ----------------------------------------------------------------


def test_iterate_moser_fixpoint():
    st, log = iterate(initial_state(MOSER, [], KP3), Strategy(schedule="none"))
    assert st.M == MOSER and st.setM == [MOSER]
    assert "event=fixpoint" in log.text()


def test_iterate_recovers_spindle_from_planted():
    tip = MOSER.vertices[6]
    planted = [tip] + random.Random(3).sample(noise_pool(), 3)
    A = from_points([p for p in MOSER.vertices if p != tip] + planted)
    uni = universe_orbits(list(A.vertices) + noise_pool())
    st, _ = iterate(initial_state(A, uni, KP3), Strategy(schedule="fill+smallest:2", max_iterations=3))
    assert st.M.n == 7
    assert minimum_property_subsets(A.n, A.edges, 3)[0] == 7
    assert MOSER in st.setM


def test_iterate_matches_oracle_and_is_deterministic():
    W = moser_with_noise()
    runs = [iterate(initial_state(W, [], KP3), Strategy(schedule="fill")) for _ in range(2)]
    (st, log), (_, log2) = runs
    size, hits = minimum_property_subsets(W.n, W.edges, 3)
    assert st.M.n == size
    assert as_index_sets(W, st.setM) == sorted(tuple(sorted(h)) for h in hits)
    assert log.text() == log2.text()
    ms = [int(x.split("M=")[1].split()[0]) for x in log.lines if " M=" in x]
    assert ms == sorted(ms, reverse=True)


def test_iterate_setm_graphs_are_minimal():
    st, _ = iterate(initial_state(two_spindles(), [], KP3), Strategy(schedule="none"))
    for g in st.setM:
        orc = PropertyOracle(g, KP3)
        assert g.n == st.M.n and orc.holds(())
        assert not any(orc.holds([v]) for v in range(g.n))


def test_iterate_requires_property():
    with pytest.raises(PropertyLostError):
        iterate(initial_state(MOSER.without([0]), [], KP3), Strategy())


def test_runlog_clock():
    log = RunLog(clock=lambda: 1.5)
    log.record("x", a=1)
    assert log.text() == "seq=0 t=1.500 event=x a=1\n"
    with pytest.raises(ValueError):
        Strategy(budget=0)

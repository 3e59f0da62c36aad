from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import backtrack_colorable, brute_colorable, corpus, write_fake_solver
from unitdist.graph import named_graph
from unitdist.sat import (
    BackendError,
    CDCLSolver,
    DimacsError,
    EmbeddedBackend,
    ExternalBackend,
    add_clique_break,
    add_equal_chain,
    encode_coloring,
    encode_k_coloring,
    from_dimacs,
    luby,
    parse_backend,
    parse_solver_output,
    solve,
    solve_clauses,
    split_common,
    to_dimacs,
    verify_model,
)

TRIANGLE = [(0, 1), (0, 2), (1, 2)]
DIAMOND = [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]
MOSER = named_graph("MOSER")


def first_triangle(n, edges):
    es = set(edges)
    for a, b, c in itertools.combinations(range(n), 3):
        if (a, b) in es and (a, c) in es and (b, c) in es:
            return [a, b, c]
    return None


# -- encoding structure -----------------------------------------------------


def test_triangle_counts():
    f = encode_coloring(3, TRIANGLE, 4)
    assert f.var_count == 12 and len(f.clauses) == 15
    assert "p cnf 12 15" in to_dimacs(f)


def test_single_vertex_and_edge_k1():
    f = encode_coloring(1, [], 1)
    assert f.var_count == 1 and f.clauses == ((1,),)
    assert solve(f).sat
    assert not solve(encode_coloring(2, [(0, 1)], 1)).sat


@given(st.integers(1, 9), st.integers(1, 5), st.randoms(use_true_random=False))
def test_clause_count_formula(n, k, rnd):
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rnd.random() < 0.4]
    f = encode_coloring(n, edges, k)
    assert f.var_count == n * k
    assert len(f.clauses) == n + k * len(edges)
    assert f.var(n - 1, k) == n * k


def test_clique_break_adds_three_units():
    f = encode_coloring(3, TRIANGLE, 4)
    g = add_clique_break(f, [0, 1, 2])
    assert len(g.clauses) == len(f.clauses) + 3
    assert g.clauses[-3:] == ((f.var(0, 1),), (f.var(1, 2),), (f.var(2, 3),))
    assert add_clique_break(f, []) == f


def test_clique_break_rejects():
    f = encode_coloring(4, DIAMOND, 3)
    with pytest.raises(ValueError):
        add_clique_break(f, [0, 3])
    with pytest.raises(ValueError):
        add_clique_break(encode_coloring(5, list(itertools.combinations(range(5), 2)), 3), [0, 1, 2, 3])


def test_equal_chain_counts():
    f = encode_coloring(2, [], 4)
    assert len(add_equal_chain(f, [0, 1]).clauses) - len(f.clauses) == 8
    f5 = encode_coloring(5, [], 3)
    assert len(add_equal_chain(f5, [0, 2, 4]).clauses) - len(f5.clauses) == 9
    with pytest.raises(ValueError):
        add_equal_chain(f, [0])


def test_equal_chain_semantics():
    assert not solve(add_equal_chain(encode_coloring(2, [(0, 1)], 4), [0, 1])).sat
    assert solve(add_equal_chain(encode_coloring(4, DIAMOND, 3), [0, 3])).sat
    # a separating coloring exists with four colors but chain forces equality
    res = solve(add_equal_chain(encode_coloring(4, DIAMOND, 4), [0, 3]))
    cols = encode_coloring(4, DIAMOND, 4).decode(res.model)
    assert cols[0] == cols[3]


def _all_graphs(n):
    pairs = list(itertools.combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        yield [p for b, p in enumerate(pairs) if mask >> b & 1]


@pytest.mark.parametrize("n", [3, 4, 5])
def test_break_preserves_sat_exhaustive(n):
    for edges in _all_graphs(n):
        tri = first_triangle(n, edges)
        if tri is None:
            continue
        for k in (3, 4):
            f = encode_coloring(n, edges, k)
            assert solve(f).sat == solve(add_clique_break(f, tri)).sat


def test_break_preserves_sat_sampled():
    rng = random.Random(7)
    seen = 0
    while seen < 300:
        n = rng.randint(6, 9)
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.5]
        tri = first_triangle(n, edges)
        if tri is None:
            continue
        seen += 1
        k = rng.choice([3, 4])
        f = encode_coloring(n, edges, k)
        truth = backtrack_colorable(n, edges, k)
        assert solve(f).sat == truth == solve(add_clique_break(f, tri)).sat


# -- split formulas ---------------------------------------------------------


def test_split_full_equals_monolithic():
    sf = split_common(MOSER.n, MOSER.edges, 3)
    mono = encode_k_coloring(MOSER, 3)
    assert sorted(sf.formula(range(MOSER.n)).clauses) == sorted(mono.clauses)
    assert solve(sf.formula(range(MOSER.n))).sat is False


def test_split_empty_delta():
    sf = split_common(3, TRIANGLE, 2)
    assert solve(sf.formula([])).sat


def test_split_matches_monolithic_on_random_subgraphs():
    rng = random.Random(11)
    sf = split_common(MOSER.n, MOSER.edges, 3)
    for _ in range(200):
        keep = sorted(v for v in range(MOSER.n) if rng.random() < 0.8)
        sub = MOSER.induced(keep)
        assert solve(sf.formula(keep)).sat == solve(encode_k_coloring(sub, 3)).sat


def test_split_break_used_only_when_alive():
    sf = split_common(4, DIAMOND, 3, breaks=[(0, 1, 2)])
    assert len(sf.delta([0, 1, 2, 3])) == 4 + 3
    assert len(sf.delta([1, 2, 3])) == 3
    assert split_common(4, DIAMOND, 3, breaks=[(0, 3)]).breaks == ()


def test_split_pinned_keep_vertex_clause():
    sf = split_common(3, TRIANGLE, 2, pinned=[0, 1, 2])
    assert not solve(sf.formula([])).sat


# -- solver -----------------------------------------------------------------


def test_solver_examples():
    assert not solve(encode_coloring(3, TRIANGLE, 2)).sat
    assert solve(encode_coloring(3, TRIANGLE, 3)).sat
    assert not solve(encode_k_coloring(MOSER, 3)).sat
    assert solve(encode_k_coloring(MOSER, 4)).sat
    assert solve(encode_k_coloring(named_graph("H"), 3)).sat


def test_models_are_proper():
    h2 = named_graph("V31")
    f = encode_k_coloring(h2, 4)
    res = solve(f)
    assert res.sat and verify_model(f, res.model) is None
    cols = f.decode(res.model)
    assert all(cols[i] != cols[j] for i, j in h2.edges)


def test_luby():
    assert [luby(i) for i in range(1, 16)] == [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]


def test_empty_clause_list_and_conflict_limit():
    assert solve_clauses(3, []) is not None
    assert solve_clauses(1, [(1,), (-1,)]) is None
    # pigeonhole 7 into 6 needs many conflicts
    n, h = 7, 6
    v = lambda p, q: p * h + q + 1
    cls = [tuple(v(p, q) for q in range(h)) for p in range(n)]
    cls += [(-v(a, q), -v(b, q)) for q in range(h) for a in range(n) for b in range(a + 1, n)]
    assert CDCLSolver(n * h, cls).solve(conflict_limit=5) is None


def test_oracle_corpus():
    """Solver verdicts match brute force on a generated corpus of small graphs."""
    graphs = corpus(500, seed=2024, n_max=12)
    agree = 0
    for n, edges in graphs:
        for k in (2, 3, 4):
            truth = brute_colorable(n, edges, k) if n <= 7 else backtrack_colorable(n, edges, k)
            assert solve(encode_coloring(n, edges, k)).sat == truth, (n, edges, k)
            agree += 1
    assert agree == 1500


def test_oracles_agree_on_small_graphs():
    for n, edges in corpus(150, seed=5, n_max=7):
        for k in (2, 3):
            assert brute_colorable(n, edges, k) == backtrack_colorable(n, edges, k)


# -- DIMACS -----------------------------------------------------------------


def test_dimacs_roundtrip():
    f = add_clique_break(encode_k_coloring(MOSER, 4), [0, 1, 2])
    g = from_dimacs(to_dimacs(f, ["moser"]))
    assert g == f and (g.k, g.n) == (4, 7)


@pytest.mark.parametrize(
    "text",
    ["1 2 0\n", "p cnf 2 1\n1 x 0\n", "p cnf 2 2\n1 2 0\n", "p cnf 2 1\n1 2\n", "p dnf 2 1\n1 0\n", "p cnf 1 1\n3 0\n"],
)
def test_dimacs_rejects(text):
    with pytest.raises((DimacsError, ValueError)):
        from_dimacs(text)


# -- external backend -------------------------------------------------------


def test_parse_solver_output():
    r = parse_solver_output("c hi\ns SATISFIABLE\nv 1 -2\nv 3 0\n", 3)
    assert r.sat and r.model == (False, True, False, True)
    assert not parse_solver_output("s UNSATISFIABLE\n", 3).sat
    for bad in ["", "s UNKNOWN\n", "s SATISFIABLE\nv 1 q 0\n", "s SATISFIABLE\nv 9 0\n"]:
        with pytest.raises(BackendError):
            parse_solver_output(bad, 3)


def test_external_backend_agrees(tmp_path):
    be = ExternalBackend(write_fake_solver(tmp_path / "ok.py"))
    for n, edges, k in [(3, TRIANGLE, 2), (3, TRIANGLE, 3), (4, DIAMOND, 3)]:
        f = encode_coloring(n, edges, k)
        assert solve(f, be).sat == solve(f, EmbeddedBackend()).sat


@pytest.mark.parametrize("mode", ["garbage", "crash", "badmodel"])
def test_external_backend_failures(tmp_path, mode):
    be = ExternalBackend(write_fake_solver(tmp_path / f"{mode}.py", mode))
    with pytest.raises(BackendError):
        solve(encode_coloring(3, TRIANGLE, 3), be)


def test_external_missing(tmp_path):
    with pytest.raises(BackendError):
        solve(encode_coloring(1, [], 1), ExternalBackend(str(tmp_path / "nope")))


def test_parse_backend(monkeypatch, tmp_path):
    monkeypatch.delenv("UDG_SOLVER", raising=False)
    assert isinstance(parse_backend(None), EmbeddedBackend)
    assert isinstance(parse_backend("embedded"), EmbeddedBackend)
    with pytest.raises(ValueError):
        parse_backend("external")
    with pytest.raises(ValueError):
        parse_backend("minisat")
    monkeypatch.setenv("UDG_SOLVER", "/bin/solver")
    assert parse_backend(None) == ExternalBackend("/bin/solver")
    assert parse_backend("external:/x").path == "/x"

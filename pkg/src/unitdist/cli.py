"""Command-line driver: build, check, minimize, orbits, export, render."""

from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import checker
from .checker import Companion, KeyProperty, PropertyOracle, VacuousError
from .exact import ParseError, format_point, rotor
from .expr import ExprError, construct
from .graph import UnitGraph
from .graphio import GraphFileError, dumps, read_graph, to_json, to_svg, write_graph
from .minimize import (
    RoughOptions,
    RunLog,
    Strategy,
    initial_state,
    iterate,
    rough_reduce,
    universe_orbits,
)
from .sat import BackendError, add_clique_break, encode_k_coloring, parse_backend, to_dimacs
from .symmetry import geometric_auts, orbit_table

log = logging.getLogger("unitdist")

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_BACKEND = 0, 1, 2, 3


class UsageError(Exception):
    pass


# -- config files -----------------------------------------------------------

CONFIG_KEYS = {
    "expr": str,
    "graph": str,
    "k": int,
    "companion": str,
    "backend": str,
    "jobs": int,
    "budget": int,
    "out": str,
    "schedule": str,
    "max_degree": int,
    "iterations": int,
    "universe": str,
    "symmetry": lambda s: s.lower() in ("1", "true", "yes", "on"),
    "reserve_degree": int,
    "pool": int,
}


def load_config(path: str | Path) -> dict:
    """Flat ``key = value`` lines; ``#`` comments; unknown keys are errors."""
    cfg: dict = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not eq or not key:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        if key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
        try:
            cfg[key] = CONFIG_KEYS[key](value)
        except ValueError:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {value!r}") from None
    return cfg


def _merge_config(args: argparse.Namespace) -> None:
    if not getattr(args, "config", None):
        return
    for k, v in load_config(args.config).items():
        if getattr(args, k, None) is None:
            setattr(args, k, v)


# -- shared helpers ---------------------------------------------------------


def _input_graph(args) -> UnitGraph:
    if args.expr and args.graph:
        raise UsageError("give either --expr or --graph, not both")
    if args.expr:
        return construct(args.expr)
    if args.graph:
        return read_graph(args.graph)
    raise UsageError("an input graph is required (--expr or --graph)")


def _index_list(text: str, g: UnitGraph) -> list[int]:
    try:
        out = [int(x) for x in text.replace(";", ",").split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated vertex indices, got {text!r}") from None
    for i in out:
        if not 0 <= i < g.n:
            raise UsageError(f"vertex index {i} out of range 0..{g.n - 1}")
    return out


def _companion(spec: str | None, g: UnitGraph) -> Companion:
    if spec is None or spec == "none":
        return Companion.none()
    kind, _, rest = spec.partition(":")
    if kind == "mono":
        idx = _index_list(rest, g)
        if len(idx) != 2:
            raise UsageError("mono companion needs exactly two vertex indices")
        return Companion.mono_edge(g.vertices[idx[0]], g.vertices[idx[1]])
    if kind == "nonmono":
        idx = _index_list(rest, g)
        return Companion.nonmono_clique(g.vertices[i] for i in idx)
    if kind == "graph":
        path, _, rot = rest.rpartition(":")
        if not path:
            path, rot = rest, ""
        if rot:
            try:
                rotor(rot)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
        return Companion.subgraph(read_graph(path), rot or None)
    raise UsageError(f"unknown companion {spec!r}")


def _backend(args):
    try:
        return parse_backend(args.backend, getattr(args, "pool", None) or 4)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _out_dir(args) -> Path | None:
    if not args.out:
        return None
    p = Path(args.out)
    p.mkdir(parents=True, exist_ok=True)
    return p


# -- commands ---------------------------------------------------------------


def cmd_build(args) -> int:
    g = _input_graph(args)
    msg = f"vertices={g.n} edges={g.m}"
    if not args.no_symmetry:
        msg += f" symmetry={geometric_auts(g).order}"
    print(msg)
    if args.out:
        write_graph(g, args.out, [args.expr or args.graph])
    return EXIT_OK


def _print_coloring(cols: list[int], g: UnitGraph) -> None:
    for i, c in enumerate(cols):
        print(f"v {i} {c} {format_point(g.vertices[i])}")


def cmd_check(args) -> int:
    g = _input_graph(args)
    be = _backend(args)
    k = args.k
    if args.chromatic:
        try:
            chi = checker.chromatic_number(g, args.kmax, be)
        except ValueError as exc:
            print(f"chromatic number: {exc}")
            return EXIT_FALSE
        print(chi)
        return EXIT_OK
    if args.mono:
        u, v = _index_list(args.mono, g)
        ok = checker.is_mono_pair(g, u, v, k, be)
        print(f"mono-pair({u},{v}) k={k}: {ok}")
        return EXIT_OK if ok else EXIT_FALSE
    if args.nonmono:
        members = _index_list(args.nonmono, g)
        ok = checker.is_non_mono_set(g, members, k, args.method, be)
        print(f"non-mono-set k={k}: {ok}")
        return EXIT_OK if ok else EXIT_FALSE
    if args.spindle:
        a, _, b = args.spindle.partition("/")
        ok = checker.verify_spindle(g, _index_list(a, g), _index_list(b, g), k, be)
        print(f"spindle k={k}: {ok}")
        return EXIT_OK if ok else EXIT_FALSE
    if args.key:
        kp = KeyProperty(k, _companion(args.companion, g))
        ok = PropertyOracle(g, kp, be).holds(())
        print(f"key-property k={k} companion={kp.companion.describe()}: {ok}")
        return EXIT_OK if ok else EXIT_FALSE
    cols = checker.find_coloring(g, k, be)
    if cols is None:
        print(f"{k}-colorable: false (UNSAT)")
        return EXIT_FALSE
    print(f"{k}-colorable: true")
    if args.certificate:
        _print_coloring(cols, g)
    return EXIT_OK


def cmd_minimize(args) -> int:
    g = _input_graph(args)
    be = _backend(args)
    kp = KeyProperty(args.k, _companion(args.companion, g))
    uni_pts = list(g.vertices)
    if args.universe:
        uni_pts += list(construct(args.universe).vertices)
    fixed = [kp.companion.geometric_points()] if kp.companion.geometric_points() else []
    universe = universe_orbits(uni_pts, fixed)
    A = g
    rough_log: list[str] = []
    if args.trim is not None or args.peel is not None:
        rr = rough_reduce(
            g,
            kp,
            RoughOptions(
                trim_r_sq=Fraction(args.trim) if args.trim is not None else None,
                peel_threshold=args.peel,
            ),
            be,
        )
        A = rr.graph
        rough_log = rr.log
    strategy = Strategy(
        schedule=args.schedule or "fill+reserve:1",
        max_degree=args.max_degree if args.max_degree is not None else 2,
        budget=args.budget or 10**6,
        max_iterations=args.iterations if args.iterations is not None else 20,
        symmetry=args.symmetry if args.symmetry is not None else True,
        reserve_degree=args.reserve_degree or 4,
        jobs=args.jobs or 1,
    )
    state = initial_state(A, universe, kp, strategy.reserve_degree)
    runlog = RunLog()
    for line in rough_log:
        runlog.record("rough", note=line.replace(" ", "_"))
    state, runlog = iterate(state, strategy, be, runlog)
    print(f"M={state.M.n} setM={len(state.setM)} A={state.A.n}")
    out = _out_dir(args)
    if out:
        for i, m in enumerate(state.setM):
            write_graph(m, out / f"M{i:03d}.udg", [f"minimal graph {i} of {len(state.setM)}"])
        write_graph(state.A, out / "A.udg", ["union of minimal graphs"])
        (out / "run.log").write_text(runlog.text())
        try:
            tab = orbit_table(None, state.A, state.setM)
            (out / "orbits.tsv").write_text(tab.tsv())
        except ValueError:
            log.info("vertices lack base coordinates; orbit table skipped")
    else:
        sys.stdout.write(runlog.text())
    return EXIT_OK


def cmd_orbits(args) -> int:
    g = _input_graph(args)
    ms = [read_graph(p) for p in args.m] if args.m else [g]
    try:
        tab = orbit_table(None, g, ms)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    sys.stdout.write(tab.tsv() if args.tsv else tab.text())
    return EXIT_OK


def cmd_export(args) -> int:
    g = _input_graph(args)
    if args.dimacs:
        f = encode_k_coloring(g, args.k)
        if args.clique:
            f = add_clique_break(f, _index_list(args.clique, g))
        text = to_dimacs(f)
    elif args.json:
        text = to_json(g)
    else:
        text = dumps(g)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_render(args) -> int:
    g = _input_graph(args)
    hl = _index_list(args.highlight, g) if args.highlight else []
    svg = to_svg(g, hl, size=args.size)
    if args.out:
        Path(args.out).write_text(svg)
    else:
        sys.stdout.write(svg)
    return EXIT_OK


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="unitdist", description="Unit-distance graph toolkit.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_help="output path"):
        sp.add_argument("-e", "--expr", help="graph expression, e.g. 'H^2'")
        sp.add_argument("--graph", help="graph file (udg 1 format)")
        sp.add_argument("--config", help="flat key = value config file")
        sp.add_argument("--out", help=out_help)
        sp.add_argument("--k", type=int, default=None, help="number of colors")

    def solver(sp):
        sp.add_argument("--backend", help="embedded | external:<path> (default: UDG_SOLVER or embedded)")
        sp.add_argument("--jobs", type=int, default=None)
        sp.add_argument("--pool", type=int, default=None, help="max concurrent external solver processes")

    b = sub.add_parser("build", help="evaluate an expression and summarize the graph")
    common(b, "write the graph file here")
    b.add_argument("--no-symmetry", action="store_true", help="skip the automorphism count")
    b.set_defaults(func=cmd_build)

    c = sub.add_parser("check", help="run a coloring predicate")
    common(c)
    solver(c)
    g = c.add_mutually_exclusive_group()
    g.add_argument("--chromatic", action="store_true", help="print the chromatic number")
    g.add_argument("--mono", metavar="U,V", help="is U,V a mono-pair?")
    g.add_argument("--nonmono", metavar="LIST", help="is the set non-mono?")
    g.add_argument("--spindle", metavar="X,Y/X,Z", help="verify a spindle")
    g.add_argument("--key", action="store_true", help="check the key property")
    c.add_argument("--kmax", type=int, default=8)
    c.add_argument("--method", default="clique_companion", choices=["clique_companion", "equal_chain", "both"])
    c.add_argument("--companion", help="none | graph:<path>:<rotor> | mono:<u>,<v> | nonmono:<list>")
    c.add_argument("--certificate", action="store_true", help="print the coloring model")
    c.set_defaults(func=cmd_check)

    m = sub.add_parser("minimize", help="expand/reduce search for minimum subgraphs")
    common(m, "output directory")
    solver(m)
    m.add_argument("--companion")
    m.add_argument("--universe", help="expression whose vertices may be added")
    m.add_argument("--schedule", help="none | fill[:N] | reserve:N | smallest:N, joined by +")
    m.add_argument("--max-degree", dest="max_degree", type=int)
    m.add_argument("--budget", type=int)
    m.add_argument("--iterations", type=int)
    m.add_argument("--reserve-degree", dest="reserve_degree", type=int)
    m.add_argument("--no-symmetry", dest="symmetry", action="store_const", const=False, default=None)
    m.add_argument("--trim", help="rough pass: keep vertices with |v|^2 <= this rational")
    m.add_argument("--peel", type=int, help="rough pass: peel vertices of degree below this")
    m.set_defaults(func=cmd_minimize)

    o = sub.add_parser("orbits", help="orbit-filling table")
    common(o)
    o.add_argument("--m", nargs="*", help="graph files of the minimal graphs")
    o.add_argument("--tsv", action="store_true")
    o.set_defaults(func=cmd_orbits)

    x = sub.add_parser("export", help="DIMACS or machine-readable graph")
    common(x)
    fmt = x.add_mutually_exclusive_group()
    fmt.add_argument("--dimacs", action="store_true")
    fmt.add_argument("--json", action="store_true")
    x.add_argument("--clique", help="symmetry-breaking clique (vertex indices)")
    x.set_defaults(func=cmd_export)

    r = sub.add_parser("render", help="SVG drawing")
    common(r)
    r.add_argument("--highlight", help="vertex indices drawn enlarged")
    r.add_argument("--size", type=int, default=600)
    r.set_defaults(func=cmd_render)
    return p


_DEFAULT_K = {"check": 4, "minimize": 4, "export": 4}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        _merge_config(args)
        if getattr(args, "k", None) is None:
            args.k = _DEFAULT_K.get(args.command, 4)
        if args.k < 1:
            raise UsageError("--k must be at least 1")
        return args.func(args)
    except (UsageError, ExprError, GraphFileError, ParseError, FileNotFoundError) as exc:
        print(f"unitdist: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except VacuousError as exc:
        print(f"unitdist: vacuous: {exc}", file=sys.stderr)
        return EXIT_FALSE
    except BackendError as exc:
        print(f"unitdist: backend failure: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except ValueError as exc:
        print(f"unitdist: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

from __future__ import annotations

import json
import logging
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from oracles import write_fake_solver
from unitdist.cli import main
from unitdist.expr import construct
from unitdist.graphio import GraphFileError, dumps, loads, read_graph, write_graph
from unitdist.sat import from_dimacs
from unitdist.symmetry import BaseCoord, to_base_coord

TRIANGLE = "[(0; 0), (1; 0), (1/2; 1/2*sqrt(3))]"
SVG = "{http://www.w3.org/2000/svg}"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_build_h2(capsys):
    code, out, _ = run(capsys, "build", "-e", "H^2")
    assert code == 0 and "vertices=31" in out and "symmetry=" in out


def test_build_writes_file(capsys, tmp_path):
    path = tmp_path / "g.udg"
    assert run(capsys, "build", "-e", "H^1", "--no-symmetry", "--out", str(path))[0] == 0
    assert read_graph(path) == construct("H^1")


def test_check_chromatic(capsys):
    code, out, _ = run(capsys, "check", "--chromatic", "-e", "D + eta^2*D", "--kmax", "5")
    assert code == 0 and out.strip() == "4"


def test_check_exit_codes(capsys):
    assert run(capsys, "check", "-e", "MOSER", "--k", "4")[0] == 0
    code, out, _ = run(capsys, "check", "-e", "MOSER", "--k", "3")
    assert code == 1 and "UNSAT" in out
    assert run(capsys, "check", "-e", "D", "--k", "3", "--mono", "0,3")[0] == 0
    assert run(capsys, "check", "-e", "D", "--k", "4", "--mono", "0,3")[0] == 1
    assert run(capsys, "check", "-e", "D", "--k", "3", "--nonmono", "0,1", "--method", "both")[0] == 0
    assert run(capsys, "check", "-e", "MOSER", "--k", "3", "--spindle", "0,5/0,6")[0] == 0
    assert run(capsys, "check", "-e", "MOSER", "--k", "3", "--key")[0] == 0
    assert run(capsys, "check", "-e", "D", "--k", "3", "--key", "--companion", "mono:0,3")[0] == 0
    assert run(capsys, "check", "-e", "MOSER", "--chromatic", "--kmax", "3")[0] == 1


def test_check_certificate(capsys):
    code, out, _ = run(capsys, "check", "-e", "H", "--k", "3", "--certificate")
    lines = [x for x in out.splitlines() if x.startswith("v ")]
    assert code == 0 and len(lines) == 7


def test_usage_errors(capsys):
    assert run(capsys, "build", "-e", "H^")[0] == 2
    assert run(capsys, "build")[0] == 2
    assert run(capsys, "build", "-e", "H", "--graph", "x")[0] == 2
    assert run(capsys, "check", "-e", "D", "--mono", "0,9")[0] == 2
    assert run(capsys, "check", "-e", "D", "--mono", "0,1")[0] == 2
    assert run(capsys, "check", "-e", "D", "--k", "0")[0] == 2
    assert run(capsys, "check", "-e", "D", "--backend", "nope")[0] == 2
    assert run(capsys, "check", "-e", "D", "--key", "--companion", "weird:1")[0] == 2
    assert run(capsys, "build", "--graph", "/nonexistent.udg")[0] == 2
    with pytest.raises(SystemExit):
        main(["frobnicate"])


def test_backend_failure_exit_code(capsys, tmp_path):
    bad = write_fake_solver(tmp_path / "bad.py", "garbage")
    code, _, err = run(capsys, "check", "-e", "D", "--backend", f"external:{bad}")
    assert code == 3 and "backend failure" in err
    ok = write_fake_solver(tmp_path / "ok.py")
    assert run(capsys, "check", "-e", "D", "--k", "3", "--backend", f"external:{ok}")[0] == 0


def test_solver_from_environment(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("UDG_SOLVER", write_fake_solver(tmp_path / "crash.py", "crash"))
    assert run(capsys, "check", "-e", "D")[0] == 3


def test_config(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# toy run\nexpr = MOSER\nk = 3\n")
    assert run(capsys, "check", "--config", str(cfg))[0] == 1
    assert run(capsys, "check", "--config", str(cfg), "--k", "4")[0] == 0
    cfg.write_text("expr = MOSER\ncolour = 3\n")
    code, _, err = run(capsys, "check", "--config", str(cfg))
    assert code == 2 and "unknown config key" in err
    cfg.write_text("k = three\n")
    assert run(capsys, "check", "--config", str(cfg))[0] == 2


def test_export_dimacs(capsys):
    code, out, _ = run(capsys, "export", "--dimacs", "-e", TRIANGLE)
    assert code == 0 and "p cnf 12 15" in out
    f = from_dimacs(out)
    assert f.var_count == 12 and len(f.clauses) == 15
    out = run(capsys, "export", "--dimacs", "-e", TRIANGLE, "--clique", "0,1,2")[1]
    assert "p cnf 12 18" in out


def test_export_json_and_text(capsys):
    data = json.loads(run(capsys, "export", "--json", "-e", "H")[1])
    assert len(data["vertices"]) == 7 and len(data["edges"]) == 12
    assert loads(run(capsys, "export", "-e", "H")[1]) == construct("H")


def test_render_svg(capsys, tmp_path):
    path = tmp_path / "m.svg"
    assert run(capsys, "render", "-e", "MOSER", "--highlight", "0,5", "--out", str(path))[0] == 0
    root = ET.parse(path).getroot()
    assert root.tag == f"{SVG}svg"
    circles = root.findall(f".//{SVG}circle")
    assert len(circles) == 7 and len(root.findall(f".//{SVG}line")) == 11
    radii = sorted(float(c.get("r")) for c in circles)
    assert radii[-1] > radii[0] and radii[-2] == radii[-1]


def test_orbits_command(capsys, tmp_path):
    code, out, _ = run(capsys, "orbits", "-e", "H^1 (+) H^1", "--tsv")
    assert code == 0 and out.startswith("# orbit")
    rows = out.strip().splitlines()[1:]
    assert sum(int(r.split("\t")[4]) for r in rows) == 163
    assert run(capsys, "orbits", "-e", "[(sqrt(2); 0)]")[0] == 2


def test_minimize_command(capsys, tmp_path):
    g = tmp_path / "w.udg"
    write_graph(construct("MOSER + [(5; 0), (6; 0)]"), g)
    out_dir = tmp_path / "run"
    code, out, _ = run(capsys, "minimize", "--graph", str(g), "--k", "3", "--schedule", "none", "--out", str(out_dir))
    assert code == 0 and "M=7 setM=1" in out
    assert read_graph(out_dir / "M000.udg") == construct("MOSER")
    assert "event=fixpoint" in (out_dir / "run.log").read_text()
    assert (out_dir / "orbits.tsv").exists()


def test_minimize_with_rough_pass(capsys):
    code, out, _ = run(capsys, "minimize", "-e", "MOSER + [(5; 0)]", "--k", "3", "--schedule", "none", "--peel", "1")
    assert code == 0 and "M=7" in out and "event=rough" in out


# -- graph files ------------------------------------------------------------


@pytest.mark.parametrize("expr", ["H", "H^2", "MOSER", "V25 + rho*V25", "trim(H^1 (+) H^1, 2)"])
def test_graph_file_roundtrip(expr):
    g = construct(expr)
    assert loads(dumps(g, ["note"])) == g


def test_graph_file_duplicates(caplog):
    with caplog.at_level(logging.WARNING):
        g = loads("udg 1\n(0; 0)\n(1; 0)  # again below\n(1; 0)\n")
    assert g.n == 2 and g.m == 1
    assert "duplicate" in caplog.text and ":4:" in caplog.text


def test_graph_file_errors():
    with pytest.raises(GraphFileError) as ei:
        loads("udg 1\n(0; 0)\n(2/4; 0)\n")
    assert ei.value.line == 3
    with pytest.raises(GraphFileError):
        loads("(0; 0)\n")
    with pytest.raises(GraphFileError):
        loads("")


def test_base_coordinate_from_file():
    g = loads("udg 1\n(1/2 + 1/2*sqrt(33); 0)\n")
    assert to_base_coord(g.vertices[0]) == BaseCoord(6, 6, 0, 0)


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "unitdist.cli", "build", "-e", "H^2", "--no-symmetry"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and "vertices=31" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "unitdist.cli", "build", "-e", "("], capture_output=True, text=True)
    assert proc.returncode == 2

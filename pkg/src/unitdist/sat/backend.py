"""Solve backends: the embedded CDCL solver or an external DIMACS solver process."""

from __future__ import annotations

import os
import subprocess
import tempfile
import threading
from dataclasses import dataclass, field

from .cdcl import CDCLSolver
from .cnf import CnfFormula, to_dimacs, verify_model


class BackendError(RuntimeError):
    """The solver failed to produce a trustworthy verdict."""


@dataclass(frozen=True)
class SolveResult:
    sat: bool
    model: tuple[bool, ...] | None = None

    def __bool__(self) -> bool:
        return self.sat


@dataclass(frozen=True)
class EmbeddedBackend:
    name: str = "embedded"

    def run(self, f: CnfFormula) -> SolveResult:
        s = CDCLSolver(f.var_count, f.clauses)
        if s.solve():
            return SolveResult(True, tuple(s.model()))
        return SolveResult(False)


_POOLS: dict[int, threading.BoundedSemaphore] = {}
_POOL_LOCK = threading.Lock()


def _pool(size: int) -> threading.BoundedSemaphore:
    with _POOL_LOCK:
        if size not in _POOLS:
            _POOLS[size] = threading.BoundedSemaphore(size)
        return _POOLS[size]


@dataclass(frozen=True)
class ExternalBackend:
    """Run ``path <file.cnf>`` and read SAT-competition style output."""

    path: str
    pool_size: int = 4
    timeout: float | None = None
    name: str = field(default="external", compare=False)

    def run(self, f: CnfFormula) -> SolveResult:
        if not os.path.isfile(self.path) or not os.access(self.path, os.X_OK):
            raise BackendError(f"solver executable not found or not executable: {self.path}")
        with _pool(self.pool_size):
            fd, tmp = tempfile.mkstemp(suffix=".cnf", prefix="udg-")
            try:
                with os.fdopen(fd, "w") as fh:
                    fh.write(to_dimacs(f))
                try:
                    proc = subprocess.run(
                        [self.path, tmp], capture_output=True, text=True, timeout=self.timeout
                    )
                except subprocess.TimeoutExpired:
                    raise BackendError(f"solver timed out after {self.timeout}s") from None
                except OSError as exc:
                    raise BackendError(f"cannot run solver: {exc}") from None
            finally:
                os.unlink(tmp)
        if proc.returncode < 0:
            raise BackendError(f"solver killed by signal {-proc.returncode}")
        return parse_solver_output(proc.stdout, f.var_count)


def parse_solver_output(text: str, var_count: int) -> SolveResult:
    status = None
    lits: list[int] = []
    for line in text.splitlines():
        s = line.strip()
        if status is None and s.startswith("s "):
            word = s[2:].strip()
            if word == "SATISFIABLE":
                status = True
            elif word == "UNSATISFIABLE":
                status = False
            else:
                raise BackendError(f"solver reported {word!r}")
        elif s.startswith("v ") or s == "v":
            try:
                lits.extend(int(x) for x in s[1:].split())
            except ValueError:
                raise BackendError(f"unparseable value line {s!r}") from None
    if status is None:
        raise BackendError("no status line in solver output")
    if not status:
        return SolveResult(False)
    model = [False] * (var_count + 1)
    for x in lits:
        if x == 0:
            continue
        if abs(x) > var_count:
            raise BackendError(f"model literal {x} out of range")
        model[abs(x)] = x > 0
    return SolveResult(True, tuple(model))


Backend = EmbeddedBackend | ExternalBackend


def parse_backend(spec: str | None, pool_size: int = 4) -> Backend:
    """``embedded`` or ``external:<path>``; ``None`` consults ``UDG_SOLVER``."""
    if spec is None:
        env = os.environ.get("UDG_SOLVER")
        return ExternalBackend(env, pool_size) if env else EmbeddedBackend()
    if spec == "embedded":
        return EmbeddedBackend()
    if spec.startswith("external"):
        path = spec.partition(":")[2] or os.environ.get("UDG_SOLVER", "")
        if not path:
            raise ValueError("external backend needs a path or UDG_SOLVER")
        return ExternalBackend(path, pool_size)
    raise ValueError(f"unknown backend {spec!r}")


def solve(f: CnfFormula, backend: Backend | str | None = "embedded") -> SolveResult:
    """Solve ``f``; any SAT model is checked against every clause before returning."""
    if backend is None or isinstance(backend, str):
        backend = parse_backend(backend)
    res = backend.run(f)
    if res.sat:
        bad = verify_model(f, res.model)
        if bad is not None:
            raise BackendError(f"{backend.name} solver returned a model violating clause {bad}")
    return res

"""Satisfiability backends for formulas with native XOR constraints.

The internal backend runs a complete search (Gaussian elimination on the
XOR part, then DPLL with unit and XOR propagation).  Its hot loop lives in
a compiled kernel when one was built; otherwise the pure-Python twin is
used.  Set ``XORCOUNT_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import enum
import os
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..formula import (
    CnfFormula,
    ConstrainedFormula,
    XorConstraint,
    as_constrained,
    evaluate,
    lower_xors,
    write_dimacs,
)
from . import _pysearch

if os.environ.get("XORCOUNT_PURE_PYTHON"):
    _kernel = _pysearch
    KERNEL = "python"
else:
    try:
        from . import _csearch as _kernel

        KERNEL = "compiled"
    except ImportError:
        _kernel = _pysearch
        KERNEL = "python"

KERNELS = {"python": _pysearch.search}
try:
    from . import _csearch

    KERNELS["compiled"] = _csearch.search
except ImportError:
    pass


class Status(enum.Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class SolverVerdict:
    status: Status
    reason: str | None = None  # "timeout" | "process-error" | "parse-error"
    witness: tuple[int, ...] | None = None

    @property
    def is_sat(self) -> bool:
        return self.status is Status.SAT

    @property
    def is_unknown(self) -> bool:
        return self.status is Status.UNKNOWN


@dataclass(frozen=True)
class BackendConfig:
    kind: str = "internal"
    external_command: tuple[str, ...] = ()
    timeout: float | None = None
    xor_mode: str = "x"  # "x": native x-lines, "cnf": lowered
    chunk_width: int = 5

    def __post_init__(self):
        if self.kind not in ("internal", "external"):
            raise ValueError(f"unknown backend kind {self.kind!r}")
        if self.xor_mode not in ("x", "cnf"):
            raise ValueError(f"unknown xor mode {self.xor_mode!r}")
        if self.timeout is not None and self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.kind == "external" and not self.external_command:
            raise ValueError("external backend needs a command")
        object.__setattr__(self, "external_command", tuple(self.external_command))


class BackendUnknownError(RuntimeError):
    """A solver call ended without a verdict."""

    def __init__(self, verdict: SolverVerdict):
        self.verdict = verdict
        super().__init__(f"solver returned UNKNOWN ({verdict.reason})")


# --- Gaussian elimination --------------------------------------------------


def _xor_to_int(x: XorConstraint) -> int:
    acc = 0
    for v in x.vars:
        acc |= 1 << (v - 1)
    return acc


def gaussian_eliminate(
    xors: Sequence[XorConstraint], m: int
) -> tuple[bool, list[XorConstraint], int]:
    """Reduce an XOR system to row echelon form.

    Returns ``(consistent, reduced, rank)``; ``reduced`` has the same
    solution set as ``xors`` whenever the system is consistent.
    """
    rows = [_xor_to_int(x) for x in xors]
    pars = [x.parity for x in xors]
    rank, ok = _pysearch.rref(rows, pars, m)
    reduced = [XorConstraint(_pysearch._bits(rows[r]), pars[r]) for r in range(rank)]
    return ok, reduced, rank


# --- internal backend ------------------------------------------------------


class Prepared:
    """Array form of a formula, built once and reused across many solves."""

    def __init__(self, f: CnfFormula | ConstrainedFormula):
        f = as_constrained(f)
        self.formula = f
        self.num_vars = f.num_vars
        lits = [l for c in f.clauses for l in c]
        self.clause_lits = np.array(lits, dtype=np.int32)
        self.clause_ptr = np.cumsum([0] + [len(c) for c in f.clauses], dtype=np.int32)
        self.xor_rows = np.zeros((len(f.xors), f.num_vars), dtype=np.uint8)
        for i, x in enumerate(f.xors):
            for v in x.vars:
                self.xor_rows[i, v - 1] = 1
        self.xor_par = np.array([x.parity for x in f.xors], dtype=np.uint8)

    def search(self, extra_rows=None, extra_par=None, deadline=0.0, kernel=None):
        rows, par = self.xor_rows, self.xor_par
        if extra_rows is not None and len(extra_rows):
            rows = np.concatenate([rows, np.asarray(extra_rows, dtype=np.uint8)])
            par = np.concatenate([par, np.asarray(extra_par, dtype=np.uint8)])
        fn = kernel or _kernel.search
        return fn(
            self.num_vars,
            self.clause_lits,
            self.clause_ptr,
            np.ascontiguousarray(rows, dtype=np.uint8),
            np.ascontiguousarray(par, dtype=np.uint8),
            deadline,
        )


def _deadline(timeout: float | None) -> float:
    return time.monotonic() + timeout if timeout else 0.0


def _verdict(f: ConstrainedFormula, status: int, witness) -> SolverVerdict:
    if status == _pysearch.TIMEOUT:
        return SolverVerdict(Status.UNKNOWN, "timeout")
    if status == _pysearch.UNSAT:
        return SolverVerdict(Status.UNSAT)
    w = tuple(int(b) for b in witness)
    if not evaluate(f, w):
        raise AssertionError("internal solver produced a non-model")
    return SolverVerdict(Status.SAT, witness=w)


def solve_internal(
    f: CnfFormula | ConstrainedFormula, timeout: float | None = None, kernel: str | None = None
) -> SolverVerdict:
    prep = Prepared(f)
    fn = KERNELS[kernel] if kernel else None
    status, witness, _ = prep.search(deadline=_deadline(timeout), kernel=fn)
    return _verdict(prep.formula, status, witness)


# --- external backend ------------------------------------------------------


def _parse_solver_output(stdout: str, returncode: int, nvars: int) -> SolverVerdict:
    status = None
    values: dict[int, int] = {}
    for line in stdout.splitlines():
        if line.startswith("s "):
            word = line[2:].strip().upper()
            if word == "SATISFIABLE":
                status = Status.SAT
            elif word == "UNSATISFIABLE":
                status = Status.UNSAT
            else:
                return SolverVerdict(Status.UNKNOWN, "parse-error")
        elif line.startswith("v "):
            for tok in line[2:].split():
                try:
                    lit = int(tok)
                except ValueError:
                    continue
                if lit:
                    values[abs(lit)] = 1 if lit > 0 else 0
    if status is None:
        status = {10: Status.SAT, 20: Status.UNSAT}.get(returncode)
    if status is None:
        reason = "parse-error" if returncode == 0 else "process-error"
        return SolverVerdict(Status.UNKNOWN, reason)
    witness = None
    if status is Status.SAT and values:
        witness = tuple(values.get(v, 0) for v in range(1, nvars + 1))
    return SolverVerdict(status, witness=witness)


def solve_external(f: CnfFormula | ConstrainedFormula, cfg: BackendConfig) -> SolverVerdict:
    """Run an external DIMACS solver; every failure maps to UNKNOWN."""
    if cfg.kind != "external":
        raise ValueError("config is not for an external backend")
    f = as_constrained(f)
    text = write_dimacs(lower_xors(f, cfg.chunk_width) if cfg.xor_mode == "cnf" else f)
    fd, path = tempfile.mkstemp(prefix="xorcount-", suffix=".cnf")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        try:
            proc = subprocess.run(
                list(cfg.external_command) + [path],
                capture_output=True,
                text=True,
                timeout=cfg.timeout,
            )
        except subprocess.TimeoutExpired:
            return SolverVerdict(Status.UNKNOWN, "timeout")
        except OSError:
            return SolverVerdict(Status.UNKNOWN, "process-error")
        verdict = _parse_solver_output(proc.stdout, proc.returncode, f.num_vars)
        if verdict.witness is not None and not evaluate(f, verdict.witness):
            # lowered runs report auxiliaries too; only keep a checkable witness
            verdict = SolverVerdict(verdict.status)
        return verdict
    finally:
        try:
            os.unlink(path)
        except OSError:
            pass


def solve(f: CnfFormula | ConstrainedFormula, cfg: BackendConfig | None = None) -> SolverVerdict:
    cfg = cfg or BackendConfig()
    if cfg.kind == "internal":
        return solve_internal(f, cfg.timeout)
    return solve_external(f, cfg)

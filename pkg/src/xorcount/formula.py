"""Boolean formulas with native XOR constraints.

Formulas are immutable.  Literals are signed 1-based variable indices, as in
DIMACS.  An assignment is a tuple of 0/1 ints where position ``i`` holds the
value of variable ``i + 1``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

Assignment = tuple  # tuple[int, ...] of 0/1

ENUM_CAP = 30


class DimacsError(ValueError):
    """Base class for extended-DIMACS parse errors."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


class HeaderError(DimacsError):
    pass


class LiteralRangeError(DimacsError):
    pass


class TerminatorError(DimacsError):
    pass


class ClauseCountError(DimacsError):
    pass


def _normalize_clause(lits: Iterable[int]) -> tuple[int, ...] | None:
    """Sort by variable and drop duplicates; None for a tautological clause."""
    seen = set(lits)
    for lit in seen:
        if -lit in seen:
            return None
    return tuple(sorted(seen, key=lambda x: (abs(x), x)))


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        if self.num_vars < 1:
            raise ValueError("a formula needs at least one variable")
        normalized = []
        for clause in self.clauses:
            if len(clause) == 0:
                raise ValueError("empty clause")
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"literal {lit} out of range 1..{self.num_vars}")
            c = _normalize_clause(clause)
            if c is not None:
                normalized.append(c)
        object.__setattr__(self, "clauses", tuple(normalized))


@dataclass(frozen=True)
class XorConstraint:
    """``parity = y_v1 ^ y_v2 ^ ...`` over the variables in ``vars``."""

    vars: frozenset[int]
    parity: int

    def __init__(self, vars: Iterable[int], parity: int):
        object.__setattr__(self, "vars", frozenset(vars))
        object.__setattr__(self, "parity", int(parity) & 1)

    def __len__(self) -> int:
        return len(self.vars)

    def satisfied_by(self, a: Sequence[int]) -> bool:
        acc = 0
        for v in self.vars:
            acc ^= a[v - 1]
        return acc == self.parity


@dataclass(frozen=True)
class ConstrainedFormula:
    base: CnfFormula
    xors: tuple[XorConstraint, ...] = field(default=())

    def __post_init__(self):
        xs = tuple(self.xors)
        for x in xs:
            if any(v < 1 or v > self.base.num_vars for v in x.vars):
                raise ValueError("XOR references a variable outside 1..num_vars")
        object.__setattr__(self, "xors", xs)

    @property
    def num_vars(self) -> int:
        return self.base.num_vars

    @property
    def clauses(self) -> tuple[tuple[int, ...], ...]:
        return self.base.clauses

    def with_xors(self, extra: Iterable[XorConstraint]) -> "ConstrainedFormula":
        return ConstrainedFormula(self.base, self.xors + tuple(extra))


def as_constrained(f: CnfFormula | ConstrainedFormula) -> ConstrainedFormula:
    if isinstance(f, ConstrainedFormula):
        return f
    return ConstrainedFormula(f)


# --- extended DIMACS -------------------------------------------------------


def _parse_ints(tokens: list[str], lineno: int) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise DimacsError(f"non-integer token in {' '.join(tokens)!r}", lineno) from None


def parse_dimacs(text: str) -> ConstrainedFormula:
    """Parse DIMACS CNF with CryptoMiniSat-style ``x`` lines.

    ``x a b 0`` means ``y_a ^ y_b = 1``; every negated literal flips the
    parity, so ``x -a b 0`` means ``y_a ^ y_b = 0``.  The header clause count
    covers ordinary clauses only.
    """
    num_vars = None
    declared = 0
    clauses: list[list[int]] = []
    xors: list[XorConstraint] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            parts = line.split()
            if num_vars is not None:
                raise HeaderError("duplicate header", lineno)
            if len(parts) != 4 or parts[1] != "cnf":
                raise HeaderError(f"malformed header {line!r}", lineno)
            try:
                num_vars, declared = int(parts[2]), int(parts[3])
            except ValueError:
                raise HeaderError(f"malformed header {line!r}", lineno) from None
            if num_vars < 1 or declared < 0:
                raise HeaderError(f"malformed header {line!r}", lineno)
            continue
        if num_vars is None:
            raise HeaderError("clause before header", lineno)

        is_xor = line.startswith("x")
        body = line[1:] if is_xor else line
        lits = _parse_ints(body.split(), lineno)
        if not lits or lits[-1] != 0:
            raise TerminatorError("missing terminating 0", lineno)
        lits = lits[:-1]
        if 0 in lits:
            raise TerminatorError("0 before end of line", lineno)
        for lit in lits:
            if abs(lit) > num_vars:
                raise LiteralRangeError(f"literal {lit} out of range 1..{num_vars}", lineno)

        if is_xor:
            parity = 1
            vs: set[int] = set()
            for lit in lits:
                if lit < 0:
                    parity ^= 1
                vs ^= {abs(lit)}
            xors.append(XorConstraint(vs, parity))
        else:
            if not lits:
                raise DimacsError("empty clause", lineno)
            clauses.append(lits)

    if num_vars is None:
        raise HeaderError("missing header", None)
    if len(clauses) != declared:
        raise ClauseCountError(
            f"header declares {declared} clauses, body has {len(clauses)}", None
        )
    return ConstrainedFormula(CnfFormula(num_vars, tuple(map(tuple, clauses))), tuple(xors))


def _xor_line(x: XorConstraint) -> str | None:
    vs = sorted(x.vars)
    if not vs:
        # an empty odd XOR is written as a bare "x 0"; the empty even XOR is a
        # tautology and has no x-line encoding
        return "x 0" if x.parity else None
    lits = [str(v) for v in vs]
    if x.parity == 0:
        lits[0] = "-" + lits[0]
    return "x " + " ".join(lits) + " 0"


def write_dimacs(f: CnfFormula | ConstrainedFormula, comments: Sequence[str] = ()) -> str:
    f = as_constrained(f)
    out = [f"c {c}" for c in comments]
    out.append(f"p cnf {f.num_vars} {len(f.clauses)}")
    out.extend(" ".join(map(str, c)) + " 0" for c in f.clauses)
    for x in f.xors:
        line = _xor_line(x)
        if line is not None:
            out.append(line)
    return "\n".join(out) + "\n"


def read_dimacs(path) -> ConstrainedFormula:
    with open(path, encoding="utf-8") as fh:
        return parse_dimacs(fh.read())


# --- semantics -------------------------------------------------------------


def evaluate(f: CnfFormula | ConstrainedFormula, a: Sequence[int]) -> int:
    f = as_constrained(f)
    if len(a) != f.num_vars:
        raise ValueError(f"assignment has {len(a)} bits, formula has {f.num_vars} vars")
    for clause in f.clauses:
        if not any((a[abs(l) - 1] == 1) == (l > 0) for l in clause):
            return 0
    for x in f.xors:
        if not x.satisfied_by(a):
            return 0
    return 1


def xor_to_cnf(
    x: XorConstraint, chunk_width: int = 5, next_aux_var: int = 1
) -> tuple[list[list[int]], int]:
    """Lower an XOR to CNF by chaining chunks through fresh variables.

    Each chunk of ``w`` literals is encoded directly with ``2**(w-1)``
    clauses.  Auxiliary variables are numbered from ``next_aux_var``.
    Splitting needs chunks of at least 3, so width 2 only applies to XORs
    that already fit in one chunk.
    """
    if chunk_width < 2:
        raise ValueError("chunk_width must be >= 2")
    vs = sorted(x.vars)
    clauses: list[list[int]] = []
    aux = next_aux_var

    if not vs:
        if x.parity:
            clauses += [[aux], [-aux]]
            return clauses, 1
        return clauses, 0

    # a chained chunk must consume at least two inputs besides its output
    step = max(chunk_width, 3)
    while len(vs) > chunk_width:
        head, vs = vs[: step - 1], vs[step - 1 :]
        # aux == xor(head)  <=>  xor(head + [aux]) == 0
        clauses += _direct_xor(head + [aux], 0)
        vs = [aux] + vs
        aux += 1
    clauses += _direct_xor(vs, x.parity)
    return clauses, aux - next_aux_var


def _direct_xor(vs: list[int], parity: int) -> list[list[int]]:
    out = []
    for bits in itertools.product((0, 1), repeat=len(vs)):
        if sum(bits) % 2 != parity:
            out.append([v if b == 0 else -v for v, b in zip(vs, bits)])
    return out


def lower_xors(f: ConstrainedFormula, chunk_width: int = 5) -> CnfFormula:
    """Plain CNF equivalent of ``f`` (projected onto its original variables)."""
    clauses = [list(c) for c in f.clauses]
    nxt = f.num_vars + 1
    for x in f.xors:
        cs, used = xor_to_cnf(x, chunk_width, nxt)
        clauses += cs
        nxt += used
    return CnfFormula(nxt - 1, tuple(map(tuple, clauses)))


# --- brute-force oracles ---------------------------------------------------


def _satisfying_block(f: ConstrainedFormula, start: int, stop: int) -> np.ndarray:
    m = f.num_vars
    idx = np.arange(start, stop, dtype=np.int64)
    # column i holds y_{i+1}; y_1 is the most significant bit
    shifts = np.arange(m - 1, -1, -1, dtype=np.int64)
    bits = ((idx[:, None] >> shifts[None, :]) & 1).astype(bool)
    ok = np.ones(len(idx), dtype=bool)
    for clause in f.clauses:
        sat = np.zeros(len(idx), dtype=bool)
        for lit in clause:
            col = bits[:, abs(lit) - 1]
            sat |= col if lit > 0 else ~col
        ok &= sat
    for x in f.xors:
        acc = np.zeros(len(idx), dtype=bool)
        for v in x.vars:
            acc ^= bits[:, v - 1]
        ok &= acc == bool(x.parity)
    return idx[ok]


def model_indices(f: CnfFormula | ConstrainedFormula, var_cap: int = ENUM_CAP) -> np.ndarray:
    """Satisfying assignments as integers (y_1 is the most significant bit)."""
    f = as_constrained(f)
    if f.num_vars > var_cap:
        raise ValueError(f"{f.num_vars} variables exceeds enumeration cap {var_cap}")
    total = 1 << f.num_vars
    block = 1 << 16
    parts = [_satisfying_block(f, lo, min(lo + block, total)) for lo in range(0, total, block)]
    return np.concatenate(parts)


def count_models(f: CnfFormula | ConstrainedFormula, var_cap: int = ENUM_CAP) -> int:
    return int(len(model_indices(f, var_cap)))


def enumerate_models(f: CnfFormula | ConstrainedFormula, var_cap: int = ENUM_CAP) -> list[Assignment]:
    f = as_constrained(f)
    m = f.num_vars
    return [tuple((int(i) >> (m - 1 - b)) & 1 for b in range(m)) for i in model_indices(f, var_cap)]


def _popcount(a: np.ndarray) -> np.ndarray:
    return np.bitwise_count(a) if hasattr(np, "bitwise_count") else np.array(
        [int(v).bit_count() for v in a], dtype=np.int64
    )


def min_distance_of_indices(codes: np.ndarray, width: int) -> int:
    """Minimum Hamming distance among distinct integer-coded bit strings."""
    codes = np.unique(np.asarray(codes, dtype=np.int64))
    n = len(codes)
    if n < 2:
        raise ValueError("need at least two distinct models")
    if n <= 4096:
        best = width
        for i in range(n - 1):
            best = min(best, int(_popcount(codes[i + 1 :] ^ codes[i]).min()))
            if best == 1:
                break
        return best
    # large sets: grow a Hamming ball until it hits another member
    for r in range(1, width + 1):
        for pos in itertools.combinations(range(width), r):
            mask = sum(1 << p for p in pos)
            if np.isin(codes ^ mask, codes, assume_unique=True).any():
                return r
    return width


def min_pairwise_distance(models: Sequence[Sequence[int]]) -> int:
    if len(models) < 2:
        raise ValueError("need at least two models")
    width = len(models[0])
    if any(len(a) != width for a in models):
        raise ValueError("models have different lengths")
    if width <= 62:
        codes = np.array([int("".join(map(str, a)), 2) for a in models], dtype=np.int64)
        if len(np.unique(codes)) < len(codes):
            return 0
        return min_distance_of_indices(codes, width)
    return min(
        sum(x != y for x, y in zip(a, b)) for a, b in itertools.combinations(models, 2)
    )

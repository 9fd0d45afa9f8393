"""Binary linear codes: GF(2) matrices, BCH construction, codeword formulas, embedding."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .formula import CnfFormula, ConstrainedFormula, XorConstraint, as_constrained

# GF(2^q) moduli, bit i = coefficient of x^i
PRIMITIVE_POLYS = {
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10001001,
    8: 0b100011101,
}

MIN_WEIGHT_CAP = 20


@dataclass(frozen=True)
class Gf2Matrix:
    """Row-major GF(2) matrix; row ``i`` is an int whose bit ``j`` is entry (i, j)."""

    rows: int
    cols: int
    bits: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("matrix dimensions must be positive")
        if len(self.bits) != self.rows:
            raise ValueError("row count mismatch")
        limit = 1 << self.cols
        if any(r < 0 or r >= limit for r in self.bits):
            raise ValueError("row has bits beyond the column count")

    @classmethod
    def from_lists(cls, data: Sequence[Sequence[int]]) -> "Gf2Matrix":
        rows = [sum((int(b) & 1) << j for j, b in enumerate(r)) for r in data]
        return cls(len(data), len(data[0]), tuple(rows))

    def to_lists(self) -> list[list[int]]:
        return [[(r >> j) & 1 for j in range(self.cols)] for r in self.bits]

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return (self.bits[i] >> j) & 1

    def column(self, j: int) -> list[int]:
        return [(r >> j) & 1 for r in self.bits]

    @property
    def T(self) -> "Gf2Matrix":
        return Gf2Matrix(
            self.cols,
            self.rows,
            tuple(sum(((r >> j) & 1) << i for i, r in enumerate(self.bits)) for j in range(self.cols)),
        )

    def __matmul__(self, other: "Gf2Matrix") -> "Gf2Matrix":
        return gf2_mul(self, other)

    def is_zero(self) -> bool:
        return not any(self.bits)

    def __str__(self) -> str:
        return "\n".join("".join(str(b) for b in row) for row in self.to_lists())


def _rref(rows: list[int], ncols: int) -> tuple[list[int], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    rows = list(rows)
    pivots = []
    rank = 0
    for col in range(ncols):
        bit = 1 << col
        piv = next((r for r in range(rank, len(rows)) if rows[r] & bit), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r] & bit:
                rows[r] ^= rows[rank]
        pivots.append(col)
        rank += 1
        if rank == len(rows):
            break
    return rows[:rank], pivots


def gf2_rank(M: Gf2Matrix) -> int:
    return len(_rref(list(M.bits), M.cols)[1])


def gf2_mul(A: Gf2Matrix, B: Gf2Matrix) -> Gf2Matrix:
    if A.cols != B.rows:
        raise ValueError(f"cannot multiply {A.rows}x{A.cols} by {B.rows}x{B.cols}")
    out = []
    for r in A.bits:
        acc = 0
        i = 0
        while r:
            if r & 1:
                acc ^= B.bits[i]
            r >>= 1
            i += 1
        out.append(acc)
    return Gf2Matrix(A.rows, B.cols, tuple(out))


def standard_form(G: Gf2Matrix) -> tuple[Gf2Matrix, list[int]]:
    """Equivalent generator ``[I_k | A]`` plus the column permutation used.

    Column ``j`` of the result is column ``perm[j]`` of the reduced ``G``.
    """
    rows, pivots = _rref(list(G.bits), G.cols)
    if len(pivots) < G.rows:
        raise ValueError("generator matrix is rank deficient")
    perm = pivots + [c for c in range(G.cols) if c not in set(pivots)]
    permuted = tuple(sum(((r >> src) & 1) << dst for dst, src in enumerate(perm)) for r in rows)
    return Gf2Matrix(G.rows, G.cols, permuted), perm


def nullspace(M: Gf2Matrix) -> Gf2Matrix:
    """Basis (as rows) of ``{x : M x^T = 0}``."""
    rows, pivots = _rref(list(M.bits), M.cols)
    pivot_set = set(pivots)
    basis = []
    for f in range(M.cols):
        if f in pivot_set:
            continue
        vec = 1 << f
        for r, p in zip(rows, pivots):
            if (r >> f) & 1:
                vec |= 1 << p
        basis.append(vec)
    if not basis:
        raise ValueError("matrix has full column rank; null space is trivial")
    return Gf2Matrix(len(basis), M.cols, tuple(basis))


@dataclass(frozen=True)
class LinearCode:
    n: int
    k: int
    G: Gf2Matrix
    H: Gf2Matrix
    d_lower: int

    def __post_init__(self):
        if self.G.rows != self.k or self.G.cols != self.n:
            raise ValueError("G must be k x n")
        if self.H.cols != self.n or self.H.rows != self.n - self.k:
            raise ValueError("H must be (n-k) x n")
        if not (self.G @ self.H.T).is_zero():
            raise ValueError("G H^T != 0")
        if gf2_rank(self.G) != self.k or gf2_rank(self.H) != self.n - self.k:
            raise ValueError("G or H is rank deficient")

    @classmethod
    def from_generator(cls, G: Gf2Matrix, d_lower: int | None = None) -> "LinearCode":
        """Code spanned by ``G``; ``d_lower`` defaults to the exact minimum weight."""
        H = nullspace(G)
        code = cls(G.cols, G.rows, G, H, d_lower or 1)
        if d_lower is None:
            code = cls(G.cols, G.rows, G, H, min_weight(code))
        return code

    @property
    def rate(self) -> float:
        return self.k / self.n

    def encode(self, msg: Sequence[int]) -> list[int]:
        acc = 0
        for bit, row in zip(msg, self.G.bits):
            if bit:
                acc ^= row
        return [(acc >> j) & 1 for j in range(self.n)]


def min_weight(code: LinearCode) -> int:
    """Exact minimum distance by walking all nonzero codewords in Gray-code order."""
    if code.k > MIN_WEIGHT_CAP:
        raise ValueError(f"dimension {code.k} exceeds enumeration cap {MIN_WEIGHT_CAP}")
    rows = code.G.bits
    word = 0
    best = code.n
    for i in range(1, 1 << code.k):
        word ^= rows[(i & -i).bit_length() - 1]
        w = word.bit_count()
        if w < best:
            best = w
    return best


# --- BCH -------------------------------------------------------------------


class _Field:
    def __init__(self, q: int):
        self.q = q
        self.n = (1 << q) - 1
        mod = PRIMITIVE_POLYS[q]
        self.exp = [0] * (2 * self.n)
        self.log = [0] * (self.n + 1)
        x = 1
        for i in range(self.n):
            self.exp[i] = x
            self.log[x] = i
            x <<= 1
            if x >> q:
                x ^= mod
        for i in range(self.n, 2 * self.n):
            self.exp[i] = self.exp[i - self.n]

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.exp[self.log[a] + self.log[b]]


def _minimal_poly(F: _Field, i: int) -> int:
    coset = []
    e = i % F.n
    while e not in coset:
        coset.append(e)
        e = (2 * e) % F.n
    poly = [1]  # coefficients in GF(2^q), lowest degree first
    for e in coset:
        root = F.exp[e]
        nxt = [0] * (len(poly) + 1)
        for d, c in enumerate(poly):
            nxt[d + 1] ^= c
            nxt[d] ^= F.mul(c, root)
        poly = nxt
    if any(c not in (0, 1) for c in poly):
        raise AssertionError("minimal polynomial left GF(2)")
    return sum(c << d for d, c in enumerate(poly))


def _pmul(a: int, b: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def _pdivmod(a: int, b: int) -> tuple[int, int]:
    q = 0
    db = b.bit_length()
    while a.bit_length() >= db:
        shift = a.bit_length() - db
        q |= 1 << shift
        a ^= b << shift
    return q, a


def bch_generator_poly(q: int, t: int) -> int:
    if q not in PRIMITIVE_POLYS:
        raise ValueError(f"q must lie in [3, 8], got {q}")
    n = (1 << q) - 1
    if t < 1 or 2 * t + 1 > n:
        raise ValueError(f"need t >= 1 and 2t+1 <= {n}")
    F = _Field(q)
    g = 1
    seen: set[int] = set()
    for i in range(1, 2 * t, 2):
        mp = _minimal_poly(F, i)
        if mp not in seen:
            seen.add(mp)
            g = _pmul(g, mp)
    return g


def bch_code(q: int, t: int) -> LinearCode:
    """Narrow-sense binary BCH code of length ``2**q - 1`` and designed distance ``2t+1``."""
    g = bch_generator_poly(q, t)
    n = (1 << q) - 1
    k = n - (g.bit_length() - 1)
    h, rem = _pdivmod((1 << n) | 1, g)
    if rem:
        raise AssertionError("generator does not divide x^n + 1")
    h_rev = sum(((h >> i) & 1) << (k - i) for i in range(k + 1))
    G = Gf2Matrix(k, n, tuple(g << i for i in range(k)))
    H = Gf2Matrix(n - k, n, tuple(h_rev << i for i in range(n - k)))
    return LinearCode(n, k, G, H, 2 * t + 1)


def hamming_code(r: int = 3) -> LinearCode:
    """The ``[2^r - 1, 2^r - 1 - r, 3]`` Hamming code in systematic form."""
    n = (1 << r) - 1
    cols = [c for c in range(1, n + 1) if c & (c - 1)] + [1 << i for i in range(r)]
    k = n - r
    # H = [A | I_r]; G = [I_k | A^T]
    H = Gf2Matrix(r, n, tuple(sum(((cols[j] >> i) & 1) << j for j in range(n)) for i in range(r)))
    G = Gf2Matrix(
        k, n, tuple((1 << i) | sum(((cols[i] >> b) & 1) << (k + b) for b in range(r)) for i in range(k))
    )
    return LinearCode(n, k, G, H, 3)


# --- formulas from codes ---------------------------------------------------


def parity_formula(H: Gf2Matrix) -> ConstrainedFormula:
    """Formula whose models are exactly the codewords ``u`` with ``H u^T = 0``."""
    if gf2_rank(H) != H.rows:
        raise ValueError("parity-check matrix must have full row rank")
    xors = tuple(
        XorConstraint([j + 1 for j in range(H.cols) if (row >> j) & 1], 0) for row in H.bits
    )
    return ConstrainedFormula(CnfFormula(H.cols), xors)


def embed(f: CnfFormula | ConstrainedFormula, code: LinearCode) -> tuple[ConstrainedFormula, int]:
    """Conjoin ``f(y)`` with ``z = y G`` over fresh variables ``z``.

    The result has ``m + n`` variables (``y`` first), the same model count as
    ``f``, and any two of its models differ in at least ``code.d_lower``
    positions of the ``z`` block.
    """
    f = as_constrained(f)
    m = f.num_vars
    if code.k != m:
        raise ValueError(f"code dimension {code.k} != formula variable count {m}")
    base = CnfFormula(m + code.n, f.clauses)
    links = []
    for i in range(code.n):
        ys = [j + 1 for j in range(m) if (code.G.bits[j] >> i) & 1]
        links.append(XorConstraint(ys + [m + 1 + i], 0))
    return ConstrainedFormula(base, f.xors + tuple(links)), code.d_lower


# --- matrix files ----------------------------------------------------------


def parse_matrix(text: str) -> Gf2Matrix:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty matrix file")
    try:
        rows, cols = (int(x) for x in lines[0].split())
    except ValueError:
        raise ValueError(f"bad matrix header {lines[0]!r}") from None
    body = lines[1:]
    if len(body) != rows:
        raise ValueError(f"header says {rows} rows, found {len(body)}")
    data = []
    for ln in body:
        ln = ln.replace(" ", "")
        if len(ln) != cols or set(ln) - {"0", "1"}:
            raise ValueError(f"bad matrix row {ln!r}")
        data.append([int(c) for c in ln])
    return Gf2Matrix.from_lists(data)


def format_matrix(M: Gf2Matrix) -> str:
    return f"{M.rows} {M.cols}\n{M}\n"


def read_matrix(path) -> Gf2Matrix:
    with open(path, encoding="utf-8") as fh:
        return parse_matrix(fh.read())


def code_from_rows(rows: Iterable[Iterable[int]], d_lower: int | None = None) -> LinearCode:
    return LinearCode.from_generator(Gf2Matrix.from_lists([list(r) for r in rows]), d_lower)

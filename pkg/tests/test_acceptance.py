"""Acceptance criteria, one test per criterion.

Each test prints a single ``[PASS]``/``[FAIL]`` line (also when run as a
plain script: ``python tests/test_acceptance.py``) and then asserts.
"""

from __future__ import annotations

import itertools
import math
import random
import sys
import time

import pytest

from xorcount.cli import crossover, fig2_rows, table1_rows
from xorcount.codes import bch_code, embed, hamming_code, min_weight, parity_formula
from xorcount.counter import CountParams, ceil_log2, count
from xorcount.formula import (
    CnfFormula,
    ConstrainedFormula,
    XorConstraint,
    count_models,
    lower_xors,
    min_distance_of_indices,
    model_indices,
)
from xorcount.sampler import SeededRng, estimate_joint_survival
from xorcount.solver import KERNELS, Prepared, gaussian_eliminate, solve_internal

# published two-decimal values: (m, s) -> (d=1 prior bound, d=1, d=5, d=20)
REFERENCE = {
    (50, 13): (16.85, 16.85, 11.76, 3.88),
    (50, 16): (15.38, 15.38, 11.36, 4.10),
    (50, 20): (13.26, 13.26, 10.26, 4.37),
    (50, 30): (9.57, 9.57, 8.02, 4.75),
    (50, 39): (7.08, 7.08, 6.20, 4.45),
    (100, 11): (39.05, 39.05, 23.65, 7.40),
    (100, 15): (35.44, 35.44, 25.26, 8.07),
    (100, 25): (27.09, 27.09, 21.33, 9.14),
    (119, 7): (50.19, 50.18, 25.07, 7.60),
    (136, 9): (55.63, 55.63, 30.66, 9.46),
    (149, 11): (60.60, 60.60, 35.24, 11.02),
    (352, 10): (147.99, 147.99, 81.42, 25.31),
}
TOL = 0.02
CROSSOVER = {32: 10, 64: 26}


def report(n: int, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}", flush=True)


# --- 1, 2: density table ---------------------------------------------------


def criterion_1() -> tuple[bool, str]:
    t0 = time.perf_counter()
    rows = table1_rows(beta=2.0, gamma=0.8)
    elapsed = time.perf_counter() - t0
    misses = []
    worst = 0.0
    for m, s, *vals in rows:
        for d, got, want in zip((1, 5, 20), vals, REFERENCE[(m, s)][1:]):
            err = abs(got - want)
            worst = max(worst, err)
            if err > TOL:
                misses.append(f"(m={m}, s={s}, d={d}) got {got:.3f} want {want}")
    ok = not misses and elapsed < 10
    detail = f"36 cells, max |err| {worst:.3f}, {elapsed:.2f}s"
    if misses:
        detail += "; outside +-0.02: " + "; ".join(misses)
    return ok, detail


def criterion_2() -> tuple[bool, str]:
    worst = 0.0
    misses = []
    for m, s, d1, *_ in table1_rows(beta=2.0, gamma=0.8):
        err = abs(d1 - REFERENCE[(m, s)][0])
        worst = max(worst, err)
        if err > TOL:
            misses.append(f"(m={m}, s={s}) {d1:.3f}")
    return not misses, f"12 rows, max |d1 - prior| {worst:.3f}" + ("; misses " + ", ".join(misses) if misses else "")


# --- 3: embedding crossover ------------------------------------------------


def criterion_3() -> tuple[bool, str]:
    t0 = time.perf_counter()
    found = {m: crossover(fig2_rows(m, 155, 20, 1.5)) for m in CROSSOVER}
    elapsed = time.perf_counter() - t0
    parts = []
    ok = elapsed < 10
    for m, want in CROSSOVER.items():
        good = abs(found[m] - want) <= 1
        ok &= good
        parts.append(f"m={m}: last gain at s={found[m]} (want {want}+-1{'' if good else ', MISS'})")
    return ok, "; ".join(parts) + f"; {elapsed:.2f}s"


# --- 4: survival statistics ------------------------------------------------


def _survival_cells():
    m = 10
    zero = [0] * m
    for s in (1, 2, 4):
        yield ("single", s, 0.3, 0, zero, zero, 2.0**-s)
    for d, lam, s in itertools.product((0, 1, 2, 5), (0.1, 0.25, 0.5), (1, 2)):
        other = [1] * d + [0] * (m - d)
        rho = 1 - 2 * lam
        rho_d = 1.0 if d == 0 else rho**d
        yield ("pair", s, lam, d, zero, other, ((1 + rho_d) / 4) ** s)


def criterion_4() -> tuple[bool, str]:
    t0 = time.perf_counter()
    trials = 100_000
    bad = []
    worst = 0.0
    cells = list(_survival_cells())
    for i, (kind, s, lam, d, a, b, p) in enumerate(cells):
        got = estimate_joint_survival(a, b, s, lam, trials, SeededRng(2024, (i,)))
        se = math.sqrt(p * (1 - p) / trials)
        z = abs(got - p) / se
        worst = max(worst, z)
        if z > 3:
            bad.append(f"{kind} s={s} lam={lam} d={d}: {got:.5f} vs {p:.5f} ({z:.1f} se)")
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 60
    return ok, f"{len(cells)} cells x 1e5 trials, max {worst:.2f} se, {elapsed:.1f}s" + ("; " + "; ".join(bad) if bad else "")


# --- 5: structural guarantees ----------------------------------------------


def _random_instance(rng: random.Random, m: int) -> ConstrainedFormula:
    clauses = []
    for _ in range(rng.randint(0, 2 * m)):
        k = rng.randint(1, min(3, m))
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in rng.sample(range(1, m + 1), k)))
    xors = [XorConstraint(rng.sample(range(1, m + 1), rng.randint(1, m)), rng.randint(0, 1)) for _ in range(rng.randint(0, m // 3))]
    return ConstrainedFormula(CnfFormula(m, tuple(clauses)), tuple(xors))


def criterion_5() -> tuple[bool, str]:
    rng = random.Random(5150)
    runs = 500
    violations = []
    loose = 0
    for i in range(runs):
        m = rng.randint(1, 16)
        alpha = rng.choice((1.5, 2.0, 3.0))
        beta = rng.choice((1.5, 2.0, 3.0))
        iv = count(_random_instance(rng, m), CountParams(alpha=alpha, beta=beta, seed=i))
        slack = max(alpha, beta)
        if iv.width > 2 * slack + 2 + 1e-9 or iv.iterations > ceil_log2(m):
            violations.append(i)
        if iv.width > 2 * slack + 1 + 1e-9:
            loose += 1
    ok = not violations
    return ok, f"{runs} runs, {len(violations)} break width/iteration bounds, {loose} wider than 2max+1 (logged)"


# --- 6: coverage ------------------------------------------------------------


def coverage_corpus() -> list[tuple[str, ConstrainedFormula, int]]:
    rng = random.Random(606)
    out = []
    out.append(("taut16", ConstrainedFormula(CnfFormula(16)), 65536))
    out.append(("unit16", ConstrainedFormula(CnfFormula(16, tuple((v if v % 2 else -v,) for v in range(1, 17)))), 1))
    for m, rank in [(16, 1), (16, 4), (16, 8), (16, 12), (16, 15), (14, 3), (12, 6), (10, 2), (8, 5), (6, 1)]:
        xs = []
        for i in range(rank):
            extra = rng.sample(range(rank + 1, m + 1), min(3, m - rank)) if m > rank else []
            xs.append(XorConstraint({i + 1, *extra}, rng.randint(0, 1)))
        out.append((f"xor{m}r{rank}", ConstrainedFormula(CnfFormula(m), tuple(xs)), 2 ** (m - rank)))
    while len(out) < 30:
        m = rng.randint(6, 16)
        f = _random_instance(rng, m)
        n = count_models(f)
        if n >= 1:
            out.append((f"rand{len(out)}m{m}", f, n))
    return out


def criterion_6(runs: int = 100, threshold: float = 0.86) -> tuple[bool, str]:
    t0 = time.perf_counter()
    corpus = coverage_corpus()
    worst = (2.0, "")
    failing = []
    for name, f, n in corpus:
        prep = Prepared(f)
        hits = sum(count(prep, CountParams(alpha=1.5, beta=1.5, delta_target=0.1, seed=10_000 + s)).contains(n) for s in range(runs))
        rate = hits / runs
        if rate < worst[0]:
            worst = (rate, name)
        if rate < threshold:
            failing.append(f"{name} ({n} models) {rate:.2f}")
    counts = sorted(n for _, _, n in corpus)
    elapsed = time.perf_counter() - t0
    detail = (
        f"{len(corpus)} formulas (counts {counts[0]}..{counts[-1]}), {runs} runs each, "
        f"worst coverage {worst[0]:.2f} ({worst[1]}), {elapsed:.0f}s"
    )
    return not failing, detail + ("; below 0.86: " + ", ".join(failing) if failing else "")


# --- 7: codes ---------------------------------------------------------------


def criterion_7() -> tuple[bool, str]:
    checks = []
    c21 = bch_code(5, 2)
    # k = 21 is past the enumeration cap; the dual has 2^10 words, and the
    # distance follows from the weight enumerator (MacWilliams) of the dual
    d21 = _min_weight_via_dual(c21)
    checks.append(((c21.n, c21.k) == (31, 21) and d21 >= 5, f"[31,21] d={d21}"))
    c16 = bch_code(5, 3)
    d16 = min_weight(c16)
    checks.append(((c16.n, c16.k) == (31, 16) and d16 >= 7, f"[31,16] d={d16}"))
    powers = []
    for q, t in [(3, 1), (4, 1), (4, 2), (4, 3)]:
        c = bch_code(q, t)
        powers.append(count_models(parity_formula(c.H)) == 2**c.k)
    for q, t in [(5, 3), (5, 5), (5, 7)]:
        c = bch_code(q, t)
        ok, _, rank = gaussian_eliminate(list(parity_formula(c.H).xors), c.n)
        powers.append(ok and c.n - rank == c.k)
    checks.append((all(powers), f"2^k models for {len(powers)} codes"))
    rng = random.Random(77)
    code = hamming_code()
    emb_ok = True
    for _ in range(20):
        clauses = tuple(
            tuple(v if rng.random() < 0.5 else -v for v in rng.sample(range(1, 5), rng.randint(1, 3)))
            for _ in range(rng.randint(0, 5))
        )
        f = CnfFormula(4, clauses)
        f2, d = embed(f, code)
        idx = model_indices(f2)
        emb_ok &= len(idx) == count_models(f)
        if len(idx) >= 2:
            emb_ok &= min_distance_of_indices(idx, f2.num_vars) >= d == 3
    checks.append((emb_ok, "embed keeps counts and distance >= 3 on 20 formulas"))
    return all(c for c, _ in checks), "; ".join(d for _, d in checks)


def _min_weight_via_dual(code) -> int:
    """Minimum weight of ``code`` from the weight distribution of its dual."""
    n, r = code.n, code.H.rows
    dist = [0] * (n + 1)
    word = 0
    dist[0] = 1
    for i in range(1, 1 << r):
        word ^= code.H.bits[(i & -i).bit_length() - 1]
        dist[word.bit_count()] += 1

    def kraw(k, x):
        return sum((-1) ** j * math.comb(x, j) * math.comb(n - x, k - j) for j in range(k + 1))

    for w in range(1, n + 1):
        a_w = sum(dist[x] * kraw(w, x) for x in range(n + 1)) // (1 << r)
        if a_w:
            return w
    return n


# --- 8: solver oracle -------------------------------------------------------


def criterion_8() -> tuple[bool, str]:
    rng = random.Random(8080)
    corpus = []
    for _ in range(600):
        m = rng.randint(1, 12)
        corpus.append(_random_instance(rng, m))
    mismatches = 0
    for f in corpus:
        sat = count_models(f) > 0
        for kernel in KERNELS:
            v = solve_internal(f, kernel=kernel)
            mismatches += v.is_sat != sat
    lowered_checked = lowered_bad = 0
    for f in corpus:
        low = lower_xors(f, chunk_width=5)
        if low.num_vars > 22:
            continue
        lowered_checked += 1
        m = f.num_vars
        proj = {int(i) >> (low.num_vars - m) for i in model_indices(low)}
        lowered_bad += proj != {int(i) for i in model_indices(f)}
    ok = mismatches == 0 and lowered_bad == 0 and lowered_checked >= 200
    return ok, (
        f"{len(corpus)} instances x {len(KERNELS)} kernels, {mismatches} verdict mismatches; "
        f"lowering checked on {lowered_checked}, {lowered_bad} projection mismatches"
    )


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8}


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n, capsys):
    ok, detail = CRITERIA[n]()
    with capsys.disabled():
        print()
        report(n, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    results = []
    for n, fn in CRITERIA.items():
        ok, detail = fn()
        report(n, ok, detail)
        results.append(ok)
    sys.exit(0 if all(results) else 1)

import random

import pytest
from hypothesis import strategies as st

from xorcount.formula import CnfFormula, ConstrainedFormula, XorConstraint


def random_formula(rng: random.Random, m: int, n_clauses: int, n_xors: int, width: int = 3) -> ConstrainedFormula:
    clauses = []
    for _ in range(n_clauses):
        k = rng.randint(1, min(width, m))
        vs = rng.sample(range(1, m + 1), k)
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    xors = []
    for _ in range(n_xors):
        k = rng.randint(0, m)
        xors.append(XorConstraint(rng.sample(range(1, m + 1), k), rng.randint(0, 1)))
    return ConstrainedFormula(CnfFormula(m, tuple(clauses)), tuple(xors))


def fuzz_corpus(n: int, seed: int = 0, max_vars: int = 12) -> list[ConstrainedFormula]:
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        m = rng.randint(1, max_vars)
        out.append(random_formula(rng, m, rng.randint(0, 3 * m), rng.randint(0, m // 2 + 1)))
    return out


@st.composite
def formulas(draw, max_vars: int = 8, max_clauses: int = 12, max_xors: int = 4, allow_empty_even: bool = True):
    m = draw(st.integers(1, max_vars))
    var = st.integers(1, m)
    lit = st.builds(lambda v, neg: -v if neg else v, var, st.booleans())
    clauses = draw(st.lists(st.lists(lit, min_size=1, max_size=4), max_size=max_clauses))
    xs = []
    for vs, par in draw(st.lists(st.tuples(st.sets(var), st.integers(0, 1)), max_size=max_xors)):
        if not vs and not par and not allow_empty_even:
            continue
        xs.append(XorConstraint(vs, par))
    # drop tautologies up front so the clause list is already normalized
    clauses = [c for c in clauses if not any(-l in c for l in c)]
    return ConstrainedFormula(CnfFormula(m, tuple(tuple(c) for c in clauses)), tuple(xs))


@pytest.fixture
def rng():
    return random.Random(12345)

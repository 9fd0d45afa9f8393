"""Randomized threshold decisions and the binary-search counter built on them."""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import bounds
from .formula import (
    CnfFormula,
    ConstrainedFormula,
    as_constrained,
    min_distance_of_indices,
    model_indices,
)
from .sampler import RngLike, SeededRng, _to_constraints, as_generator, draw_block
from .solver import (
    BackendConfig,
    BackendUnknownError,
    Prepared,
    SolverVerdict,
    Status,
    solve_external,
)
from .solver import _pysearch

log = logging.getLogger(__name__)

VERIFY_DMIN_CAP = 20


class DminViolation(ValueError):
    """The formula has two models closer than the claimed minimum distance."""


def _prepare(f, backend: BackendConfig | None) -> Prepared:
    return f if isinstance(f, Prepared) else Prepared(f)


def _trial(prep: Prepared, s: int, lam: float, gen: np.random.Generator, backend: BackendConfig) -> bool:
    parity, mask = draw_block(prep.num_vars, lam, s, gen)
    if backend.kind == "internal":
        deadline = 0.0
        if backend.timeout:
            deadline = time.monotonic() + backend.timeout
        status, _, _ = prep.search(mask.view(np.uint8), parity, deadline)
        if status == _pysearch.TIMEOUT:
            raise BackendUnknownError(SolverVerdict(Status.UNKNOWN, "timeout"))
        return status == _pysearch.SAT
    f2 = prep.formula.with_xors(_to_constraints(parity, mask))
    verdict = solve_external(f2, backend)
    if verdict.is_unknown:
        raise BackendUnknownError(verdict)
    return verdict.is_sat


def decide(
    s: int,
    f: CnfFormula | ConstrainedFormula | Prepared,
    lam: float,
    rng: RngLike,
    backend: BackendConfig | None = None,
) -> int:
    """1 iff ``f`` stays satisfiable under ``s`` fresh sparse XORs."""
    if s < 1:
        raise ValueError("s must be >= 1")
    if not 0.0 < lam <= 0.5:
        raise ValueError("lambda must lie in (0, 1/2]")
    backend = backend or BackendConfig()
    return int(_trial(_prepare(f, backend), s, lam, as_generator(rng), backend))


def _boosted(prep, s, t, lam, gen, backend) -> tuple[int, int]:
    need = t // 2 + 1
    yes = no = 0
    while yes < need and no < need:
        if _trial(prep, s, lam, gen, backend):
            yes += 1
        else:
            no += 1
    return int(yes >= need), yes + no


def decide_boosted(
    s: int,
    f: CnfFormula | ConstrainedFormula | Prepared,
    t: int,
    lam: float,
    rng: RngLike,
    backend: BackendConfig | None = None,
) -> int:
    """Majority answer of ``t`` independent decisions.

    Trial ``i`` consumes the ``i``-th block of the stream, so the outcome does
    not depend on when trials run.  Sampling stops once the majority is
    settled, which cannot change the answer.
    """
    if t < 1 or t % 2 == 0:
        raise ValueError("t must be a positive odd integer")
    if s < 1:
        raise ValueError("s must be >= 1")
    backend = backend or BackendConfig()
    bit, _ = _boosted(_prepare(f, backend), s, t, lam, as_generator(rng), backend)
    return bit


@dataclass(frozen=True)
class CountParams:
    alpha: float = 1.5
    beta: float = 1.5
    delta_target: float = 0.1
    gamma: float = 0.8
    d_min: int = 1
    lam: float | None = None  # None: pick the density threshold per iteration
    seed: int | None = None
    backend: BackendConfig = field(default_factory=BackendConfig)
    verify_dmin: bool = False

    def validate(self, m: int) -> None:
        if self.alpha <= 1:
            raise ValueError("alpha must be > 1")
        bounds.check_beta(self.beta)
        if not 0.0 < self.delta_target < 0.5:
            raise ValueError("delta must lie in (0, 1/2)")
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("gamma must lie in (0, 1) for counting")
        if not 1 <= self.d_min <= m:
            raise ValueError(f"d_min must lie in [1, {m}]")
        if self.lam is not None and not 0.0 < self.lam <= 0.5:
            raise ValueError("lambda must lie in (0, 1/2]")


@dataclass
class CountInterval:
    l: float
    u: float
    iterations: int
    sat_calls: int
    seed: int
    trials_per_decision: int = 1
    s_values: list[int] = field(default_factory=list)
    lambdas: list[float] = field(default_factory=list)
    decisions: list[int] = field(default_factory=list)
    widths: list[float] = field(default_factory=list)

    @property
    def width(self) -> float:
        return self.u - self.l

    def counts(self) -> tuple[int, int]:
        return interval_to_counts(self)

    def contains(self, n: int) -> bool:
        low, high = self.counts()
        return low <= n <= high


def interval_to_counts(iv: CountInterval | tuple[float, float]) -> tuple[int, int]:
    l, u = (iv.l, iv.u) if isinstance(iv, CountInterval) else iv
    return math.floor(2.0**l), math.ceil(2.0**u)


def ceil_log2(m: int) -> int:
    return (m - 1).bit_length() if m > 1 else 0


def trials_per_decision(p: CountParams, m: int) -> int:
    unsat_err, sat_err = bounds.decision_error_probs(p.gamma, p.alpha)
    per_call = p.delta_target / max(1, ceil_log2(m))
    return bounds.min_odd_trials(max(unsat_err, sat_err), per_call)


def density_for(s: int, m: int, p: CountParams) -> float:
    if p.lam is not None:
        return p.lam
    lam = bounds.lambda_star(s, m, p.beta, p.d_min, p.gamma)
    return lam if math.isfinite(lam) else 0.5


def verify_dmin(f: CnfFormula | ConstrainedFormula, d_min: int) -> None:
    f = as_constrained(f)
    if f.num_vars > VERIFY_DMIN_CAP:
        raise ValueError(f"--verify-dmin supports at most {VERIFY_DMIN_CAP} variables")
    idx = model_indices(f)
    if len(idx) >= 2 and d_min > 1:
        d = min_distance_of_indices(idx, f.num_vars)
        if d < d_min:
            raise DminViolation(f"models at distance {d} < claimed d_min {d_min}")


def count(f: CnfFormula | ConstrainedFormula | Prepared, p: CountParams | None = None) -> CountInterval:
    """Binary search for ``[l, u]`` with the model count in ``[floor 2^l, ceil 2^u]``."""
    p = p or CountParams()
    prep = f if isinstance(f, Prepared) else Prepared(f)
    m = prep.num_vars
    p.validate(m)
    if p.verify_dmin:
        verify_dmin(prep.formula, p.d_min)

    seed = p.seed if p.seed is not None else SeededRng.from_entropy().seed
    root = SeededRng(seed)
    slack = max(p.alpha, p.beta)
    kmax = ceil_log2(m)
    t = trials_per_decision(p, m)

    l, u = -1.0, float(m)
    iv = CountInterval(l, u, 0, 0, seed, t)
    k = 0
    while not (u - l <= 2 * slack + 1 or k == kmax):
        s = max(1, math.floor((u + l) / 2 + 0.5))
        lam = density_for(s, m, p)
        bit, calls = _boosted(prep, s, t, lam, root.spawn(k).generator(), p.backend)
        prev = u - l
        if bit == 0:
            u = s + p.beta
        else:
            l = s - p.alpha
        k += 1
        iv.sat_calls += calls
        iv.s_values.append(s)
        iv.lambdas.append(lam)
        iv.decisions.append(bit)
        iv.widths.append(u - l)
        if u - l > prev / 2 + slack + 0.5 + 1e-9:
            raise AssertionError("interval failed to shrink")

    iv.l, iv.u, iv.iterations = l, u, k
    if iv.width > 2 * slack + 2 + 1e-9 or k > kmax:
        raise AssertionError(f"interval [{l}, {u}] breaks the width/iteration guarantee")
    if iv.width > 2 * slack + 1 + 1e-9:
        log.warning("interval width %.3g exceeds 2*max(alpha, beta) + 1", iv.width)
    return iv

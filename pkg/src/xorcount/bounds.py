"""Closed-form variance bound for sparse XOR hashing and derived quantities.

``bound_B`` upper-bounds var(T)/mean(T)**2 for the number of survivors T
of ``s`` sparse constraints when the formula has more than ``2**(s+beta)``
models, any two of which are at Hamming distance >= ``d``.  Everything else
here is built on it: the density threshold ``lambda_star``, the one-sided
error rates of a single decision, and majority-vote amplification.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

INF = math.inf
LN2 = math.log(2.0)


def ell(j: int, m: int, d: int) -> int:
    if not d <= j <= m:
        raise ValueError(f"j={j} outside [{d}, {m}]")
    half = (d + 1) // 2
    if 2 * j <= m:
        return j - half + 1
    return max(0, m - j - half + 1)


@lru_cache(maxsize=4096)
def w_star_n_star(m: int, d: int, N: int) -> tuple[int, int]:
    """Smallest ``w`` whose cumulative binomial mass reaches ``N - 1``.

    Returns ``(w*, N*)`` where ``N*`` is the mass strictly before ``w*``;
    ``(0, 0)`` when no such ``w`` exists.  Partial sums saturate at ``N``.
    """
    target = N - 1
    acc = 0
    for w in range(d, m + 1):
        prev = acc
        acc = min(N, acc + math.comb(m, ell(w, m, d)))
        if acc >= target:
            return w, prev
    return 0, 0


def n_threshold(s: int, beta: float) -> int:
    e = s + beta
    if float(e).is_integer():
        return 1 << int(e)
    return math.ceil(2.0**e)


@dataclass(frozen=True)
class BoundParams:
    m: int
    s: int
    beta: float
    d: int
    lam: float

    def __post_init__(self):
        if self.s < 1:
            raise ValueError("s must be >= 1")
        if self.beta <= 0:
            raise ValueError("beta must be > 0")
        if not 1 <= self.d <= self.m:
            raise ValueError("need 1 <= d <= m")
        if not 0.0 < self.lam <= 0.5:
            raise ValueError("lambda must lie in (0, 1/2]")

    @property
    def rho(self) -> float:
        return 1.0 - 2.0 * self.lam

    @property
    def N(self) -> int:
        return n_threshold(self.s, self.beta)


def _log_pair_term(rho: float, j: int, s: int) -> float:
    # log((1 + rho**j)**s)
    return s * math.log1p(rho**j)


def _bound(m: int, s: int, beta: float, d: int, lam: float) -> float:
    N = n_threshold(s, beta)
    w, n_star = w_star_n_star(m, d, N)
    if w == 0:
        return INF
    rho = 1.0 - 2.0 * lam
    scale = -(s + beta) * LN2
    total = 0.0
    for j in range(d, w):
        total += math.exp(math.log(math.comb(m, ell(j, m, d))) + _log_pair_term(rho, j, s) + scale)
    rest = N - 1 - n_star
    if rest > 0:
        total += math.exp(math.log(rest) + _log_pair_term(rho, w, s) + scale)
    return 2.0**-beta + total - 1.0


def bound_B(p: BoundParams) -> float:
    """Upper bound on var/mean**2 of the survivor count; ``inf`` when vacuous."""
    return _bound(p.m, p.s, p.beta, p.d, p.lam)


@lru_cache(maxsize=65536)
def lambda_star(
    s: int, m: int, beta: float, d: int, gamma: float, tol: float = 1e-6, max_iter: int = 80
) -> float:
    """Least density in (0, 1/2] with ``bound_B <= gamma``, by bisection.

    The returned value is the upper end of the final bracket, so it always
    satisfies the bound.  ``inf`` when even ``lam = 1/2`` fails.
    """
    BoundParams(m, s, beta, d, 0.5)  # validates
    if not 0.0 < gamma <= 1.0:
        raise ValueError("gamma must lie in (0, 1]")
    if _bound(m, s, beta, d, 0.5) > gamma:
        return INF
    lo, hi = 0.0, 0.5
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if _bound(m, s, beta, d, mid) <= gamma:
            hi = mid
        else:
            lo = mid
    return hi


def majority_error(t: int, delta: float) -> float:
    """Probability that a majority of ``t`` independent runs errs."""
    if t < 1 or t % 2 == 0:
        raise ValueError("t must be a positive odd integer")
    if not 0.0 <= delta < 0.5:
        raise ValueError("delta must lie in [0, 1/2)")
    return math.fsum(
        math.comb(t, k) * delta**k * (1.0 - delta) ** (t - k) for k in range((t + 1) // 2, t + 1)
    )


@lru_cache(maxsize=1024)
def min_odd_trials(delta_single: float, delta_target: float) -> int:
    if not 0.0 < delta_single < 0.5:
        raise ValueError("delta_single must lie in (0, 1/2)")
    if not 0.0 < delta_target:
        raise ValueError("delta_target must be positive")
    t = 1
    while majority_error(t, delta_single) > delta_target:
        t += 2
    return t


def decision_error_probs(gamma: float, alpha: float) -> tuple[float, float]:
    """(false-UNSAT, false-SAT) error bounds of one decision at a feasible density."""
    if alpha <= 1:
        raise ValueError("alpha must be > 1")
    if not 0.0 < gamma <= 1.0:
        raise ValueError("gamma must lie in (0, 1]")
    return gamma / (1.0 + gamma), 2.0**-alpha


@dataclass(frozen=True)
class DecisionBudget:
    alpha: float
    gamma: float
    t: int

    @property
    def delta_false_unsat(self) -> float:
        return decision_error_probs(self.gamma, self.alpha)[0]

    @property
    def delta_false_sat(self) -> float:
        return decision_error_probs(self.gamma, self.alpha)[1]

    @property
    def delta_single(self) -> float:
        return max(self.delta_false_unsat, self.delta_false_sat)

    @property
    def delta_boosted(self) -> float:
        return majority_error(self.t, self.delta_single)


def expected_xor_length(m: int, lam: float) -> float:
    return m * lam


def embedding_gain(n: int, d_code: int, m: int, s: int, beta: float) -> tuple[bool, float, float]:
    """Does an ``[n, m, d_code]`` code shorten the expected XOR length at ``s``?"""
    lhs = n * lambda_star(s, n, beta, d_code, 1.0)
    rhs = m * lambda_star(s, m, beta, 1, 1.0)
    return lhs <= rhs, lhs, rhs


def check_beta(beta: float) -> None:
    if beta <= 0:
        raise ValueError("beta must be > 0")
    if beta <= 1:
        warnings.warn("beta <= 1: the decision-algorithm definition asks for beta > 1", stacklevel=2)

"""Intrinsic false-positive probability of BMoM.

For a bad state ``rho`` the basis choice alone lets the state through when
every basis element has ``<x> > 1 - alpha*eps``; ``eta`` is the probability
of that over a uniformly random ordered basis.  Boundary equality counts as
detection.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np
from scipy import stats

from .errors import NotABadState, TooLarge
from .gf2 import count_ordered_bases, enumerate_bases, sample_full_rank_batch, unpack_bits
from .protocols import FACT_TOL, check_fact_a
from .states import (
    ExpectationProfile,
    StabilizerMixture,
    coset_deficit_family,
    fidelity,
    generator_flip_family,
    leading_subgroup,
)
from .tableau import StabilizerTableau, group_element

EXACT_MAX_N = 4
CONFIDENCE = 0.99
CHUNK = 1 << 15
SHAPE_LABEL = "shape only; constants unknown"
CSV_COLUMNS = ("n", "alpha", "epsilon", "family", "method", "estimate", "ci_low", "ci_high", "trials", "seed")


@dataclass(frozen=True)
class EtaEstimate:
    n: int
    alpha: float
    epsilon: float
    estimate: float
    ci_low: float
    ci_high: float
    trials: int
    method: str
    family: str = "custom"
    seed: int | None = None
    undetected: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.ci_low <= self.estimate <= self.ci_high <= 1.0:
            raise ValueError(f"inconsistent interval {self.ci_low} <= {self.estimate} <= {self.ci_high}")

    def covers(self, value: float) -> bool:
        return self.ci_low <= value <= self.ci_high

    def csv_row(self) -> list:
        d = asdict(self)
        return [d[c] for c in CSV_COLUMNS]


def _check_bad(rho, psi0, eps, tol=FACT_TOL) -> float:
    f = fidelity(rho, psi0)
    if f > 1.0 - eps + tol:
        raise NotABadState(f"fidelity {f} exceeds 1 - eps = {1 - eps}")
    return f


def clopper_pearson(successes: int, trials: int, confidence: float = CONFIDENCE) -> tuple[float, float]:
    ci = stats.binomtest(successes, trials).proportion_ci(confidence, method="exact")
    return float(ci.low), float(ci.high)


def eta_exact_fraction(rho: StabilizerMixture, psi0: StabilizerTableau, alpha: float, eps: float) -> Fraction:
    """Exact ``eta`` by enumerating every ordered basis (``n <= 4``)."""
    n = psi0.n
    if n > EXACT_MAX_N:
        raise TooLarge(f"exact enumeration limited to n <= {EXACT_MAX_N}, got {n}")
    _check_bad(rho, psi0, eps)
    cutoff = 1.0 - alpha * eps + FACT_TOL
    passes = [rho.expectation(group_element(psi0, a)) > cutoff for a in range(2**n)]
    hits = sum(all(passes[a] for a in basis.rows) for basis in enumerate_bases(n))
    return Fraction(hits, count_ordered_bases(n))


def eta_exact(rho, psi0, alpha, eps, family: str = "custom") -> EtaEstimate:
    frac = eta_exact_fraction(rho, psi0, alpha, eps)
    total = count_ordered_bases(psi0.n)
    v = float(frac)
    return EtaEstimate(psi0.n, alpha, eps, v, v, v, total, "exact", family,
                       undetected=int(frac * total))


def undetected_count(profile: ExpectationProfile, alpha: float, eps: float, trials: int,
                     rng: np.random.Generator, chunk: int = CHUNK) -> int:
    """Number of ``trials`` random bases with every element above ``1 - alpha*eps``."""
    n = profile.n
    fid = profile.fidelity()
    cutoff = 1.0 - alpha * eps + FACT_TOL
    hits = done = 0
    while done < trials:
        b = min(chunk, trials - done)
        words, _ = sample_full_rank_batch(n, b, rng)
        vals = profile.values(unpack_bits(words, n))
        check_fact_a(vals, fid)
        hits += int(np.all(vals > cutoff, axis=1).sum())
        done += b
    return hits


def eta_monte_carlo(rho, psi0, alpha, eps, trials, rng, family: str = "custom",
                    seed: int | None = None) -> EtaEstimate:
    if trials < 1:
        raise ValueError("trials must be positive")
    _check_bad(rho, psi0, eps)
    profile = ExpectationProfile.compile(rho, psi0)
    hits = undetected_count(profile, alpha, eps, trials, rng)
    lo, hi = clopper_pearson(hits, trials)
    est = hits / trials
    return EtaEstimate(psi0.n, alpha, eps, est, min(lo, est), max(hi, est), trials, "montecarlo",
                       family, seed, hits)


# ------------------------------------------------------------------- shapes


def eta_bound_curves(n_range, alpha: float) -> list[tuple[int, float, float]]:
    """``(n, ((alpha+1)/2)**n, 2**(-n/alpha))`` rows; see ``SHAPE_LABEL``."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    return [(int(n), ((alpha + 1.0) / 2.0) ** n, 2.0 ** (-n / alpha)) for n in n_range]


def shape_crossing(alpha: float, level: float = 1e-12, n_max: int = 10_000) -> int | None:
    """Smallest ``n`` at which the upper shape drops below ``level``."""
    r = (alpha + 1.0) / 2.0
    if r >= 1.0:
        return None
    n = max(0, math.floor(math.log(level) / math.log(r)) - 1)
    while r**n >= level:
        n += 1
    return n if n <= n_max else None


# ----------------------------------------------------------- worst-case search


@dataclass(frozen=True)
class Candidate:
    """A deficit-family member: ``d`` directions, total deficit weight ``c``.

    ``d == n`` is ``generator_flip_family(c)``; smaller ``d`` is the coset
    family over the leading subgroup of dimension ``n - d``.
    """

    n: int
    d: int
    c: float

    @property
    def family(self) -> str:
        if self.d == self.n:
            return f"generator_flip(c={self.c:g})"
        return f"coset_deficit(k={self.n - self.d},c={self.c:g})"

    def build(self, psi0: StabilizerTableau) -> StabilizerMixture:
        if self.d == self.n:
            return generator_flip_family(psi0, self.c)
        return coset_deficit_family(psi0, leading_subgroup(self.n, self.n - self.d), self.c)


def candidate_grid(n: int, eps: float, steps: int = 4) -> list[Candidate]:
    """Every ``d`` with ``c`` on a short ladder from ``eps`` upward."""
    cs = sorted({min(eps * (1.0 + 0.5 * j), 1.0 - 1e-9) for j in range(steps)})
    return [Candidate(n, d, c) for d in range(n, 0, -1) for c in cs]


def worst_case_search(psi0: StabilizerTableau, alpha: float, eps: float, budget: int,
                      rng: np.random.Generator, trials: int = 10_000,
                      c_steps: int = 4) -> tuple[StabilizerMixture, EtaEstimate]:
    """Greedy hill-climb over the deficit families maximizing Monte-Carlo ``eta``.

    Starts at ``generator_flip_family(eps)`` and moves to the best strictly
    better neighbour (``d +- 1`` or the next ``c`` rung) until none improves
    or ``budget`` evaluations are spent.  Every candidate is scored with the
    same seed so comparisons share their random bases.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    n = psi0.n
    cs = sorted({c.c for c in candidate_grid(n, eps, c_steps)})
    crn_seed = int(rng.integers(2**63))
    cache: dict = {}

    def score(cand: Candidate) -> EtaEstimate:
        if cand not in cache:
            cache[cand] = eta_monte_carlo(cand.build(psi0), psi0, alpha, eps, trials,
                                          np.random.default_rng(crn_seed), cand.family, crn_seed)
        return cache[cand]

    best = Candidate(n, n, cs[0])
    best_est = score(best)
    while len(cache) < budget:
        ci = cs.index(best.c)
        moves = [Candidate(n, d, best.c) for d in (best.d - 1, best.d + 1) if 1 <= d <= n]
        moves += [Candidate(n, best.d, cs[j]) for j in (ci - 1, ci + 1) if 0 <= j < len(cs)]
        moves = [m for m in moves if m not in cache][: budget - len(cache)]
        if not moves:
            break
        scored = [(score(m), m) for m in moves]
        top_est, top = max(scored, key=lambda t: t[0].estimate)
        if top_est.estimate <= best_est.estimate:
            break
        best, best_est = top, top_est
    return best.build(psi0), best_est


# ------------------------------------------------------------- amplification


@dataclass(frozen=True)
class AmplificationResult:
    n: int
    eps: float
    fixed_min: float
    random_mins: np.ndarray

    def fraction_at_most(self, level: float) -> float:
        return float(np.mean(self.random_mins <= level + FACT_TOL))


def amplification_demo(n: int, eps: float, trials: int, rng: np.random.Generator) -> AmplificationResult:
    """Minimum expectation over the canonical basis versus random bases for
    ``generator_flip_family(eps)``."""
    if n < 2:
        raise ValueError("n must be at least 2")
    psi0 = StabilizerTableau.zero_state(n)
    profile = ExpectationProfile.compile(generator_flip_family(psi0, eps), psi0)
    fixed = float(profile.values(np.eye(n, dtype=np.uint8)).min())
    mins = []
    done = 0
    while done < trials:
        b = min(CHUNK, trials - done)
        words, _ = sample_full_rank_batch(n, b, rng)
        vals = profile.values(unpack_bits(words, n))
        check_fact_a(vals, 1.0 - eps)
        mins.append(vals.min(axis=1))
        done += b
    return AmplificationResult(n, eps, fixed, np.concatenate(mins) if mins else np.zeros(0))

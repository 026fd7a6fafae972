"""Operating parameters for DFE-C and BMoM from fidelity and mistake targets.

Both protocols accept iff an average of +-1 outcomes is at least ``1 - beta``.
Counting ``-1`` outcomes instead, a shot is a Bernoulli trial with success
probability ``q = (1 - <x>) / 2``; acceptance means "at most ``beta/2``
of the shots came out -1".  Worst-case means are

* DFE-C: good ``q = delta/2``, bad ``q = eps/2``;
* BMoM: every basis element of a good state has ``q <= omega*delta/2``, some
  basis element of a bad state has ``q >= alpha*eps/2`` (up to the intrinsic
  probability), and the good side needs a union bound over ``n`` elements.

Shot counts come from the multiplicative Chernoff bound
``exp(-g^2 mu / (2+g))`` on either tail (``P[Y >= (1+g) mu]`` and
``P[Y <= (1-g) mu]``) and are re-checked against exact binomial tails by
``validate``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

import numpy as np
from scipy import optimize, stats

from .errors import BudgetTooTight, InfeasibleGap

OMEGA = 2.0
EDGE = 1e-9
MAX_SHOTS = 10**15


def accepts(mean: float, beta: float) -> bool:
    """The decision rule shared by both protocols; ties accept."""
    return mean >= 1.0 - beta


def max_accepted_count(shots: int, beta: float) -> int:
    """Largest number of -1 outcomes among ``shots`` that still accepts
    (-1 if none does)."""
    k = int(math.floor(beta * shots / 2.0))
    k = min(max(k, 0), shots)
    while k < shots and accepts((shots - 2 * (k + 1)) / shots, beta):
        k += 1
    while k >= 0 and not accepts((shots - 2 * k) / shots, beta):
        k -= 1
    return k


def _rate(mean: float, threshold: float, side: str) -> float:
    if not 0.0 < mean < 1.0 or not 0.0 < threshold < 1.0:
        raise ValueError("mean and threshold must lie in (0, 1)")
    if side == "upper":
        if threshold <= mean:
            raise InfeasibleGap(f"upper tail needs threshold {threshold} > mean {mean}")
        g = threshold / mean - 1.0
        return g * g * mean / (2.0 + g)
    if side == "lower":
        if threshold >= mean:
            raise InfeasibleGap(f"lower tail needs threshold {threshold} < mean {mean}")
        g = 1.0 - threshold / mean
        return g * g * mean / (2.0 + g)
    raise ValueError(f"side must be 'upper' or 'lower', not {side!r}")


def chernoff_bound(mean: float, threshold: float, side: str, shots: int) -> float:
    """Multiplicative Chernoff bound on the empirical Bernoulli mean of
    ``shots`` trials crossing ``threshold`` (from above/below ``mean``)."""
    return math.exp(-_rate(mean, threshold, side) * shots)


def chernoff_shots(mean: float, threshold: float, side: str, p_target: float) -> int:
    """Smallest shot count whose Chernoff tail is at most ``p_target``."""
    rate = _rate(mean, threshold, side)
    if p_target >= 1.0:
        return 1
    if p_target <= 0.0:
        raise ValueError("p_target must be positive")
    n = max(1, math.ceil(math.log(1.0 / p_target) / rate))
    while n > 1 and math.exp(-rate * (n - 1)) <= p_target:
        n -= 1
    while math.exp(-rate * n) > p_target:
        n += 1
    return n


def binomial_tail(mean: float, shots: int, k: int, side: str) -> float:
    """Exact ``P[Y > k]`` (side='upper') or ``P[Y <= k]`` (side='lower')."""
    if side == "upper":
        return float(stats.binom.sf(k, shots, mean))
    return float(stats.binom.cdf(k, shots, mean))


@dataclass(frozen=True)
class ProtocolParams:
    """Full parameter record.

    For DFE-C ``alpha = omega = 1`` so the same chain formula
    ``omega*delta*(1+gamma_good) = beta = (1-gamma_bad)*alpha*eps`` covers
    both protocols.  ``shots`` is ``M`` for DFE-C and ``m`` for BMoM.
    """

    protocol: str
    n: int
    delta: float
    eps: float
    p: float
    alpha: float
    omega: float
    beta: float
    gamma_good: float
    gamma_bad: float
    shots: int
    p_good: float
    p_bad: float

    @property
    def union(self) -> int:
        return self.n if self.protocol == "bmom" else 1

    @property
    def q_good(self) -> float:
        return self.omega * self.delta / 2.0

    @property
    def q_bad(self) -> float:
        return self.alpha * self.eps / 2.0

    @property
    def q_threshold(self) -> float:
        return self.beta / 2.0

    def chain(self) -> list[tuple[str, float]]:
        """The interval partition from ``delta`` to ``eps``, left to right."""
        out = [("delta", self.delta)]
        if self.protocol == "bmom":
            out.append(("omega*delta", self.omega * self.delta))
        out.append(("omega*delta*(1+gamma_good)", self.omega * self.delta * (1 + self.gamma_good)))
        out.append(("beta", self.beta))
        out.append(("(1-gamma_bad)*alpha*eps", (1 - self.gamma_bad) * self.alpha * self.eps))
        if self.protocol == "bmom":
            out.append(("alpha*eps", self.alpha * self.eps))
        out.append(("eps", self.eps))
        return out

    def chain_holds(self, tol: float = 1e-12) -> bool:
        """Strict inequalities along the chain, equalities next to ``beta``."""
        c = self.chain()
        ib = [k for k, _ in c].index("beta")
        vals = [v for _, v in c]
        for i in range(len(vals) - 1):
            if i in (ib - 1, ib):
                if abs(vals[i] - vals[i + 1]) > tol:
                    return False
            elif not vals[i] < vals[i + 1]:
                return False
        return self.gamma_good > 0 and 0 < self.gamma_bad < 1

    def as_dict(self) -> dict:
        return asdict(self)

    def to_lines(self) -> str:
        return "\n".join(f"{k}={v!r}" if isinstance(v, float) else f"{k}={v}" for k, v in self.as_dict().items())

    @staticmethod
    def csv_header() -> str:
        return ",".join(f.name for f in fields(ProtocolParams))

    def to_csv_row(self) -> str:
        return ",".join(repr(v) if isinstance(v, float) else str(v) for v in self.as_dict().values())

    @classmethod
    def from_dict(cls, d: dict) -> "ProtocolParams":
        cast = {"str": str, "int": int, "float": float}
        return cls(**{f.name: cast[f.type](d[f.name]) for f in fields(cls)})


def _balanced_shots(q_good: float, q_bad: float, t: float, p: float, union: int) -> float:
    """Continuous ``N`` with ``union*e_good(N) + e_bad(N) = p`` at threshold ``t``."""
    rg = _rate(q_good, t, "upper")
    rb = _rate(q_bad, t, "lower")
    log_p = math.log(p)

    def g(n):
        return np.logaddexp(math.log(union) - rg * n, -rb * n) - log_p

    hi = math.log((union + 1) / p) / min(rg, rb)
    return float(optimize.brentq(g, 0.0, hi, xtol=1e-12, rtol=1e-14))


def _best_threshold(q_good: float, q_bad: float, p: float, union: int) -> float:
    span = q_bad - q_good
    lo, hi = EDGE, 1.0 - EDGE

    def cost(s):
        return _balanced_shots(q_good, q_bad, q_good + s * span, p, union)

    grid = np.linspace(lo, hi, 257)
    vals = [cost(s) for s in grid]
    i = int(np.argmin(vals))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    res = optimize.minimize_scalar(cost, bounds=(a, b), method="bounded", options={"xatol": 1e-12})
    s = res.x if res.fun <= vals[i] else grid[i]
    return float(q_good + s * span)


def _solve(protocol, n, delta, eps, p, alpha, omega) -> ProtocolParams:
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    q_good = omega * delta / 2.0
    q_bad = alpha * eps / 2.0
    union = n if protocol == "bmom" else 1
    try:
        t = _best_threshold(q_good, q_bad, p, union)
        n_cont = _balanced_shots(q_good, q_bad, t, p, union)
    except (ValueError, RuntimeError) as exc:
        raise BudgetTooTight(f"no balancing threshold found: {exc}") from exc
    if not math.isfinite(n_cont) or n_cont > MAX_SHOTS:
        raise BudgetTooTight(f"balanced shot count {n_cont} is out of range")
    p_good = union * math.exp(-_rate(q_good, t, "upper") * n_cont)
    p_bad = p - p_good
    for _ in range(4):
        m_good = chernoff_shots(q_good, t, "upper", p_good / union)
        m_bad = chernoff_shots(q_bad, t, "lower", p_bad)
        if m_good == m_bad:
            break
        # float rounding put one side across an integer; give that side its
        # exact bound at the larger count and hand the rest to the other side
        m = max(m_good, m_bad)
        if m_good < m:
            p_good = union * chernoff_bound(q_good, t, "upper", m)
            p_bad = p - p_good
        else:
            p_bad = chernoff_bound(q_bad, t, "lower", m)
            p_good = p - p_bad
    else:
        raise BudgetTooTight("could not balance the two shot counts")
    beta = 2.0 * t
    return ProtocolParams(
        protocol=protocol,
        n=n,
        delta=delta,
        eps=eps,
        p=p,
        alpha=alpha,
        omega=omega,
        beta=beta,
        gamma_good=beta / (omega * delta) - 1.0,
        gamma_bad=1.0 - beta / (alpha * eps),
        shots=m_good,
        p_good=p_good,
        p_bad=p_bad,
    )


def solve_dfe(delta: float, eps: float, p: float, n: int = 1) -> ProtocolParams:
    """Threshold and outer-loop count ``M`` for DFE-C (balanced so that
    ``M_good == M_bad``)."""
    if not 0.0 < delta:
        raise ValueError("delta must be positive")
    if delta >= eps:
        raise InfeasibleGap(f"delta = {delta!r} must be < eps = {eps!r}")
    if eps > 1.0:
        raise ValueError("eps must be at most 1")
    return _solve("dfe", n, delta, eps, p, 1.0, 1.0)


def solve_bmom(n: int, delta: float, eps: float, p: float, alpha: float) -> ProtocolParams:
    """Threshold and inner-loop count ``m`` for BMoM with ``omega = 2``."""
    if n < 1:
        raise ValueError("n must be positive")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if not 0.0 < delta < eps <= 1.0:
        raise InfeasibleGap(f"need 0 < delta < eps <= 1, got delta={delta!r}, eps={eps!r}")
    if OMEGA * delta >= alpha * eps:
        raise InfeasibleGap(
            f"omega*delta = {OMEGA * delta!r} must be < alpha*eps = {alpha * eps!r}"
        )
    return _solve("bmom", n, delta, eps, p, alpha, OMEGA)


@dataclass(frozen=True)
class Validation:
    false_negative: float
    false_positive: float
    accept_count: int

    def ok(self, params: ProtocolParams) -> bool:
        return self.false_negative <= params.p_good and self.false_positive <= params.p_bad


def validate(params: ProtocolParams) -> Validation:
    """Exact-binomial mistake probabilities at the worst-case boundary means.

    The good side treats the ``union`` estimates as independent, each at the
    worst good mean; the bad side uses the single detecting estimate.
    """
    k = max_accepted_count(params.shots, params.beta)
    per = binomial_tail(params.q_good, params.shots, k, "upper")
    fn = -math.expm1(params.union * math.log1p(-per)) if per < 1 else 1.0
    fp = binomial_tail(params.q_bad, params.shots, k, "lower")
    return Validation(fn, fp, k)

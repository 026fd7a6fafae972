"""Acceptance gate: one test per criterion, each at its stated tolerance.

Run ``pytest tests/test_acceptance.py -v``; the terminal summary lists one
PASS/FAIL line per criterion together with the measured numbers.
"""
import io
import time

import numpy as np
import pytest
from strategies import random_mixture, random_tableau

from stabcert.cli import main
from stabcert.gf2 import enumerate_bases, full_rank_probability, sample_full_rank, sample_full_rank_batch
from stabcert.intrinsic import (
    amplification_demo,
    eta_exact,
    eta_monte_carlo,
    shape_crossing,
    worst_case_search,
)
from stabcert.params import solve_bmom, validate
from stabcert.protocols import bmom_campaign
from stabcert.states import (
    ExpectationProfile,
    coset_deficit_family,
    fidelity,
    generator_flip_family,
    leading_subgroup,
    sign_flip_mixture,
)
from stabcert.tableau import StabilizerTableau, group_element

pytestmark = pytest.mark.acceptance


def _tag(record_property, name, detail):
    record_property("criterion", name)
    record_property("detail", detail)
    print(f"\n[{name}] {detail}")


def test_ac1_fidelity_identity(record_property):
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    worst = 0.0
    count = 0
    for n in range(1, 7):
        for _ in range(12):
            target = random_tableau(n, rng)
            rho = random_mixture(target, rng, k=int(rng.integers(1, 6)))
            total = sum(rho.expectation(group_element(target, a)) for a in range(2**n))
            worst = max(worst, abs(total / 2**n - fidelity(rho, target)))
            count += 1
    elapsed = time.perf_counter() - start
    _tag(record_property, "AC1 fidelity identity",
         f"{count} instances n<=6, max |err|={worst:.2e}, {elapsed:.1f}s")
    assert worst <= 1e-12
    assert elapsed < 10


def test_ac2_fact_a(record_property):
    rng = np.random.default_rng(202)
    violations = 0
    pairs = 0
    lowest_margin = np.inf
    while pairs < 10_000:
        n = int(rng.integers(1, 9))
        target = random_tableau(n, rng)
        rho = random_mixture(target, rng)
        f = fidelity(rho, target)
        for a in rng.integers(0, 2**n, size=50):
            val = rho.expectation(group_element(target, int(a)))
            margin = val - (2 * f - 1)
            lowest_margin = min(lowest_margin, margin)
            violations += margin < -1e-12
            pairs += 1
    # BMoM campaigns on boundary good states never see an element below 1 - 2 delta
    campaigns = 0
    for n in (3, 6, 8):
        target = random_tableau(n, rng)
        params = solve_bmom(n, 0.01, 0.1, 1e-3, 0.5)
        for rho in (sign_flip_mixture(target, [(0.99, 0), (0.01, 1)]), generator_flip_family(target, 0.01)):
            prof = ExpectationProfile.compile(rho, target)
            bmom_campaign(prof, params, 20_000, rng)  # raises FactViolation on any breach
            campaigns += 1
    _tag(record_property, "AC2 fact (a) bound",
         f"{pairs} pairs, violations={violations}, min margin={lowest_margin:.3g}, "
         f"{campaigns} campaigns without intrinsic false negatives")
    assert violations == 0


def test_ac3_fidelity_lower_bound(record_property):
    rng = np.random.default_rng(303)
    worst_mu = worst_nu = -np.inf
    checks = 0
    for i in range(1000):
        n = 1 + i % 8
        target = random_tableau(n, rng)
        rho = random_mixture(target, rng)
        f = fidelity(rho, target)
        table = None
        if n <= 3:
            table = [rho.expectation(group_element(target, a)) for a in range(2**n)]
            bases = [b.rows for b in enumerate_bases(n)]
        else:
            bases = [sample_full_rank(n, rng)[0].rows for _ in range(3)]
        for rows in bases:
            vals = [table[a] if table else rho.expectation(group_element(target, a)) for a in rows]
            worst_mu = max(worst_mu, (1 - f) - n / 2 * (1 - np.mean(vals)))
            worst_nu = max(worst_nu, (1 - f) - n / 2 * (1 - min(vals)))
            checks += 1
    _tag(record_property, "AC3 fidelity lower bound",
         f"1000 instances, {checks} bases, max slack mean={worst_mu:.2e} min={worst_nu:.2e}")
    assert worst_mu <= 1e-10
    assert worst_nu <= 1e-10


def test_ac4_basis_sampler(record_property):
    rng = np.random.default_rng(404)
    start = time.perf_counter()
    _, rounds = sample_full_rank_batch(20, 100_000, rng)
    elapsed = time.perf_counter() - start
    target = full_rank_probability(20)
    rate = len(rounds) / rounds.sum()
    mean = rounds.mean()
    _tag(record_property, "AC4 basis sampler",
         f"acceptance={rate:.4f} (target {target:.4f}), mean rounds={mean:.3f}, "
         f"{rounds.sum()} rounds, {elapsed:.1f}s")
    assert abs(rate - target) <= 0.01
    assert abs(mean - 3.5) <= 0.1
    assert elapsed < 30


def _eta_grid(n, eps=0.1):
    t = StabilizerTableau.zero_state(n)
    cells = []
    for alpha in (0.55, 0.7, 0.85, 1.0):
        cells.append((f"generator_flip a={alpha}", generator_flip_family(t, eps), alpha))
    for alpha in (0.7, 1.0):
        cells.append((f"generator_flip c=1.5eps a={alpha}", generator_flip_family(t, 1.5 * eps), alpha))
    k = 1 if n > 1 else 0
    for alpha in (0.6, 0.8, 1.0):
        cells.append((f"coset k={k} a={alpha}", coset_deficit_family(t, leading_subgroup(n, k), eps), alpha))
    cells.append(("single flip a=0.9", sign_flip_mixture(t, [(1 - eps, 0), (eps, 1)]), 0.9))
    return t, cells


def test_ac5_eta_oracle(record_property):
    start = time.perf_counter()
    covered = total = nonzero = 0
    misses = []
    for n in (2, 3, 4):
        t, cells = _eta_grid(n)
        for i, (label, rho, alpha) in enumerate(cells):
            exact = eta_exact(rho, t, alpha, 0.1).estimate
            mc = eta_monte_carlo(rho, t, alpha, 0.1, 1_000_000, np.random.default_rng([505, n, i]))
            total += 1
            nonzero += exact > 0
            if mc.covers(exact):
                covered += 1
            else:
                misses.append(f"n={n} {label}: exact={exact:.5g} ci=[{mc.ci_low:.5g},{mc.ci_high:.5g}]")
    elapsed = time.perf_counter() - start
    _tag(record_property, "AC5 eta oracle agreement",
         f"{covered}/{total} cells covered ({nonzero} with eta>0), {elapsed:.0f}s"
         + (f"; misses: {'; '.join(misses)}" if misses else ""))
    assert covered / total >= 0.97
    assert elapsed < 300


def test_ac6_solver_validity(record_property):
    rng = np.random.default_rng(606)
    start = time.perf_counter()
    done = worst_fn = worst_fp = 0
    while done < 100:
        n = int(rng.integers(1, 500))
        alpha = float(rng.uniform(0.1, 0.95))
        delta = float(10 ** rng.uniform(-3, -1.5))
        eps = float(rng.uniform(2 * delta / alpha * 1.05, 1.0))
        p = float(10 ** rng.uniform(-9, -1))
        if 2 * delta >= alpha * eps:
            continue
        params = solve_bmom(n, delta, eps, p, alpha)
        v = validate(params)
        assert params.chain_holds(), params
        assert v.false_negative <= params.p_good, params
        assert v.false_positive <= params.p_bad, params
        worst_fn = max(worst_fn, v.false_negative / params.p_good)
        worst_fp = max(worst_fp, v.false_positive / params.p_bad)
        done += 1
    elapsed = time.perf_counter() - start
    _tag(record_property, "AC6 solver validity",
         f"100 tuples, max FN/p_good={worst_fn:.3g}, max FP/p_bad={worst_fp:.3g}, {elapsed:.1f}s")
    assert elapsed < 60


def test_ac7_end_to_end(record_property):
    n, delta, eps, p, alpha = 10, 0.01, 0.1, 1e-3, 0.5
    trials = 100_000
    rng = np.random.default_rng(707)
    start = time.perf_counter()
    target = random_tableau(n, rng)
    params = solve_bmom(n, delta, eps, p, alpha)

    good = sign_flip_mixture(target, [(1 - delta, 0), (delta, 1)])
    assert fidelity(good, target) == pytest.approx(1 - delta)
    res_good = bmom_campaign(ExpectationProfile.compile(good, target), params, trials, rng)
    fn = res_good.reject_rate
    fn_cap = params.p_good + 3 * np.sqrt(params.p_good * (1 - params.p_good) / trials)

    bad = generator_flip_family(target, eps)
    eta = eta_monte_carlo(bad, target, alpha, eps, 1_000_000, rng)
    res_bad = bmom_campaign(ExpectationProfile.compile(bad, target), params, trials, rng)
    fp = res_bad.accept_rate
    q = eta.estimate + params.p_bad
    fp_cap = q + 3 * np.sqrt(q * (1 - q) / trials)
    elapsed = time.perf_counter() - start
    _tag(record_property, "AC7 end-to-end mistake rates",
         f"m={params.shots}, FN={fn:.2e} (cap {fn_cap:.2e}), FP={fp:.2e} "
         f"(eta={eta.estimate:.2e}, cap {fp_cap:.2e}), {elapsed:.0f}s")
    assert fn <= fn_cap
    assert fp <= fp_cap
    assert elapsed < 600


def test_ac8_amplification(record_property):
    n, eps = 100, 0.1
    res = amplification_demo(n, eps, 10_000, np.random.default_rng(808))
    frac = res.fraction_at_most(1 - 0.5 * eps)
    _tag(record_property, "AC8 amplification",
         f"fixed min={res.fixed_min:.15g}, random min median={np.median(res.random_mins):.4f}, "
         f"fraction <= 1-eps/2: {frac:.4f}")
    assert abs(res.fixed_min - (1 - 2 * eps / n)) <= 1e-12
    assert frac >= 0.99


def test_ac9_bound_shape_consistency(record_property, tmp_path):
    out = io.StringIO()
    code = main(["eta", "--n", "4", "--alpha", "0.5", "--method", "exact", "--bounds-n-max", "128",
                 "--out", str(tmp_path / "eta.csv"), "--svg", str(tmp_path / "eta.svg")], out=out)
    assert code == 0
    cross = shape_crossing(0.5)
    assert f"n={cross}" in out.getvalue()
    assert 1 < cross < 200

    details = [f"upper shape at alpha=1/2 crosses 1e-12 at n={cross}"]
    ok = True
    for n, alpha in ((47, 0.25), (64, 0.5)):
        psi0 = StabilizerTableau.zero_state(n)
        _, est = worst_case_search(psi0, alpha, 0.1, 6, np.random.default_rng([909, n]), trials=20_000)
        shape = ((alpha + 1) / 2) ** n
        below = est.estimate < shape
        ok &= below
        details.append(f"(n={n}, a={alpha}) {est.family}: eta_hat={est.estimate:.3g} "
                       f"(99% upper {est.ci_high:.2g}) vs shape {shape:.3g}")
    _tag(record_property, "AC9 bound-shape consistency", "; ".join(details))
    assert ok

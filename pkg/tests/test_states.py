import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from strategies import random_mixture, random_tableau, seeds

from stabcert.dense import DenseState
from stabcert.errors import DependentRows, DimensionMismatch, FidelityMismatch
from stabcert.gf2 import BitMatrix, BitVec, sample_full_rank
from stabcert.pauli import PauliOperator
from stabcert.states import (
    ExpectationProfile,
    StabilizerMixture,
    coset_deficit,
    coset_deficit_family,
    expectation,
    fidelity,
    generator_flip_family,
    leading_subgroup,
    orthogonal_state,
    stabilizer_fidelity,
)
from stabcert.tableau import StabilizerTableau, group_element, parse_circuit, tableau_from_circuit

BELL = tableau_from_circuit(parse_circuit("qubits 2\nH 0\nCNOT 0 1\n"))
ZERO = StabilizerTableau.zero_state(1)
ONE = ZERO.with_flips(1)
PLUS = tableau_from_circuit(parse_circuit("qubits 1\nH 0\n"))


def group_values(rho, target):
    return [rho.expectation(group_element(target, a)) for a in range(2**target.n)]


class TestExpectation:
    def test_pure_member(self):
        rho = StabilizerMixture.pure(BELL)
        assert rho.expectation(PauliOperator.from_label("XX")) == 1.0
        assert rho.expectation(PauliOperator.from_label("YY")) == -1.0

    def test_bell_xi(self):
        assert StabilizerMixture.pure(BELL).expectation(PauliOperator.from_label("XI")) == 0.0

    def test_classical_mixture(self):
        rho = StabilizerMixture(((0.9, ZERO), (0.1, ONE)))
        assert rho.expectation(PauliOperator.from_label("Z")) == pytest.approx(0.8)
        dense = DenseState.from_mixture(rho)
        assert dense.expectation(PauliOperator.from_label("Z")) == pytest.approx(0.8)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            expectation(StabilizerMixture.pure(BELL), PauliOperator.from_label("X"))

    def test_weights_validated(self):
        with pytest.raises(ValueError):
            StabilizerMixture(((0.5, ZERO), (0.4, ONE)))
        with pytest.raises(ValueError):
            StabilizerMixture(((1.1, ZERO), (-0.1, ONE)))


class TestFidelity:
    def test_self(self):
        assert fidelity(StabilizerMixture.pure(BELL), BELL) == 1.0

    def test_orthogonal(self):
        assert stabilizer_fidelity(ZERO, ONE) == 0.0

    def test_zero_plus(self):
        assert stabilizer_fidelity(ZERO, PLUS) == pytest.approx(0.5)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 6), seeds)
    def test_group_theoretic_vs_sum(self, n, seed):
        rng = np.random.default_rng(seed)
        a, b = random_tableau(n, rng), random_tableau(n, rng)
        vals = group_values(StabilizerMixture.pure(b), a)
        assert stabilizer_fidelity(a, b) == pytest.approx(sum(vals) / 2**n, abs=1e-12)

    @settings(max_examples=15, deadline=None)
    @given(st.integers(1, 5), seeds)
    def test_matches_dense(self, n, seed):
        rng = np.random.default_rng(seed)
        target = random_tableau(n, rng)
        rho = random_mixture(target, rng)
        assert fidelity(rho, target) == pytest.approx(DenseState.from_mixture(rho).fidelity(target), abs=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 6), seeds)
def test_fidelity_identity(n, seed):
    rng = np.random.default_rng(seed)
    target = random_tableau(n, rng)
    rho = random_mixture(target, rng)
    assert sum(group_values(rho, target)) / 2**n == pytest.approx(fidelity(rho, target), abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 8), seeds)
def test_fact_a_lower_bound(n, seed):
    rng = np.random.default_rng(seed)
    target = random_tableau(n, rng)
    rho = random_mixture(target, rng)
    f = fidelity(rho, target)
    for a in rng.integers(0, 2**n, size=32):
        assert rho.expectation(group_element(target, int(a))) >= 2 * f - 1 - 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 8), seeds)
def test_fidelity_bound_mean_and_min(n, seed):
    rng = np.random.default_rng(seed)
    target = random_tableau(n, rng)
    rho = random_mixture(target, rng)
    f = fidelity(rho, target)
    basis, _ = sample_full_rank(n, rng)
    vals = [rho.expectation(group_element(target, a)) for a in basis.rows]
    mu, nu = np.mean(vals), min(vals)
    assert 1 - f <= n / 2 * (1 - mu) + 1e-10
    assert 1 - f <= n / 2 * (1 - nu) + 1e-10


@settings(max_examples=10, deadline=None)
@given(st.integers(2, 8), seeds)
def test_mixture_matches_dense_on_random_paulis(n, seed):
    rng = np.random.default_rng(seed)
    target = random_tableau(n, rng)
    rho = random_mixture(target, rng, k=3)
    dense = DenseState.from_mixture(rho)
    ops = [group_element(target, int(a)) for a in rng.integers(0, 2**n, size=8)]
    ops += [PauliOperator.from_label("".join(rng.choice(list("IXYZ"), size=n))) for _ in range(8)]
    for op in ops:
        assert rho.expectation(op) == pytest.approx(dense.expectation(op), abs=1e-10)


class TestProfile:
    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 6), seeds)
    def test_profile_matches_membership(self, n, seed):
        rng = np.random.default_rng(seed)
        target = random_tableau(n, rng)
        rho = random_mixture(target, rng)
        prof = ExpectationProfile.compile(rho, target)
        exact = group_values(rho, target)
        bits = np.array([BitVec(n, a).to_array() for a in range(2**n)])
        np.testing.assert_allclose(prof.values(bits), exact, atol=1e-9)
        assert [prof.value(a) for a in range(2**n)] == pytest.approx(exact, abs=1e-12)
        assert prof.fidelity() == pytest.approx(fidelity(rho, target), abs=1e-12)


class TestGeneratorFlip:
    def test_c_zero_is_target(self):
        rho = generator_flip_family(BELL, 0.0)
        assert fidelity(rho, BELL) == 1.0

    @pytest.mark.parametrize("n", [1, 3, 4])
    def test_closed_form(self, n):
        eps = 0.1
        target = random_tableau(n, np.random.default_rng(n))
        rho = generator_flip_family(target, eps)
        assert fidelity(rho, target) == pytest.approx(1 - eps)
        dense = DenseState.from_mixture(rho)
        for a in range(2**n):
            x = group_element(target, a)
            want = 1 - 2 * eps * bin(a).count("1") / n
            assert rho.expectation(x) == pytest.approx(want, abs=1e-12)
            assert dense.expectation(x) == pytest.approx(want, abs=1e-10)

    def test_rejects_bad_c(self):
        with pytest.raises(ValueError):
            generator_flip_family(BELL, 1.5)


def test_orthogonal_state():
    rho = orthogonal_state(BELL)
    assert fidelity(rho, BELL) == 0.0
    assert rho.expectation(PauliOperator.from_label("XX")) == -1.0


class TestCosetDeficit:
    def test_full_subgroup_rejected(self):
        with pytest.raises(FidelityMismatch):
            coset_deficit_family(BELL, BitMatrix.identity(2), 0.1)

    def test_dependent_rows(self):
        with pytest.raises(DependentRows):
            coset_deficit_family(BELL, BitMatrix.from_rows(["10", "10"]), 0.1)

    def test_n2_span_10(self):
        # subgroup span{10}: bit 0 set, so the deficit sits on coefficient bit 1
        rho = coset_deficit_family(BELL, BitMatrix.from_rows(["10"]), 0.1)
        dense = DenseState.from_mixture(rho)
        for s in ("00", "10", "01", "11"):
            a = BitVec.from_str(s)
            val = dense.expectation(group_element(BELL, a))
            assert val == pytest.approx(1.0 if a[1] == 0 else 0.8, abs=1e-10)
        assert fidelity(rho, BELL) == pytest.approx(0.9)

    def test_empty_subgroup_is_generator_flip(self):
        target = random_tableau(3, np.random.default_rng(0))
        a = coset_deficit_family(target, BitMatrix((), 3), 0.2)
        b = generator_flip_family(target, 0.2)
        assert group_values(a, target) == pytest.approx(group_values(b, target))

    @pytest.mark.parametrize("n,k", [(3, 1), (4, 2), (4, 3)])
    def test_deficit_profile_vs_dense(self, n, k):
        eps = 0.15
        target = random_tableau(n, np.random.default_rng(n + k))
        sub = leading_subgroup(n, k)
        rho = coset_deficit_family(target, sub, eps)
        dense = DenseState.from_mixture(rho)
        assert fidelity(rho, target) == pytest.approx(1 - eps)
        span = {0}
        for r in sub.rows:
            span |= {v ^ r for v in span}
        for a in range(2**n):
            val = dense.expectation(group_element(target, a))
            assert 1 - val == pytest.approx(coset_deficit(sub, eps, a), abs=1e-10)
            if a in span:
                assert val == pytest.approx(1.0, abs=1e-10)

    def test_small_eps_limit(self):
        rho = coset_deficit_family(BELL, BitMatrix.from_rows(["10"]), 1e-9)
        assert fidelity(rho, BELL) == pytest.approx(1.0, abs=1e-8)


def test_every_basis_fidelity_bound_exhaustive_small():
    target = random_tableau(3, np.random.default_rng(5))
    rho = random_mixture(target, np.random.default_rng(6))
    f = fidelity(rho, target)
    vals = group_values(rho, target)
    for rows in itertools.permutations(range(1, 8), 3):
        if len({0, *rows, rows[0] ^ rows[1], rows[0] ^ rows[2], rows[1] ^ rows[2], rows[0] ^ rows[1] ^ rows[2]}) < 8:
            continue
        mu = np.mean([vals[a] for a in rows])
        assert 1 - f <= 1.5 * (1 - mu) + 1e-10

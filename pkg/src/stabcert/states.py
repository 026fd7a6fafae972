"""Models of the prepared state: weighted mixtures of stabilizer states.

Expectations of Paulis on a mixture are exact: each component contributes
``+w``, ``-w`` or ``0`` according to a membership test.  For campaigns the
mixture is also compiled against the target into an ``ExpectationProfile``,
a closed form of ``a -> <group_element(target, a)>_rho`` on coefficient
vectors that can be evaluated on large batches of bases at once.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DependentRows, DimensionMismatch, FidelityMismatch
from .gf2 import BitMatrix, BitVec, nullspace, parity, rank, row_basis, solve_linear
from .pauli import PauliOperator, symplectic_product
from .tableau import Membership, StabilizerTableau, group_element, membership

WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class StabilizerMixture:
    components: tuple

    def __post_init__(self):
        comps = tuple((float(w), t) for w, t in self.components)
        if not comps:
            raise ValueError("empty mixture")
        n = comps[0][1].n
        if any(t.n != n for _, t in comps):
            raise DimensionMismatch("mixture components differ in qubit count")
        if any(w < 0 for w, _ in comps):
            raise ValueError("negative mixture weight")
        if abs(sum(w for w, _ in comps) - 1.0) > WEIGHT_TOL:
            raise ValueError("mixture weights do not sum to 1")
        object.__setattr__(self, "components", comps)

    @property
    def n(self) -> int:
        return self.components[0][1].n

    @classmethod
    def pure(cls, t: StabilizerTableau) -> "StabilizerMixture":
        return cls(((1.0, t),))

    def expectation(self, x: PauliOperator) -> float:
        return expectation(self, x)

    def fidelity(self, target: StabilizerTableau) -> float:
        return fidelity(self, target)


def expectation(rho: StabilizerMixture, x: PauliOperator) -> float:
    """``Tr(x rho)`` as ``sum_i w_i * s_i`` with ``s_i`` in {+1, -1, 0}."""
    if x.n != rho.n:
        raise DimensionMismatch(f"{x.n}-qubit observable on {rho.n}-qubit state")
    return float(sum(w * int(membership(t, x)) for w, t in rho.components))


@dataclass(frozen=True)
class _Overlap:
    """How one component looks from the target group's coefficient space.

    ``group_element(target, a)`` lies in +-S(component) iff ``a`` satisfies
    every row of ``constraints`` (parity zero); there its sign in the
    component is ``(-1)**(character . a)``.
    """

    weight: float
    constraints: tuple
    character: int
    dim: int
    contradictory: bool


def _overlap(target: StabilizerTableau, other: StabilizerTableau, weight: float = 1.0) -> _Overlap:
    n = target.n
    gens = target.generators
    if all(g.x == h.x and g.z == h.z for g, h in zip(gens, other.generators)):
        # same unsigned generators: only the signs can differ
        flips = sum(((g.phase - h.phase) % 4 == 2) << j for j, (g, h) in enumerate(zip(gens, other.generators)))
        return _Overlap(weight, (), flips, n, flips != 0)
    rows = []
    for h in other.generators:
        row = 0
        for j, g in enumerate(gens):
            row |= symplectic_product(g, h) << j
        rows.append(row)
    cons = row_basis(BitMatrix(tuple(rows), n))
    inter = nullspace(cons)
    chi = 0
    for b, v in enumerate(inter.rows):
        m = membership(other, group_element(target, v))
        if m is Membership.NON:
            raise AssertionError("intersection element missing from component group")
        if m is Membership.MINUS:
            chi |= 1 << b
    if inter.nrows:
        ell = solve_linear(inter, BitVec(inter.nrows, chi))
        character = ell.value
    else:
        character = 0
    return _Overlap(weight, cons.rows, character, inter.nrows, chi != 0)


def stabilizer_fidelity(a: StabilizerTableau, b: StabilizerTableau) -> float:
    """``|<a|b>|^2`` for pure stabilizer states without any 2^n sum.

    Zero when the groups contain some ``x`` and ``-x`` respectively,
    otherwise ``2**(k - n)`` with ``k`` the dimension of their intersection.
    """
    if a.n != b.n:
        raise DimensionMismatch("tableaux differ in qubit count")
    ov = _overlap(a, b)
    return 0.0 if ov.contradictory else 2.0 ** (ov.dim - a.n)


def fidelity(rho: StabilizerMixture, target: StabilizerTableau) -> float:
    if rho.n != target.n:
        raise DimensionMismatch("state and target differ in qubit count")
    return float(sum(w * stabilizer_fidelity(target, t) for w, t in rho.components))


class ExpectationProfile:
    """``a -> <group_element(target, a)>_rho`` compiled for fast evaluation."""

    def __init__(self, n: int, overlaps: Sequence[_Overlap]):
        self.n = n
        self.overlaps = tuple(overlaps)
        k = len(self.overlaps)
        self.weights = np.array([o.weight for o in self.overlaps])
        self._chars = np.zeros((n, k), dtype=np.float32)
        cons_cols, owner = [], []
        for i, o in enumerate(self.overlaps):
            self._chars[:, i] = BitVec(n, o.character).to_array()
            for c in o.constraints:
                cons_cols.append(BitVec(n, c).to_array())
                owner.append(i)
        if cons_cols:
            self._cons = np.array(cons_cols, dtype=np.float32).T
            self._owner = np.zeros((len(owner), k), dtype=np.float32)
            self._owner[np.arange(len(owner)), owner] = 1.0
        else:
            self._cons = None

    @classmethod
    def compile(cls, rho: StabilizerMixture, target: StabilizerTableau) -> "ExpectationProfile":
        if rho.n != target.n:
            raise DimensionMismatch("state and target differ in qubit count")
        return cls(target.n, [_overlap(target, t, w) for w, t in rho.components if w > 0])

    def fidelity(self) -> float:
        return float(
            sum(o.weight * 2.0 ** (o.dim - self.n) for o in self.overlaps if not o.contradictory)
        )

    def value(self, coeffs) -> float:
        a = coeffs.value if isinstance(coeffs, BitVec) else int(coeffs)
        total = 0.0
        for o in self.overlaps:
            if any(parity(c & a) for c in o.constraints):
                continue
            total += -o.weight if parity(o.character & a) else o.weight
        return total

    def values(self, bits: np.ndarray) -> np.ndarray:
        """Evaluate on a ``(..., n)`` array of coefficient bits."""
        bits = np.asarray(bits)
        flat = bits.reshape(-1, self.n).astype(np.float32)
        odd = (flat @ self._chars).astype(np.int64) & 1
        contrib = 1.0 - 2.0 * odd
        if self._cons is not None:
            viol = ((flat @ self._cons).astype(np.int64) & 1).astype(np.float32)
            outside = (viol @ self._owner) > 0
            contrib[outside] = 0.0
        return (contrib @ self.weights).reshape(bits.shape[:-1])


# ------------------------------------------------------------- state families


def sign_flip_mixture(target: StabilizerTableau, parts) -> StabilizerMixture:
    """Mixture of ``target.with_flips(s)`` for ``(weight, s)`` pairs."""
    comps = [(w, target.with_flips(s)) for w, s in parts if w > 0]
    return StabilizerMixture(tuple(comps))


def orthogonal_state(target: StabilizerTableau) -> StabilizerMixture:
    """``target`` with every generator negated; fidelity 0."""
    return StabilizerMixture.pure(target.with_flips((1 << target.n) - 1))


def generator_flip_family(target: StabilizerTableau, c: float) -> StabilizerMixture:
    """``(1-c) psi0 + sum_i (c/n) psi_i`` with ``psi_i`` = generator ``i`` negated.

    Fidelity is ``1 - c`` and ``<group_element(a)> = 1 - 2 c wt(a) / n``.
    """
    if not 0.0 <= c <= 1.0:
        raise ValueError("c must lie in [0, 1]")
    n = target.n
    return sign_flip_mixture(target, [(1.0 - c, 0)] + [(c / n, 1 << i) for i in range(n)])


def annihilator_basis(subgroup_coeffs: BitMatrix) -> BitMatrix:
    """Canonical basis of ``{s : s . a = 0 for every row a}``."""
    return nullspace(subgroup_coeffs)


def coset_deficit_family(target: StabilizerTableau, subgroup_coeffs: BitMatrix, eps: float) -> StabilizerMixture:
    """Bad state whose deficit avoids the span ``K`` of ``subgroup_coeffs``.

    With ``s_1..s_d`` the canonical basis of the annihilator of ``K``
    (``d = n - dim K``) the state is ``(1-eps) psi0 + sum_j (eps/d) psi_{s_j}``.
    Its fidelity is ``1 - eps`` and
    ``1 - <group_element(a)> = 2 eps |{j : s_j . a = 1}| / d``, which vanishes
    exactly on ``K``.  An empty ``subgroup_coeffs`` reproduces
    ``generator_flip_family(target, eps)``.
    """
    n = target.n
    if subgroup_coeffs.ncols != n:
        raise DimensionMismatch("subgroup rows must have n coefficients")
    if rank(subgroup_coeffs) != subgroup_coeffs.nrows:
        raise DependentRows("subgroup coefficient rows are linearly dependent")
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    flips = annihilator_basis(subgroup_coeffs)
    d = flips.nrows
    if d == 0:
        raise FidelityMismatch("full subgroup leaves no deficit; the state would be psi0")
    return sign_flip_mixture(target, [(1.0 - eps, 0)] + [(eps / d, s) for s in flips.rows])


def coset_deficit(subgroup_coeffs: BitMatrix, eps: float, coeffs: int) -> float:
    """Closed-form ``1 - <group_element(a)>`` of ``coset_deficit_family``."""
    flips = annihilator_basis(subgroup_coeffs)
    hits = sum(parity(s & coeffs) for s in flips.rows)
    return 2.0 * eps * hits / flips.nrows


def leading_subgroup(n: int, k: int) -> BitMatrix:
    """``span{e_0, ..., e_{k-1}}``: the coset family with that subgroup has
    ``d = n - k`` deficit directions."""
    if not 0 <= k <= n:
        raise ValueError("k must lie in [0, n]")
    return BitMatrix(tuple(1 << i for i in range(k)), n)

"""Stabilizer tableaux, Clifford circuit templates and stabilizer-group sampling."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import CircuitParseError, DimensionMismatch, UnknownGate
from .gf2 import BitMatrix, BitVec, random_words, sample_full_rank, words_to_ints
from .pauli import PauliOperator, compose, symplectic_product

GATE_ARITY = {"H": 1, "S": 1, "X": 1, "Z": 1, "CNOT": 2, "CZ": 2}


@dataclass(frozen=True)
class CircuitTemplate:
    n: int
    gates: tuple = ()

    def __post_init__(self):
        gates = tuple((str(name).upper(), tuple(int(q) for q in qs)) for name, qs in self.gates)
        object.__setattr__(self, "gates", gates)
        if self.n < 1:
            raise ValueError("a circuit needs at least one qubit")
        for name, qs in gates:
            arity = GATE_ARITY.get(name)
            if arity is not None and len(qs) != arity:
                raise ValueError(f"{name} takes {arity} qubit(s), got {len(qs)}")
            if any(not 0 <= q < self.n for q in qs):
                raise ValueError(f"qubit index out of range in {name} {qs}")
            if len(set(qs)) != len(qs):
                raise ValueError(f"repeated qubit in {name} {qs}")

    def to_text(self) -> str:
        lines = [f"qubits {self.n}"]
        lines += [" ".join([name, *map(str, qs)]) for name, qs in self.gates]
        return "\n".join(lines) + "\n"


def parse_circuit(text: str) -> CircuitTemplate:
    """Parse the line format ``qubits N`` followed by ``GATE q [q2]`` lines."""
    n = None
    gates = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0].upper()
        if n is None:
            if head != "QUBITS" or len(parts) != 2:
                raise CircuitParseError("expected header 'qubits N'", lineno)
            try:
                n = int(parts[1])
            except ValueError:
                raise CircuitParseError(f"bad qubit count {parts[1]!r}", lineno) from None
            if n < 1:
                raise CircuitParseError("qubit count must be positive", lineno)
            continue
        if head not in GATE_ARITY:
            raise UnknownGate(f"line {lineno}: unknown gate {parts[0]!r}")
        try:
            qs = tuple(int(p) for p in parts[1:])
        except ValueError:
            raise CircuitParseError(f"non-integer qubit index in {line!r}", lineno) from None
        if len(qs) != GATE_ARITY[head]:
            raise CircuitParseError(f"{head} takes {GATE_ARITY[head]} qubit(s)", lineno)
        if any(not 0 <= q < n for q in qs) or len(set(qs)) != len(qs):
            raise CircuitParseError(f"invalid qubit indices in {line!r}", lineno)
        gates.append((head, qs))
    if n is None:
        raise CircuitParseError("missing 'qubits N' header")
    return CircuitTemplate(n, tuple(gates))


def load_circuit(path) -> CircuitTemplate:
    return parse_circuit(Path(path).read_text())


class Membership(enum.IntEnum):
    """Outcome of testing ``x`` against a stabilizer group; the value is ``<x>``."""

    PLUS = 1
    MINUS = -1
    NON = 0


@dataclass(frozen=True)
class StabilizerTableau:
    """Generators and destabilizers of a pure stabilizer state.

    The generators commute, ``generators[i]`` anticommutes with
    ``destabilizers[i]`` only, and every generator stabilizes the state with
    eigenvalue +1 (group elements carry their sign in the phase).
    """

    n: int
    generators: tuple
    destabilizers: tuple

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "destabilizers", tuple(self.destabilizers))
        n = self.n
        if len(self.generators) != n or len(self.destabilizers) != n:
            raise ValueError("need n generators and n destabilizers")
        for p in self.generators + self.destabilizers:
            if p.n != n:
                raise DimensionMismatch("operator size differs from tableau size")
            if not p.is_hermitian():
                raise ValueError(f"{p} is not Hermitian")
        gens, dest = self.generators, self.destabilizers
        for i in range(n):
            for j in range(n):
                if j > i and symplectic_product(gens[i], gens[j]):
                    raise ValueError(f"generators {i} and {j} anticommute")
                if symplectic_product(gens[i], dest[j]) != (i == j):
                    raise ValueError(f"bad destabilizer pairing at ({i}, {j})")

    @classmethod
    def zero_state(cls, n: int) -> "StabilizerTableau":
        gens = [PauliOperator(n, 0, 1 << i) for i in range(n)]
        dest = [PauliOperator(n, 1 << i, 0) for i in range(n)]
        return cls(n, gens, dest)

    @classmethod
    def from_labels(cls, generators: Sequence[str], destabilizers: Sequence[str]):
        return cls(
            len(generators),
            [PauliOperator.from_label(g) for g in generators],
            [PauliOperator.from_label(d) for d in destabilizers],
        )

    def with_flips(self, flips: int) -> "StabilizerTableau":
        """Negate generator ``j`` for every set bit ``j`` of ``flips``.

        The result stabilizes a state orthogonal to this one unless ``flips``
        is zero; its group has the same unsigned elements.
        """
        gens = [g.negate() if (flips >> j) & 1 else g for j, g in enumerate(self.generators)]
        return StabilizerTableau(self.n, gens, self.destabilizers)

    def generator_matrix(self) -> BitMatrix:
        return BitMatrix(tuple(g.symplectic() for g in self.generators), 2 * self.n)

    def __str__(self) -> str:
        return "\n".join(g.label for g in self.generators)


class _AGTableau:
    """Mutable Aaronson-Gottesman rows used only while applying gates."""

    def __init__(self, n: int):
        self.n = n
        self.xs = [1 << i for i in range(n)] + [0] * n
        self.zs = [0] * n + [1 << i for i in range(n)]
        self.rs = [0] * (2 * n)

    def h(self, a):
        bit = 1 << a
        for i in range(2 * self.n):
            xa, za = self.xs[i] & bit, self.zs[i] & bit
            if xa and za:
                self.rs[i] ^= 1
            self.xs[i] = (self.xs[i] & ~bit) | za
            self.zs[i] = (self.zs[i] & ~bit) | xa

    def s(self, a):
        bit = 1 << a
        for i in range(2 * self.n):
            if self.xs[i] & bit:
                if self.zs[i] & bit:
                    self.rs[i] ^= 1
                self.zs[i] ^= bit

    def x(self, a):
        bit = 1 << a
        for i in range(2 * self.n):
            if self.zs[i] & bit:
                self.rs[i] ^= 1

    def z(self, a):
        bit = 1 << a
        for i in range(2 * self.n):
            if self.xs[i] & bit:
                self.rs[i] ^= 1

    def cnot(self, a, b):
        for i in range(2 * self.n):
            xa, za = (self.xs[i] >> a) & 1, (self.zs[i] >> a) & 1
            xb, zb = (self.xs[i] >> b) & 1, (self.zs[i] >> b) & 1
            self.rs[i] ^= xa & zb & (xb ^ za ^ 1)
            self.xs[i] ^= xa << b
            self.zs[i] ^= zb << a

    def cz(self, a, b):
        self.h(b)
        self.cnot(a, b)
        self.h(b)

    def row(self, i) -> PauliOperator:
        x, z = self.xs[i], self.zs[i]
        return PauliOperator(self.n, x, z, 2 * self.rs[i] + (x & z).bit_count())


def tableau_from_circuit(circuit: CircuitTemplate) -> StabilizerTableau:
    """Tableau of the state ``circuit |0...0>``."""
    t = _AGTableau(circuit.n)
    ops = {"H": t.h, "S": t.s, "X": t.x, "Z": t.z, "CNOT": t.cnot, "CZ": t.cz}
    for name, qs in circuit.gates:
        try:
            op = ops[name]
        except KeyError:
            raise UnknownGate(f"unknown gate {name!r}") from None
        op(*qs)
    n = circuit.n
    return StabilizerTableau(
        n, [t.row(n + i) for i in range(n)], [t.row(i) for i in range(n)]
    )


def random_clifford_circuit(n: int, n_gates: int, rng: np.random.Generator) -> CircuitTemplate:
    names = sorted(GATE_ARITY)
    if n == 1:
        names = [g for g in names if GATE_ARITY[g] == 1]
    gates = []
    for _ in range(n_gates):
        name = names[rng.integers(len(names))]
        qs = rng.choice(n, size=GATE_ARITY[name], replace=False)
        gates.append((name, tuple(int(q) for q in qs)))
    return CircuitTemplate(n, tuple(gates))


def _coeff_value(t: StabilizerTableau, coeffs) -> int:
    if isinstance(coeffs, BitVec):
        if coeffs.n != t.n:
            raise DimensionMismatch("coefficient vector length differs from n")
        return coeffs.value
    return int(coeffs)


def group_element(t: StabilizerTableau, coeffs) -> PauliOperator:
    """Product of the generators selected by ``coeffs`` (a BitVec or int)."""
    a = _coeff_value(t, coeffs)
    out = PauliOperator.identity(t.n)
    j = 0
    while a:
        if a & 1:
            out = compose(out, t.generators[j])
        a >>= 1
        j += 1
    return out


def coefficients_of(t: StabilizerTableau, x: PauliOperator) -> int | None:
    """Coefficient vector of ``x`` in the generators, ignoring sign, or None."""
    if x.n != t.n:
        raise DimensionMismatch(f"{x.n}-qubit operator vs {t.n}-qubit tableau")
    a = 0
    for j, d in enumerate(t.destabilizers):
        a |= symplectic_product(x, d) << j
    prod = group_element(t, a)
    if prod.x != x.x or prod.z != x.z:
        return None
    return a


def membership(t: StabilizerTableau, x: PauliOperator) -> Membership:
    a = coefficients_of(t, x)
    if a is None:
        return Membership.NON
    diff = (x.phase - group_element(t, a).phase) % 4
    if diff == 0:
        return Membership.PLUS
    if diff == 2:
        return Membership.MINUS
    raise ValueError(f"{x} is not Hermitian")


def sample_coefficients(n: int, rng: np.random.Generator) -> int:
    return words_to_ints(random_words(rng, (1,), n))[0]


def sample_stabilizer(t: StabilizerTableau, rng: np.random.Generator) -> PauliOperator:
    """Uniform element of the signed group, identity included."""
    return group_element(t, sample_coefficients(t.n, rng))


def sample_basis_coefficients(n: int, rng: np.random.Generator) -> tuple[BitMatrix, int]:
    return sample_full_rank(n, rng)


def sample_basis(t: StabilizerTableau, rng: np.random.Generator) -> list[PauliOperator]:
    coeffs, _ = sample_basis_coefficients(t.n, rng)
    return [group_element(t, row) for row in coeffs.rows]

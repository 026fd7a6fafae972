"""Dense statevector / density-matrix oracle for small ``n`` (<= 10).

Used to cross-check the symplectic code paths; nothing here touches tableau
update rules or membership tests.  Qubit 0 is the most significant tensor
factor, matching Pauli labels written left to right.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import DimensionMismatch, TooLarge

MAX_DENSE_QUBITS = 10

_P = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
_GATES_1Q = {
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "X": _P["X"],
    "Z": _P["Z"],
}


def _guard(n: int):
    if n > MAX_DENSE_QUBITS:
        raise TooLarge(f"dense oracle limited to {MAX_DENSE_QUBITS} qubits, got {n}")


def pauli_matrix(op) -> np.ndarray:
    """Dense matrix of a PauliOperator (uses only its label)."""
    _guard(op.n)
    label = op.label
    k = {"+": 1, "-": -1, "+i": 1j, "-i": -1j}[label[: len(label) - op.n]]
    return k * reduce(np.kron, [_P[c] for c in label[-op.n:]], np.eye(1, dtype=complex))


def _apply_1q(psi: np.ndarray, u: np.ndarray, q: int, n: int) -> np.ndarray:
    psi = psi.reshape((2,) * n)
    psi = np.moveaxis(np.tensordot(u, psi, axes=([1], [q])), 0, q)
    return psi.reshape(-1)


def _apply_controlled(psi: np.ndarray, u: np.ndarray, c: int, t: int, n: int) -> np.ndarray:
    psi = psi.reshape((2,) * n).copy()
    idx = [slice(None)] * n
    idx[c] = 1
    sub = psi[tuple(idx)]
    t_sub = t if t < c else t - 1
    sub = np.moveaxis(np.tensordot(u, sub, axes=([1], [t_sub])), 0, t_sub)
    psi[tuple(idx)] = sub
    return psi.reshape(-1)


def statevector_from_circuit(circuit) -> np.ndarray:
    n = circuit.n
    _guard(n)
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = 1.0
    for name, qs in circuit.gates:
        if name in _GATES_1Q:
            psi = _apply_1q(psi, _GATES_1Q[name], qs[0], n)
        elif name == "CNOT":
            psi = _apply_controlled(psi, _P["X"], qs[0], qs[1], n)
        elif name == "CZ":
            psi = _apply_controlled(psi, _P["Z"], qs[0], qs[1], n)
        else:
            raise ValueError(f"no dense matrix for gate {name!r}")
    return psi


def projector_from_generators(generators) -> np.ndarray:
    """``prod_i (I + g_i) / 2`` for commuting Hermitian Paulis."""
    n = generators[0].n
    _guard(n)
    proj = np.eye(2**n, dtype=complex)
    for g in generators:
        proj = proj @ (np.eye(2**n) + pauli_matrix(g)) / 2
    return proj


@dataclass(frozen=True)
class DenseState:
    rho: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        d = rho.shape[0]
        if rho.shape != (d, d) or d & (d - 1):
            raise ValueError("density matrix must be square with power-of-two size")
        if not np.allclose(rho, rho.conj().T, atol=1e-10):
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(rho).real - 1) > 1e-10:
            raise ValueError("density matrix trace differs from 1")
        if np.linalg.eigvalsh(rho).min() < -1e-10:
            raise ValueError("density matrix is not positive semidefinite")
        object.__setattr__(self, "rho", rho)

    @property
    def n(self) -> int:
        return int(self.rho.shape[0]).bit_length() - 1

    @classmethod
    def from_statevector(cls, psi: np.ndarray) -> "DenseState":
        psi = np.asarray(psi, dtype=complex)
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def from_tableau(cls, t) -> "DenseState":
        return cls(projector_from_generators(t.generators))

    @classmethod
    def from_mixture(cls, mixture) -> "DenseState":
        rho = sum(w * projector_from_generators(t.generators) for w, t in mixture.components)
        return cls(rho)

    def expectation(self, op) -> float:
        if op.n != self.n:
            raise DimensionMismatch("operator and state sizes differ")
        return float(np.trace(pauli_matrix(op) @ self.rho).real)

    def fidelity(self, target) -> float:
        """``<psi0| rho |psi0>`` for a target tableau."""
        if target.n != self.n:
            raise DimensionMismatch("target and state sizes differ")
        return float(np.trace(projector_from_generators(target.generators) @ self.rho).real)

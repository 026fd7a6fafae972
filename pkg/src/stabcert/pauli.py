"""n-qubit Pauli operators in symplectic form with mod-4 phase tracking.

A ``PauliOperator`` with bits ``x``, ``z`` and phase exponent ``p`` is the
operator ``i**p * prod_j X_j**x_j Z_j**z_j`` (X-part to the left of the
Z-part on every qubit).  Labels such as ``"-XYZ"`` use the Hermitian letters
I, X, Y, Z with qubit 0 leftmost; ``Y = i X Z``.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import DimensionMismatch
from .gf2 import BitVec, parity

_LETTER = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_BITS = {v: k for k, v in _LETTER.items()}
_PREFIX = {0: "+", 1: "+i", 2: "-", 3: "-i"}


@dataclass(frozen=True)
class PauliOperator:
    n: int
    x: int
    z: int
    phase: int = 0

    def __post_init__(self):
        if (self.x | self.z) >> self.n:
            raise ValueError("bits exceed qubit count")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(n, 0, 0, 0)

    @classmethod
    def from_label(cls, label: str) -> "PauliOperator":
        """Parse ``"XZ"``, ``"-YY"``, ``"+iXI"`` and the like."""
        s = label.strip()
        k = 0
        for prefix, val in (("+i", 1), ("-i", 3), ("i", 1), ("+", 0), ("-", 2)):
            if s.startswith(prefix):
                s, k = s[len(prefix):], val
                break
        x = z = 0
        ycount = 0
        for j, ch in enumerate(s):
            try:
                xb, zb = _BITS[ch]
            except KeyError:
                raise ValueError(f"bad Pauli letter {ch!r} in {label!r}") from None
            x |= xb << j
            z |= zb << j
            ycount += xb & zb
        # Y = i X Z, so each Y contributes one factor of i
        return cls(len(s), x, z, k + ycount)

    @property
    def x_bits(self) -> BitVec:
        return BitVec(self.n, self.x)

    @property
    def z_bits(self) -> BitVec:
        return BitVec(self.n, self.z)

    @property
    def y_count(self) -> int:
        return (self.x & self.z).bit_count()

    def is_hermitian(self) -> bool:
        return (self.phase - self.y_count) % 2 == 0

    @property
    def sign(self) -> int:
        """``+1`` or ``-1`` in front of the Hermitian letter string."""
        k = (self.phase - self.y_count) % 4
        if k == 0:
            return 1
        if k == 2:
            return -1
        raise ValueError(f"{self} is not Hermitian")

    @property
    def letters(self) -> str:
        return "".join(
            _LETTER[((self.x >> j) & 1, (self.z >> j) & 1)] for j in range(self.n)
        )

    @property
    def label(self) -> str:
        k = (self.phase - self.y_count) % 4
        return _PREFIX[k] + self.letters

    def __str__(self) -> str:
        return self.label

    def symplectic(self) -> int:
        """``x | z << n`` as a single 2n-bit integer."""
        return self.x | (self.z << self.n)

    def commutes(self, other: "PauliOperator") -> bool:
        return symplectic_product(self, other) == 0

    def negate(self) -> "PauliOperator":
        return PauliOperator(self.n, self.x, self.z, self.phase + 2)

    def unsigned(self) -> "PauliOperator":
        """The same letters with sign +1."""
        return PauliOperator(self.n, self.x, self.z, self.y_count)

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        return compose(self, other)


def compose(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    """Operator product ``a @ b``.

    Moving ``Z**z_a`` past ``X**x_b`` costs ``(-1)**(z_a . x_b)``, which is the
    only phase correction needed in this normal form.
    """
    if a.n != b.n:
        raise DimensionMismatch(f"{a.n}-qubit times {b.n}-qubit Pauli")
    return PauliOperator(
        a.n, a.x ^ b.x, a.z ^ b.z, a.phase + b.phase + 2 * parity(a.z & b.x)
    )


def symplectic_product(a: PauliOperator, b: PauliOperator) -> int:
    """0 if ``a`` and ``b`` commute, 1 if they anticommute."""
    if a.n != b.n:
        raise DimensionMismatch(f"{a.n}-qubit vs {b.n}-qubit Pauli")
    return parity(a.x & b.z) ^ parity(a.z & b.x)

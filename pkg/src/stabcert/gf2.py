"""Bit-packed linear algebra over GF(2).

Two representations are used side by side:

* ``BitVec`` / ``BitMatrix`` hold rows as Python integers (bit ``j`` of the
  integer is coordinate ``j``).  XOR and popcount on these are word-parallel
  and cheap for the sizes used here (``n`` up to about a thousand).
* Batch routines (``batch_rank``, ``sample_full_rank_batch``) work on numpy
  ``uint64`` arrays of shape ``(batch, rows, words)`` so that Monte-Carlo
  campaigns can reduce thousands of matrices per numpy call.

String forms list coordinate 0 first, so ``BitVec.from_str("10")`` is ``e_0``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import DimensionMismatch, SingularBasis, TooLarge

WORD = 64
MAX_ENUMERATE = 5


def parity(v: int) -> int:
    return v.bit_count() & 1


def n_words(n: int) -> int:
    return max(1, (n + WORD - 1) // WORD)


@dataclass(frozen=True)
class BitVec:
    n: int
    value: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("negative length")
        if self.value < 0 or self.value >> self.n:
            raise ValueError(f"value does not fit in {self.n} bits")

    @classmethod
    def zeros(cls, n: int) -> "BitVec":
        return cls(n, 0)

    @classmethod
    def unit(cls, n: int, i: int) -> "BitVec":
        return cls(n, 1 << i)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitVec":
        bits = [int(b) for b in bits]
        value = 0
        for i, b in enumerate(bits):
            if b not in (0, 1):
                raise ValueError(f"not a bit: {b!r}")
            value |= b << i
        return cls(len(bits), value)

    @classmethod
    def from_str(cls, s: str) -> "BitVec":
        return cls.from_bits(int(c) for c in s.strip())

    def __str__(self) -> str:
        return "".join(str((self.value >> i) & 1) for i in range(self.n))

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> int:
        if not -self.n <= i < self.n:
            raise IndexError(i)
        return (self.value >> (i % self.n)) & 1

    def _check(self, other: "BitVec"):
        if self.n != other.n:
            raise DimensionMismatch(f"lengths {self.n} and {other.n}")

    def __xor__(self, other: "BitVec") -> "BitVec":
        self._check(other)
        return BitVec(self.n, self.value ^ other.value)

    def __and__(self, other: "BitVec") -> "BitVec":
        self._check(other)
        return BitVec(self.n, self.value & other.value)

    def dot(self, other: "BitVec") -> int:
        self._check(other)
        return parity(self.value & other.value)

    def weight(self) -> int:
        return self.value.bit_count()

    def to_array(self) -> np.ndarray:
        return np.array([(self.value >> i) & 1 for i in range(self.n)], dtype=np.uint8)


@dataclass(frozen=True)
class BitMatrix:
    """Rows over GF(2); ``rows[i]`` is an integer of at most ``ncols`` bits."""

    rows: tuple
    ncols: int

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(int(r) for r in self.rows))
        for r in self.rows:
            if r < 0 or r >> self.ncols:
                raise ValueError(f"row does not fit in {self.ncols} columns")

    @classmethod
    def from_rows(cls, rows: Sequence, ncols: int | None = None) -> "BitMatrix":
        vecs = [BitVec.from_str(r) if isinstance(r, str) else r for r in rows]
        if ncols is None:
            if not vecs:
                raise ValueError("ncols required for an empty matrix")
            ncols = vecs[0].n
        for v in vecs:
            if v.n != ncols:
                raise DimensionMismatch("rows of unequal length")
        return cls(tuple(v.value for v in vecs), ncols)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(tuple(1 << i for i in range(n)), n)

    @classmethod
    def from_array(cls, a) -> "BitMatrix":
        a = np.asarray(a, dtype=np.uint8)
        return cls(tuple(BitVec.from_bits(row).value for row in a), a.shape[1])

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def row(self, i: int) -> BitVec:
        return BitVec(self.ncols, self.rows[i])

    def __iter__(self) -> Iterator[BitVec]:
        return (BitVec(self.ncols, r) for r in self.rows)

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.nrows, self.ncols), dtype=np.uint8)
        for i, r in enumerate(self.rows):
            for j in range(self.ncols):
                out[i, j] = (r >> j) & 1
        return out

    def __str__(self) -> str:
        return "\n".join(str(v) for v in self)


def rank(m: BitMatrix) -> int:
    pivots: dict[int, int] = {}
    for v in m.rows:
        while v:
            top = v.bit_length() - 1
            if top in pivots:
                v ^= pivots[top]
            else:
                pivots[top] = v
                break
    return len(pivots)


def _rref(rows: Sequence[int], width: int) -> tuple[list[int], list[int]]:
    """Gauss-Jordan on the low ``width`` bits; extra high bits ride along."""
    rows = list(rows)
    pivot_cols = []
    r = 0
    for col in range(width):
        bit = 1 << col
        sel = next((i for i in range(r, len(rows)) if rows[i] & bit), None)
        if sel is None:
            continue
        rows[r], rows[sel] = rows[sel], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i] & bit:
                rows[i] ^= rows[r]
        pivot_cols.append(col)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivot_cols


def row_basis(m: BitMatrix) -> BitMatrix:
    """Reduced row-echelon basis of the row space of ``m``."""
    reduced, _ = _rref(m.rows, m.ncols)
    return BitMatrix(tuple(reduced), m.ncols)


def solve_linear(a: BitMatrix, b: BitVec) -> BitVec | None:
    """Return some ``x`` with ``a @ x == b`` (free variables zero), or None."""
    if b.n != a.nrows:
        raise DimensionMismatch("right-hand side length must equal the row count")
    w = a.ncols
    aug = [row | (((b.value >> i) & 1) << w) for i, row in enumerate(a.rows)]
    reduced, pivots = _rref(aug, w)
    # an inconsistent row has no pivot left of the rhs bit, so gains one here
    if len(_rref(aug, w + 1)[0]) != len(reduced):
        return None
    x = 0
    for row, col in zip(reduced, pivots):
        if (row >> w) & 1:
            x |= 1 << col
    return BitVec(w, x)


def nullspace(a: BitMatrix) -> BitMatrix:
    """Canonical basis of ``{x : a @ x == 0}``, one vector per free column."""
    reduced, pivots = _rref(a.rows, a.ncols)
    pivot_set = set(pivots)
    basis = []
    for f in range(a.ncols):
        if f in pivot_set:
            continue
        x = 1 << f
        for row, col in zip(reduced, pivots):
            if (row >> f) & 1:
                x |= 1 << col
        basis.append(x)
    return BitMatrix(tuple(basis), a.ncols)


def solve_coordinates(basis: BitMatrix, v: BitVec) -> BitVec:
    """Coefficients ``c`` with ``XOR_{i : c_i = 1} basis.rows[i] == v``."""
    n = basis.nrows
    if basis.ncols != n or v.n != n:
        raise DimensionMismatch("basis must be square and match the vector")
    pivots: dict[int, tuple[int, int]] = {}
    for i, row in enumerate(basis.rows):
        vec, combo = row, 1 << i
        while vec:
            top = vec.bit_length() - 1
            if top not in pivots:
                pivots[top] = (vec, combo)
                break
            pv, pc = pivots[top]
            vec ^= pv
            combo ^= pc
        if not vec:
            raise SingularBasis(f"row {i} is dependent on earlier rows")
    target, coeffs = v.value, 0
    while target:
        pv, pc = pivots[target.bit_length() - 1]
        target ^= pv
        coeffs ^= pc
    return BitVec(n, coeffs)


def count_ordered_bases(n: int) -> int:
    out = 1
    for k in range(n):
        out *= 2**n - 2**k
    return out


def full_rank_probability(n: int) -> float:
    """Probability that ``n`` iid uniform vectors in GF(2)^n form a basis."""
    p = 1.0
    for k in range(1, n + 1):
        p *= 1.0 - 2.0**-k
    return p


def enumerate_bases(n: int) -> Iterator[BitMatrix]:
    """Yield every ordered basis of GF(2)^n exactly once (n <= 5)."""
    if n > MAX_ENUMERATE:
        raise TooLarge(f"enumerate_bases is limited to n <= {MAX_ENUMERATE}, got {n}")
    if n < 1:
        raise ValueError("n must be positive")
    vectors = range(1, 2**n)

    def extend(chosen: list[int], span: set[int]):
        if len(chosen) == n:
            yield BitMatrix(tuple(chosen), n)
            return
        for v in vectors:
            if v in span:
                continue
            chosen.append(v)
            yield from extend(chosen, span | {s ^ v for s in span})
            chosen.pop()

    yield from extend([], {0})


# ---------------------------------------------------------------- batch layer


def ints_to_words(values: Sequence[int], n: int) -> np.ndarray:
    w = n_words(n)
    out = np.zeros((len(values), w), dtype=np.uint64)
    mask = (1 << WORD) - 1
    for i, v in enumerate(values):
        for k in range(w):
            out[i, k] = (v >> (WORD * k)) & mask
    return out


def words_to_ints(words: np.ndarray) -> list[int]:
    words = np.asarray(words, dtype=np.uint64)
    flat = words.reshape(-1, words.shape[-1])
    out = []
    for row in flat:
        v = 0
        for k, x in enumerate(row):
            v |= int(x) << (WORD * k)
        out.append(v)
    return out


def unpack_bits(words: np.ndarray, n: int) -> np.ndarray:
    """``(..., w)`` uint64 words to ``(..., n)`` uint8 bits, bit 0 first."""
    words = np.ascontiguousarray(words, dtype="<u8")
    as_bytes = words.view(np.uint8).reshape(words.shape[:-1] + (-1,))
    return np.unpackbits(as_bytes, axis=-1, bitorder="little")[..., :n]


def pack_bits(bits: np.ndarray) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.uint8)
    n = bits.shape[-1]
    w = n_words(n)
    padded = np.zeros(bits.shape[:-1] + (w * WORD,), dtype=np.uint8)
    padded[..., :n] = bits
    packed = np.packbits(padded, axis=-1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64)


def random_words(rng: np.random.Generator, shape: tuple, n: int) -> np.ndarray:
    """Uniform ``n``-bit rows packed into words, array shape ``shape + (w,)``."""
    w = n_words(n)
    out = rng.integers(0, 2**WORD, size=tuple(shape) + (w,), dtype=np.uint64)
    spare = w * WORD - n
    if spare:
        out[..., -1] &= np.uint64((1 << (WORD - spare)) - 1)
    return out


def batch_rank(words: np.ndarray, ncols: int) -> np.ndarray:
    """GF(2) rank of each matrix in a ``(batch, rows, w)`` word array."""
    m = np.array(words, dtype=np.uint64, copy=True)
    batch, nrows, _ = m.shape
    used = np.zeros((batch, nrows), dtype=bool)
    ranks = np.zeros(batch, dtype=np.int64)
    everything = np.arange(batch)
    for col in range(ncols):
        wi, sh = divmod(col, WORD)
        bit = ((m[:, :, wi] >> np.uint64(sh)) & np.uint64(1)).astype(bool)
        cand = bit & ~used
        has = cand.any(axis=1)
        if not has.any():
            continue
        piv = cand.argmax(axis=1)
        prow = m[everything, piv]
        hit = bit & has[:, None]
        hit[everything, piv] = False
        # all-ones word where a row must absorb the pivot row
        mask = np.negative(hit.astype(np.uint64))
        m ^= mask[:, :, None] & prow[:, None, :]
        used[everything[has], piv[has]] = True
        ranks += has
    return ranks


def sample_full_rank_batch(
    n: int, count: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``count`` uniformly random invertible ``n x n`` matrices.

    Each matrix is produced by drawing all ``n`` rows iid uniform and starting
    over from scratch until the rows are independent.  Returns the packed rows,
    shape ``(count, n, w)``, and the number of rounds each matrix needed.
    """
    if n < 1:
        raise ValueError("n must be positive")
    out = np.zeros((count, n, n_words(n)), dtype=np.uint64)
    rounds = np.zeros(count, dtype=np.int64)
    pending = np.arange(count)
    while pending.size:
        draw = random_words(rng, (pending.size, n), n)
        rounds[pending] += 1
        ok = batch_rank(draw, n) == n
        out[pending[ok]] = draw[ok]
        pending = pending[~ok]
    return out, rounds


def sample_full_rank(n: int, rng: np.random.Generator) -> tuple[BitMatrix, int]:
    words, rounds = sample_full_rank_batch(n, 1, rng)
    return BitMatrix(tuple(words_to_ints(words[0])), n), int(rounds[0])


def span(rows: Iterable[int]) -> set[int]:
    out = {0}
    for r in rows:
        out |= {s ^ r for s in out}
    return out


__all__ = [
    "BitVec",
    "BitMatrix",
    "rank",
    "solve_coordinates",
    "solve_linear",
    "nullspace",
    "row_basis",
    "sample_full_rank",
    "sample_full_rank_batch",
    "batch_rank",
    "enumerate_bases",
    "count_ordered_bases",
    "full_rank_probability",
    "parity",
    "span",
]

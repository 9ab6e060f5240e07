"""Bit vectors and matrices over GF(2), packed into Python ints.

Positions are 1-based in the public interface. Internally position ``i`` of a
word is bit ``i - 1`` of its integer value (least significant bit first).
Serialization to bytes is always most-significant-bit first, position 1 in the
top bit of the first byte.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Optional, Sequence


def _parity(x: int) -> int:
    return x.bit_count() & 1


@dataclass(frozen=True)
class BitWord:
    """An immutable word of ``length`` bits."""

    length: int
    value: int = 0

    def __post_init__(self):
        if self.length < 0:
            raise ValueError("length must be non-negative")
        if self.value < 0 or self.value >> self.length:
            raise ValueError(f"value does not fit in {self.length} bits")

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitWord":
        value = 0
        n = 0
        for i, b in enumerate(bits):
            if b not in (0, 1):
                raise ValueError(f"bit {i + 1} is {b!r}, expected 0 or 1")
            value |= b << i
            n += 1
        return cls(n, value)

    @classmethod
    def from_str(cls, s: str) -> "BitWord":
        return cls.from_bits(int(ch) for ch in s.strip())

    @classmethod
    def zeros(cls, n: int) -> "BitWord":
        return cls(n, 0)

    @classmethod
    def ones(cls, n: int) -> "BitWord":
        return cls(n, (1 << n) - 1)

    @classmethod
    def unit(cls, n: int, i: int) -> "BitWord":
        """The word with a single one at position ``i``."""
        if not 1 <= i <= n:
            raise IndexError(f"position {i} outside 1..{n}")
        return cls(n, 1 << (i - 1))

    @classmethod
    def from_positions(cls, n: int, positions: Iterable[int]) -> "BitWord":
        value = 0
        for i in positions:
            if not 1 <= i <= n:
                raise IndexError(f"position {i} outside 1..{n}")
            value |= 1 << (i - 1)
        return cls(n, value)

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, i: int) -> int:
        if not 1 <= i <= self.length:
            raise IndexError(f"position {i} outside 1..{self.length}")
        return (self.value >> (i - 1)) & 1

    def __iter__(self) -> Iterator[int]:
        v = self.value
        for _ in range(self.length):
            yield v & 1
            v >>= 1

    def __xor__(self, other: "BitWord") -> "BitWord":
        return xor(self, other)

    def bits(self) -> list[int]:
        return list(self)

    def positions(self) -> frozenset[int]:
        """1-based positions holding a one."""
        return frozenset(i + 1 for i, b in enumerate(self) if b)

    def flip(self, i: int) -> "BitWord":
        return self ^ BitWord.unit(self.length, i)

    def complement(self) -> "BitWord":
        return BitWord(self.length, self.value ^ ((1 << self.length) - 1))

    def concat(self, other: "BitWord") -> "BitWord":
        return BitWord(self.length + other.length, self.value | (other.value << self.length))

    def to_bytes(self) -> bytes:
        """MSB-first packing, zero padded to a byte boundary."""
        nbytes = (self.length + 7) // 8
        out = 0
        for b in self:
            out = (out << 1) | b
        out <<= nbytes * 8 - self.length
        return out.to_bytes(nbytes, "big")

    @classmethod
    def from_bytes(cls, data: bytes, length: int) -> "BitWord":
        nbytes = (length + 7) // 8
        if len(data) != nbytes:
            raise ValueError(f"expected {nbytes} bytes for {length} bits, got {len(data)}")
        raw = int.from_bytes(data, "big")
        pad = nbytes * 8 - length
        if raw & ((1 << pad) - 1):
            raise ValueError("nonzero padding bits")
        raw >>= pad
        value = 0
        for i in range(length):
            value |= ((raw >> (length - 1 - i)) & 1) << i
        return cls(length, value)

    def __str__(self) -> str:
        return "".join(str(b) for b in self)


@dataclass(frozen=True)
class BitMatrix:
    """A ``nrows x ncols`` matrix stored as a tuple of packed row words.

    A matrix with zero rows is allowed; it shows up as the parity-check
    matrix of codes with no redundancy.
    """

    nrows: int
    ncols: int
    row_values: tuple[int, ...]

    def __post_init__(self):
        if self.nrows < 0 or self.ncols < 0:
            raise ValueError("dimensions must be non-negative")
        if len(self.row_values) != self.nrows:
            raise ValueError(f"expected {self.nrows} rows, got {len(self.row_values)}")
        for r in self.row_values:
            if r < 0 or r >> self.ncols:
                raise ValueError(f"row value does not fit in {self.ncols} columns")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], ncols: Optional[int] = None) -> "BitMatrix":
        words = [BitWord.from_bits(r) for r in rows]
        if ncols is None:
            if not words:
                raise ValueError("ncols required for an empty matrix")
            ncols = words[0].length
        if any(w.length != ncols for w in words):
            raise ValueError("ragged rows")
        return cls(len(words), ncols, tuple(w.value for w in words))

    @classmethod
    def from_columns(cls, columns: Sequence[int], nrows: int) -> "BitMatrix":
        """Build from packed column values (bit ``i - 1`` is row ``i``)."""
        rows = [0] * nrows
        for j, c in enumerate(columns):
            if c < 0 or c >> nrows:
                raise ValueError(f"column {j + 1} does not fit in {nrows} rows")
            for i in range(nrows):
                if (c >> i) & 1:
                    rows[i] |= 1 << j
        return cls(nrows, len(columns), tuple(rows))

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, tuple(1 << i for i in range(n)))

    def row(self, i: int) -> BitWord:
        if not 1 <= i <= self.nrows:
            raise IndexError(f"row {i} outside 1..{self.nrows}")
        return BitWord(self.ncols, self.row_values[i - 1])

    def col(self, j: int) -> BitWord:
        return BitWord(self.nrows, self.column_value(j))

    def column_value(self, j: int) -> int:
        if not 1 <= j <= self.ncols:
            raise IndexError(f"column {j} outside 1..{self.ncols}")
        v = 0
        for i, r in enumerate(self.row_values):
            v |= ((r >> (j - 1)) & 1) << i
        return v

    def column_values(self) -> list[int]:
        return [self.column_value(j) for j in range(1, self.ncols + 1)]

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.row(i)[j]

    def rows(self) -> list[BitWord]:
        return [self.row(i) for i in range(1, self.nrows + 1)]

    def to_lists(self) -> list[list[int]]:
        return [r.bits() for r in self.rows()]

    def transpose(self) -> "BitMatrix":
        return BitMatrix(self.ncols, self.nrows, tuple(self.column_values()))

    def rank(self) -> int:
        return rank(self.row_values)


def xor(a: BitWord, b: BitWord) -> BitWord:
    if a.length != b.length:
        raise ValueError(f"length mismatch: {a.length} vs {b.length}")
    return BitWord(a.length, a.value ^ b.value)


def vec_mat_mul(w: BitWord, m: BitMatrix) -> BitWord:
    """Return ``w m^T``: bit ``i`` is the inner product of ``w`` with row ``i``."""
    if w.length != m.ncols:
        raise ValueError(f"word length {w.length} does not match {m.ncols} columns")
    out = 0
    for i, r in enumerate(m.row_values):
        out |= _parity(w.value & r) << i
    return BitWord(m.nrows, out)


def weight(w: BitWord) -> int:
    return w.value.bit_count()


def hamming_distance(a: BitWord, b: BitWord) -> int:
    return weight(xor(a, b))


def enumerate_weight_at_most(n: int, wmax: int) -> Iterator[BitWord]:
    """Every length-``n`` word of weight at most ``wmax``, each exactly once.

    Order is by weight, then by the lexicographic order of the sorted tuple of
    one positions (the order of ``itertools.combinations``).
    """
    if not 0 <= wmax <= n:
        raise ValueError(f"need 0 <= wmax <= n, got wmax={wmax}, n={n}")
    for w in range(wmax + 1):
        for support in combinations(range(n), w):
            value = 0
            for p in support:
                value |= 1 << p
            yield BitWord(n, value)


def rank(row_values: Iterable[int]) -> int:
    """Rank over GF(2) of packed rows."""
    basis: list[int] = []
    for r in row_values:
        for b in basis:
            r = min(r, r ^ b)
        if r:
            basis.append(r)
    return len(basis)


def solve_left(m: BitMatrix, target: BitWord) -> Optional[BitWord]:
    """Find ``x`` with ``vec_mat_mul(x, m) == target``, or ``None``.

    Gauss-Jordan elimination on the augmented system whose equations are the
    rows of ``m``.
    """
    if target.length != m.nrows:
        raise ValueError(f"target length {target.length} does not match {m.nrows} rows")
    n = m.ncols
    eqs = [r | (target[i + 1] << n) for i, r in enumerate(m.row_values)]
    pivots: list[int] = []
    row = 0
    for col in range(n):
        bit = 1 << col
        pivot = next((k for k in range(row, len(eqs)) if eqs[k] & bit), None)
        if pivot is None:
            continue
        eqs[row], eqs[pivot] = eqs[pivot], eqs[row]
        for k in range(len(eqs)):
            if k != row and eqs[k] & bit:
                eqs[k] ^= eqs[row]
        pivots.append(col)
        row += 1
    mask = (1 << n) - 1
    for k in range(row, len(eqs)):
        if eqs[k] >> n:
            return None
        assert eqs[k] & mask == 0
    x = 0
    for k, col in enumerate(pivots):
        x |= (eqs[k] >> n) << col
    return BitWord(n, x)


def nullspace(m: BitMatrix) -> list[BitWord]:
    """Basis of ``{x : vec_mat_mul(x, m) == 0}``."""
    n = m.ncols
    eqs = list(m.row_values)
    pivots: list[int] = []
    row = 0
    for col in range(n):
        bit = 1 << col
        pivot = next((k for k in range(row, len(eqs)) if eqs[k] & bit), None)
        if pivot is None:
            continue
        eqs[row], eqs[pivot] = eqs[pivot], eqs[row]
        for k in range(len(eqs)):
            if k != row and eqs[k] & bit:
                eqs[k] ^= eqs[row]
        pivots.append(col)
        row += 1
    pivot_set = set(pivots)
    basis = []
    for free in range(n):
        if free in pivot_set:
            continue
        x = 1 << free
        for k, col in enumerate(pivots):
            if (eqs[k] >> free) & 1:
                x |= 1 << col
        basis.append(BitWord(n, x))
    return basis

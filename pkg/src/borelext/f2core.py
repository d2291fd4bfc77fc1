"""Dense linear algebra over GF(2).

Vectors and matrix rows are packed into Python integers: bit ``j`` of a row is
column ``j``.  Everything here is immutable; operations return new objects.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence


class DimensionError(ValueError):
    """Raised when operand shapes do not compose."""


@dataclass(frozen=True)
class BitVector:
    length: int
    payload: int = 0

    def __post_init__(self):
        if self.length < 0:
            raise DimensionError("negative length")
        if self.payload >> self.length:
            raise ValueError("bits set beyond vector length")

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "BitVector":
        payload = 0
        for j, b in enumerate(bits):
            if b & 1:
                payload |= 1 << j
        return cls(len(bits), payload)

    @classmethod
    def unit(cls, length: int, j: int) -> "BitVector":
        return cls(length, 1 << j)

    def __getitem__(self, j: int) -> int:
        if not 0 <= j < self.length:
            raise IndexError(j)
        return (self.payload >> j) & 1

    def __len__(self) -> int:
        return self.length

    def __add__(self, other: "BitVector") -> "BitVector":
        if other.length != self.length:
            raise DimensionError("length mismatch")
        return BitVector(self.length, self.payload ^ other.payload)

    def to_list(self) -> list[int]:
        return [(self.payload >> j) & 1 for j in range(self.length)]

    def is_zero(self) -> bool:
        return self.payload == 0

    def support(self) -> list[int]:
        return ones(self.payload)


@dataclass(frozen=True)
class BitMatrix:
    rows: int
    cols: int
    data: tuple[int, ...] = ()

    def __post_init__(self):
        if len(self.data) != self.rows:
            raise DimensionError(f"expected {self.rows} rows, got {len(self.data)}")
        for r in self.data:
            if r >> self.cols:
                raise ValueError("row has bits beyond the column count")

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, (0,) * rows)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def from_lists(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "BitMatrix":
        if cols is None:
            cols = len(rows[0]) if rows else 0
        data = []
        for r in rows:
            if len(r) != cols:
                raise DimensionError("ragged rows")
            data.append(BitVector.from_bits(r).payload)
        return cls(len(rows), cols, tuple(data))

    @classmethod
    def from_columns(cls, rows: int, columns: Sequence[int]) -> "BitMatrix":
        """Build from packed columns (bit ``i`` of ``columns[j]`` is entry (i, j))."""
        return cls(len(columns), rows, tuple(columns)).transpose()

    def to_lists(self) -> list[list[int]]:
        return [[(r >> j) & 1 for j in range(self.cols)] for r in self.data]

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return (self.data[i] >> j) & 1

    def row(self, i: int) -> BitVector:
        return BitVector(self.cols, self.data[i])

    def transpose(self) -> "BitMatrix":
        out = [0] * self.cols
        for i, r in enumerate(self.data):
            bit = 1 << i
            while r:
                low = r & -r
                out[low.bit_length() - 1] |= bit
                r ^= low
        return BitMatrix(self.cols, self.rows, tuple(out))

    def columns(self) -> list[int]:
        return list(self.transpose().data)

    def apply(self, v: BitVector) -> BitVector:
        """Matrix-vector product ``self @ v``."""
        if v.length != self.cols:
            raise DimensionError(f"vector of length {v.length} against {self.cols} columns")
        out = 0
        for i, r in enumerate(self.data):
            if parity(r & v.payload):
                out |= 1 << i
        return BitVector(self.rows, out)

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        if self.cols != other.rows:
            raise DimensionError(f"cannot compose {self.rows}x{self.cols} with {other.rows}x{other.cols}")
        out = []
        for r in self.data:
            acc = 0
            while r:
                low = r & -r
                acc ^= other.data[low.bit_length() - 1]
                r ^= low
            out.append(acc)
        return BitMatrix(self.rows, other.cols, tuple(out))

    def rank(self) -> int:
        return len(rref(self)[0])

    def is_zero(self) -> bool:
        return not any(self.data)


def parity(x: int) -> int:
    return bin(x).count("1") & 1


def ones(x: int) -> list[int]:
    """Indices of set bits, ascending."""
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length() - 1)
        x ^= low
    return out


def rref(m: BitMatrix) -> tuple[list[int], BitMatrix]:
    rows = list(m.data)
    pivots: list[int] = []
    r = 0
    for c in range(m.cols):
        bit = 1 << c
        hit = next((i for i in range(r, len(rows)) if rows[i] & bit), None)
        if hit is None:
            continue
        rows[r], rows[hit] = rows[hit], rows[r]
        pr = rows[r]
        for i in range(len(rows)):
            if i != r and rows[i] & bit:
                rows[i] ^= pr
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return pivots, BitMatrix(m.rows, m.cols, tuple(rows))


def kernel_basis(m: BitMatrix) -> list[BitVector]:
    """Basis of ``{v : m v = 0}``, one vector per free column of the rref."""
    pivots, red = rref(m)
    pivot_set = set(pivots)
    out = []
    for f in range(m.cols):
        if f in pivot_set:
            continue
        v = 1 << f
        for i, p in enumerate(pivots):
            if (red.data[i] >> f) & 1:
                v |= 1 << p
        out.append(BitVector(m.cols, v))
    return out


def solve(m: BitMatrix, v: BitVector) -> Optional[BitVector]:
    """Canonical solution of ``m x = v`` (free coordinates zero), or None."""
    if v.length != m.rows:
        raise DimensionError(f"right-hand side of length {v.length} for {m.rows} rows")
    # Augment each row with its right-hand-side bit in column m.cols.
    aug = BitMatrix(m.rows, m.cols + 1,
                    tuple(r | (((v.payload >> i) & 1) << m.cols) for i, r in enumerate(m.data)))
    pivots, red = rref(aug)
    if pivots and pivots[-1] == m.cols:
        return None
    x = 0
    for i, p in enumerate(pivots):
        if (red.data[i] >> m.cols) & 1:
            x |= 1 << p
    return BitVector(m.cols, x)


def image_basis(m: BitMatrix) -> list[BitVector]:
    """Reduced basis of the column space of ``m``."""
    _, red = rref(m.transpose())
    return [BitVector(m.rows, r) for r in red.data if r]


def eventual_image(tower: Sequence[BitMatrix]) -> tuple[list[BitVector], bool]:
    """Image of the full composite ``f0 f1 ... f_{K-1}`` in ``V0``.

    ``tower[k]`` maps ``V_{k+1} -> V_k``.  The flag reports whether dropping the
    last stage leaves the image unchanged.
    """
    if not tower:
        raise DimensionError("empty tower")
    for k in range(len(tower) - 1):
        if tower[k].cols != tower[k + 1].rows:
            raise DimensionError(f"stage {k} and {k + 1} do not compose")
    composite = BitMatrix.identity(tower[0].rows)
    previous = composite
    for f in tower:
        previous = composite
        composite = composite @ f
    img = image_basis(composite)
    stabilized = len(img) == len(image_basis(previous))
    return img, stabilized


class Echelon:
    """Incremental echelon form keyed by leading (highest) bit.

    Each stored row carries a tag recording which inserted vectors it is a sum
    of, so membership tests can also return a preimage.  This is the hot path of
    the resolver and is intentionally bare.
    """

    __slots__ = ("pivots", "count")

    def __init__(self):
        self.pivots: dict[int, tuple[int, int]] = {}
        self.count = 0

    def __len__(self) -> int:
        return len(self.pivots)

    def reduce(self, v: int) -> tuple[int, int]:
        """Clear leading bits of ``v`` that hit pivots; returns (remainder, tag)."""
        tag = 0
        pivots = self.pivots
        while v:
            hit = pivots.get(v.bit_length() - 1)
            if hit is None:
                break
            v ^= hit[0]
            tag ^= hit[1]
        return v, tag

    def add(self, v: int, tag: Optional[int] = None) -> int:
        """Insert ``v``; returns the reduced remainder (0 if dependent)."""
        if tag is None:
            tag = 1 << self.count
        self.count += 1
        rem, rtag = self.reduce(v)
        if rem:
            self.pivots[rem.bit_length() - 1] = (rem, tag ^ rtag)
        return rem

    def contains(self, v: int) -> bool:
        return self.reduce(v)[0] == 0

    def preimage(self, v: int) -> Optional[int]:
        rem, tag = self.reduce(v)
        return None if rem else tag


def left_kernel(rows: Sequence[int]) -> list[int]:
    """Basis of ``{c : sum_i c_i rows[i] = 0}`` as packed coefficient vectors."""
    ech = Echelon()
    out = []
    for i, r in enumerate(rows):
        rem, tag = ech.reduce(r)
        if rem:
            ech.pivots[rem.bit_length() - 1] = (rem, tag ^ (1 << i))
        else:
            out.append(tag ^ (1 << i))
    return out


def span_rank(vectors: Iterable[int]) -> int:
    ech = Echelon()
    for v in vectors:
        ech.add(v, 0)
    return len(ech)

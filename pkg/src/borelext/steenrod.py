"""The mod 2 Steenrod algebra in the Milnor basis, with an Adem-relation oracle.

Milnor basis elements are tuples ``(r1, ..., rk)`` with trailing zeros
stripped; ``()`` is the unit.  Sums are frozensets of such tuples.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterator

import numpy as np

from ._milnor_fast import pack, product_indices
from .f2core import BitMatrix, BitVector, solve

MilnorSq = tuple[int, ...]
AdmissibleSq = tuple[int, ...]
Sum = frozenset


def milnor_degree(r: MilnorSq) -> int:
    return sum(ri * ((1 << (i + 1)) - 1) for i, ri in enumerate(r))


def _strip(seq) -> tuple[int, ...]:
    seq = list(seq)
    while seq and seq[-1] == 0:
        seq.pop()
    return tuple(seq)


@lru_cache(maxsize=None)
def milnor_basis(d: int) -> tuple[MilnorSq, ...]:
    """All Milnor basis elements of degree ``d``, in descending lexicographic order."""
    if d < 0:
        raise ValueError("negative degree")
    if d == 0:
        return ((),)
    top = 1
    while (1 << (top + 1)) - 1 <= d:
        top += 1
    out = []

    def rec(i: int, remaining: int, tail: list[int]):
        # fill exponents from the highest index down, then reverse
        if i == 0:
            if remaining == 0:
                out.append(_strip(reversed(tail)))
            return
        w = (1 << i) - 1
        for ri in range(remaining // w + 1):
            tail.append(ri)
            rec(i - 1, remaining - ri * w, tail)
            tail.pop()

    rec(top, d, [])
    out.sort(reverse=True)
    return tuple(out)


@lru_cache(maxsize=None)
def milnor_index(d: int) -> dict[MilnorSq, int]:
    return {r: i for i, r in enumerate(milnor_basis(d))}


@lru_cache(maxsize=None)
def milnor_product(a: MilnorSq, b: MilnorSq) -> Sum:
    """Product of two Milnor basis elements, summed over Milnor matrices.

    Rows ``i >= 1`` of the matrix partition ``a[i-1] = sum_j 2^j x[i][j]``;
    columns ``j >= 1`` partition ``b[j-1] = sum_i x[i][j]``.  A matrix contributes
    when the entries on each anti-diagonal have pairwise disjoint binary digits.
    """
    if not a:
        return frozenset([b])
    if not b:
        return frozenset([a])
    rows = len(a)
    cols = len(b)
    n_diag = rows + cols + 1
    diag = [0] * n_diag
    col_left = list(b)
    result: set[MilnorSq] = set()

    def row(i: int, j: int, left: int):
        # choose x[i][j] for j = cols..1, then x[i][0] = left
        if j == 0:
            n = i
            if diag[n] & left:
                return
            diag[n] |= left
            if i == rows:
                finish()
            else:
                row(i + 1, cols, a[i])
            diag[n] ^= left
            return
        w = 1 << j
        n = i + j
        dn = diag[n]
        cap = min(left >> j, col_left[j - 1])
        for v in range(cap + 1):
            if dn & v:
                continue
            diag[n] = dn | v
            col_left[j - 1] -= v
            row(i, j - 1, left - v * w)
            col_left[j - 1] += v
        diag[n] = dn

    def finish():
        for j in range(cols):
            if diag[j + 1] & col_left[j]:
                return
        t = [diag[n] | (col_left[n - 1] if n <= cols else 0) for n in range(1, n_diag)]
        key = _strip(t)
        if key in result:
            result.remove(key)
        else:
            result.add(key)

    row(1, cols, a[0])
    return frozenset(result)


def multiply_sums(x: Sum, y: Sum) -> Sum:
    acc: set = set()
    for a in x:
        for b in y:
            acc ^= milnor_product(a, b)
    return frozenset(acc)


# --- admissible basis and the Adem oracle -------------------------------------------------

def is_admissible(word: AdmissibleSq) -> bool:
    return all(a >= 1 for a in word) and all(word[i] >= 2 * word[i + 1] for i in range(len(word) - 1))


@lru_cache(maxsize=None)
def admissible_basis(d: int) -> tuple[AdmissibleSq, ...]:
    """Admissible words of degree ``d``, descending lexicographic."""
    out: list[AdmissibleSq] = []

    def rec(remaining: int, last: int, word: list[int]):
        if remaining == 0:
            out.append(tuple(word))
            return
        # next letter a must satisfy last >= 2a, a <= remaining
        hi = remaining if last is None else min(remaining, last // 2)
        for a in range(1, hi + 1):
            word.append(a)
            rec(remaining - a, a, word)
            word.pop()

    rec(d, None, [])
    out.sort(reverse=True)
    return tuple(out)


def _binom2(n: int, k: int) -> int:
    if k < 0 or n < 0 or k > n:
        return 0
    return 1 if (k & (n - k)) == 0 else 0


@lru_cache(maxsize=None)
def adem_reduce(word: tuple[int, ...]) -> Sum:
    """Rewrite a word in the Sq^i to a sum of admissible words."""
    word = tuple(a for a in word if a != 0)
    for i in range(len(word) - 1):
        a, b = word[i], word[i + 1]
        if a < 2 * b:
            acc: set = set()
            for j in range(a // 2 + 1):
                if _binom2(b - 1 - j, a - 2 * j):
                    new = word[:i] + (a + b - j, j) + word[i + 2:]
                    acc ^= adem_reduce(new)
            return frozenset(acc)
    return frozenset([word])


def adem_product(u: AdmissibleSq, v: AdmissibleSq) -> Sum:
    return adem_reduce(tuple(u) + tuple(v))


class BasisBridge:
    """Change of basis between admissible words and Milnor elements in one degree."""

    def __init__(self, d: int):
        self.degree = d
        self.milnor = milnor_basis(d)
        self.admissible = admissible_basis(d)
        if len(self.milnor) != len(self.admissible):
            raise AssertionError(f"basis sizes differ in degree {d}")
        index = milnor_index(d)
        cols = []
        for word in self.admissible:
            acc: Sum = frozenset([()])
            for a in word:
                acc = multiply_sums(acc, frozenset([(a,)]))
            v = 0
            for m in acc:
                v |= 1 << index[m]
            cols.append(v)
        n = len(self.milnor)
        # column j: admissible word j in Milnor coordinates
        self.to_milnor = BitMatrix.from_columns(n, cols)
        inv_cols = []
        for i in range(n):
            x = solve(self.to_milnor, BitVector.unit(n, i))
            if x is None:
                raise AssertionError(f"singular basis change in degree {d}")
            inv_cols.append(x.payload)
        # column i: Milnor element i in admissible coordinates
        self.to_admissible = BitMatrix.from_columns(n, inv_cols)

    def milnor_as_admissible(self, r: MilnorSq) -> list[AdmissibleSq]:
        i = milnor_index(self.degree)[r]
        col = self.to_admissible.transpose().data[i]
        return [self.admissible[j] for j in range(len(self.admissible)) if (col >> j) & 1]

    def admissible_as_milnor(self, word: AdmissibleSq) -> list[MilnorSq]:
        j = self.admissible.index(tuple(word))
        col = self.to_milnor.transpose().data[j]
        return [self.milnor[i] for i in range(len(self.milnor)) if (col >> i) & 1]


@lru_cache(maxsize=None)
def basis_bridge(d: int) -> BasisBridge:
    return BasisBridge(d)


@lru_cache(maxsize=None)
def _packed_index(d: int) -> tuple[np.ndarray, np.ndarray]:
    """Sorted packed keys of the degree-``d`` basis and their basis positions."""
    keys = np.array([pack(r) for r in milnor_basis(d)], np.int64)
    order = np.argsort(keys)
    return keys[order], order.astype(np.int64)


class AlgebraTable:
    """Milnor-basis products as bit masks, capped at ``max_degree``.

    ``product(d1, i, d2, j)`` returns the product of basis element ``i`` of
    degree ``d1`` with basis element ``j`` of degree ``d2`` as a mask over
    ``milnor_basis(d1 + d2)``.
    """

    def __init__(self, max_degree: int):
        self.max_degree = max_degree
        self._products: dict[tuple[int, int, int, int], int] = {}
        self._dims = [len(milnor_basis(d)) for d in range(max_degree + 1)]

    def dim(self, d: int) -> int:
        if d < 0:
            return 0
        self._check(d)
        return self._dims[d]

    def basis(self, d: int) -> tuple[MilnorSq, ...]:
        self._check(d)
        return milnor_basis(d)

    def _check(self, d: int):
        if d > self.max_degree:
            raise ValueError(f"degree {d} exceeds the algebra table cap {self.max_degree}")

    def product(self, d1: int, i: int, d2: int, j: int) -> int:
        key = (d1, i, d2, j)
        got = self._products.get(key)
        if got is not None:
            return got
        self._check(d1 + d2)
        a = milnor_basis(d1)[i]
        b = milnor_basis(d2)[j]
        if not a or not b:
            mask = 1 << milnor_index(d1 + d2)[b if not a else a]
        else:
            keys, positions = _packed_index(d1 + d2)
            mask = 0
            for k in product_indices(np.array(a, np.int64), np.array(b, np.int64),
                                     keys, positions).tolist():
                mask |= 1 << k
        self._products[key] = mask
        return mask

    def act(self, d1: int, i: int, d2: int, mask: int) -> int:
        """Basis element ``i`` of degree ``d1`` times a masked sum in degree ``d2``."""
        out = 0
        j = 0
        while mask:
            if mask & 1:
                out ^= self.product(d1, i, d2, j)
            mask >>= 1
            j += 1
        return out


def format_milnor(r: MilnorSq) -> str:
    if not r:
        return "1"
    return "Sq(" + ",".join(map(str, r)) + ")"


def iter_degree_pairs(total: int) -> Iterator[tuple[int, int]]:
    for d1 in range(total + 1):
        for d2 in range(total - d1 + 1):
            yield d1, d2

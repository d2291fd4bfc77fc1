import pytest
from hypothesis import given, strategies as st

from borelext.f2core import (BitMatrix, BitVector, DimensionError, eventual_image,
                             image_basis, kernel_basis, rref, solve)


def M(rows, cols=None):
    return BitMatrix.from_lists(rows, cols)


@st.composite
def matrices(draw, max_dim=64):
    r = draw(st.integers(0, max_dim))
    c = draw(st.integers(0, max_dim))
    rows = [draw(st.integers(0, (1 << c) - 1)) if c else 0 for _ in range(r)]
    return BitMatrix.from_lists([[(x >> j) & 1 for j in range(c)] for x in rows], c)


def test_rref_examples():
    assert rref(BitMatrix.identity(2)) == ([0, 1], BitMatrix.identity(2))
    piv, red = rref(BitMatrix.zeros(3, 4))
    assert piv == [] and red.is_zero()
    piv, red = rref(M([[1, 1], [1, 1]]))
    assert piv == [0] and red.to_lists() == [[1, 1], [0, 0]]


def test_kernel_examples():
    assert kernel_basis(BitMatrix.identity(5)) == []
    assert [v.to_list() for v in kernel_basis(M([[1, 1]]))] == [[1, 1]]
    assert [v.to_list() for v in kernel_basis(BitMatrix.zeros(2, 3))] == [
        [1, 0, 0], [0, 1, 0], [0, 0, 1]]


def test_solve_examples():
    assert solve(BitMatrix.identity(2), BitVector.from_bits([1, 0])).to_list() == [1, 0]
    assert solve(M([[1, 1]]), BitVector.from_bits([1])).to_list() == [1, 0]
    assert solve(M([[0], [0]]), BitVector.from_bits([1, 0])) is None
    with pytest.raises(DimensionError):
        solve(BitMatrix.identity(2), BitVector.from_bits([1, 0, 0]))


def test_eventual_image_examples():
    basis, ok = eventual_image([BitMatrix.identity(3)] * 3)
    assert ok and len(basis) == 3
    basis, ok = eventual_image([BitMatrix.zeros(1, 1), BitMatrix.identity(1)])
    assert ok and basis == []
    p = M([[1, 0], [0, 0]])
    basis, ok = eventual_image([p, p])
    assert ok and [v.to_list() for v in basis] == [[1, 0]]


def test_bitvector_padding_rejected():
    with pytest.raises(ValueError):
        BitVector(2, 0b100)


@given(matrices())
def test_rank_nullity(m):
    piv, _ = rref(m)
    assert m.rank() == len(piv)
    assert len(piv) + len(kernel_basis(m)) == m.cols
    assert len(piv) == len(image_basis(m))
    for v in kernel_basis(m):
        assert m.apply(v).is_zero()


@given(matrices(), st.data())
def test_solve_roundtrip(m, data):
    x = BitVector(m.cols, data.draw(st.integers(0, (1 << m.cols) - 1)) if m.cols else 0)
    v = m.apply(x)
    y = solve(m, v)
    assert y is not None and m.apply(y) == v


@given(st.integers(1, 4), st.data())
def test_eventual_image_shrinks(stages, data):
    n = data.draw(st.integers(1, 6))
    dims = [n] + [data.draw(st.integers(1, 6)) for _ in range(stages)]
    tower = [BitMatrix.from_lists([[data.draw(st.integers(0, 1)) for _ in range(dims[k + 1])]
                                   for _ in range(dims[k])], dims[k + 1])
             for k in range(stages)]
    extra = BitMatrix.from_lists([[data.draw(st.integers(0, 1)) for _ in range(3)]
                                  for _ in range(dims[-1])], 3)
    short, _ = eventual_image(tower)
    longer, _ = eventual_image(tower + [extra])
    span = BitMatrix.from_columns(n, [v.payload for v in short])
    for v in longer:
        assert solve(span, v) is not None

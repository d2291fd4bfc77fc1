import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from borelext._milnor_fast import product_keys, pack
from borelext.steenrod import (AlgebraTable, adem_product, admissible_basis, basis_bridge,
                               milnor_basis, milnor_degree, milnor_index, milnor_product,
                               multiply_sums)


def as_milnor(sum_of_words, d):
    bridge = basis_bridge(d)
    out = frozenset()
    for w in sum_of_words:
        out = out.symmetric_difference(bridge.admissible_as_milnor(w))
    return out


def test_basis_examples():
    assert milnor_basis(0) == ((),)
    assert set(milnor_basis(3)) == {(3,), (0, 1)}
    assert milnor_basis(7) == ((7,), (4, 1), (1, 2), (0, 0, 1))
    assert milnor_basis(9) == ((9,), (6, 1), (3, 2), (2, 0, 1), (0, 3))


def test_product_examples():
    assert milnor_product((1,), (1,)) == frozenset()
    assert milnor_product((1,), (2,)) == frozenset([(3,)])
    assert milnor_product((2,), (1,)) == frozenset([(3,), (0, 1)])


def test_adem_examples():
    assert adem_product((1,), (1,)) == frozenset()
    assert adem_product((2,), (2,)) == frozenset([(3, 1)])
    assert adem_product((1,), (2,)) == frozenset([(3,)])


def test_bridge_examples():
    assert basis_bridge(1).to_milnor.to_lists() == [[1]]
    b3 = basis_bridge(3)
    assert set(b3.admissible_as_milnor((3,))) == {(3,)}
    assert set(b3.admissible_as_milnor((2, 1))) == {(3,), (0, 1)}
    assert basis_bridge(0).admissible == ((),)


@pytest.mark.parametrize("d", range(41))
def test_basis_sizes_agree(d):
    assert len(milnor_basis(d)) == len(admissible_basis(d))
    assert all(milnor_degree(r) == d for r in milnor_basis(d))


def test_milnor_matches_adem_exhaustively():
    for d1 in range(17):
        for d2 in range(17 - d1):
            for u in admissible_basis(d1):
                mu = as_milnor([u], d1)
                for v in admissible_basis(d2):
                    lhs = multiply_sums(mu, as_milnor([v], d2))
                    assert lhs == as_milnor(adem_product(u, v), d1 + d2), (u, v)


@st.composite
def milnor_elements(draw, max_degree):
    d = draw(st.integers(0, max_degree))
    return draw(st.sampled_from(milnor_basis(d)))


@given(milnor_elements(8), milnor_elements(8), milnor_elements(4))
def test_associative(a, b, c):
    left = multiply_sums(multiply_sums(frozenset([a]), frozenset([b])), frozenset([c]))
    right = multiply_sums(frozenset([a]), multiply_sums(frozenset([b]), frozenset([c])))
    assert left == right


@given(milnor_elements(20))
def test_unit(a):
    assert milnor_product((), a) == frozenset([a]) == milnor_product(a, ())


def test_compiled_kernel_matches_reference():
    rng = random.Random(7)
    table = AlgebraTable(60)
    for _ in range(1500):
        d1, d2 = rng.randint(0, 30), rng.randint(0, 30)
        i = rng.randrange(len(milnor_basis(d1)))
        j = rng.randrange(len(milnor_basis(d2)))
        index = milnor_index(d1 + d2)
        expected = 0
        for m in milnor_product(milnor_basis(d1)[i], milnor_basis(d2)[j]):
            expected ^= 1 << index[m]
        assert table.product(d1, i, d2, j) == expected


def test_kernel_keys_are_packed_terms():
    keys = product_keys(np.array([2], np.int64), np.array([1], np.int64))
    assert sorted(keys.tolist()) == sorted([pack((3,)), pack((0, 1))])


def test_table_refuses_out_of_range():
    table = AlgebraTable(10)
    with pytest.raises(ValueError):
        table.product(6, 0, 6, 0)

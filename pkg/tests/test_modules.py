from math import comb

import pytest
from hypothesis import given, strategies as st

from borelext.modules import (SpecError, binom2, cell_sub, check_module_axioms, column_model,
                              dictionary_model, parse_module_spec, sphere, stunted_module)


def exact_binom(n, k):
    # C(n, k) for negative n via the falling factorial
    num = 1
    for i in range(k):
        num *= n - i
    den = 1
    for i in range(1, k + 1):
        den *= i
    return num // den


def test_binom2_examples():
    assert binom2(6, 2) == 1
    assert binom2(-3, 2) == 0
    assert all(binom2(-1, k) == 1 for k in range(40))


def test_binom2_exhaustive():
    for n in range(-64, 65):
        for k in range(65):
            assert binom2(n, k) == exact_binom(n, k) % 2, (n, k)
    assert exact_binom(10, 3) == comb(10, 3)


def test_stunted_examples():
    m = stunted_module(1, 2)
    assert m.sq(1, 1) == 1 and m.name(1) == "[1]"
    p = stunted_module(-20, 20)
    assert not any(p.sq(c, -1 - c) for c in range(1, 20))
    assert all(p.sq(c, -1) for c in range(1, 21))


def test_column_models():
    (m1, s1), = column_model(1, 10)
    assert m1.cells == tuple(range(0, 11)) and s1 == 1
    (p0, a), (s, b) = column_model(0, 10)
    assert p0.cells == tuple(range(0, 11)) and a == 1
    assert s.cells == (-1,) and b == 0
    (m8, _), = column_model(8, 10)
    assert -4 in m8 and -1 not in m8 and m8.bottom == -8
    (pm, _), _ = column_model(-2, 10)
    assert pm.bottom == 2


def test_dictionary_models():
    a = dictionary_model("A", 8, 8)
    assert len(a.cells) == 16 and -1 not in a
    assert dictionary_model("B", 1, 1).cells == (-1, 0, 1)
    with pytest.raises(ValueError):
        dictionary_model("C", 1, 1)


def test_cell_sub_examples():
    ses = cell_sub(stunted_module(1, 2), 2)
    assert ses.sub.cells == (2,) and ses.quotient.cells == (1,)
    full = cell_sub(stunted_module(1, 4), 1)
    assert full.sub.cells == (1, 2, 3, 4) and full.quotient.cells == ()
    ses = cell_sub(dictionary_model("A", 6, 5), 0)
    assert ses.sub.cells == tuple(range(0, 6))
    assert ses.quotient.cells == tuple(range(-6, -1))


@pytest.mark.parametrize("m", [stunted_module(-12, 12), stunted_module(1, 20), dictionary_model("A", 10, 10),
                               dictionary_model("B", 9, 9), column_model(5, 14)[0][0]],
                         ids=["P-12:12", "P1:20", "DA", "DB", "M5"])
def test_module_axioms(m):
    check_module_axioms(m)


@given(st.integers(-200, 200), st.integers(1, 31), st.integers(5, 8), st.integers(-4, 4))
def test_james_periodicity(n, c, L, k):
    if c < 2 ** L:
        assert binom2(n, c) == binom2(n + k * 2 ** L, c)


@pytest.mark.parametrize("text,cells", [("S:3", (3,)), ("P:-2:1", (-2, -1, 0, 1)),
                                        ("M:2:3", (-2, 0, 1, 2, 3)), ("DB:1:1", (-1, 0, 1))])
def test_parse_spec(text, cells):
    assert parse_module_spec(text).cells == cells


@pytest.mark.parametrize("text", ["", "Q:1", "P:3", "P:4:2", "S:x", "M:0:4", "M:3", "DA:0:3"])
def test_parse_spec_errors(text):
    with pytest.raises(SpecError):
        parse_module_spec(text)


def test_sphere_has_no_action():
    assert sphere(5).action == frozenset()

import pytest

from borelext.borel import BorelEngine, WindowError
from borelext.limits import LimitEngine, ladder_for


@pytest.fixture(scope="module")
def engine(store):
    return BorelEngine(s_max=5, store=store)


def test_low_groups(engine):
    assert engine.group(1, 1, 0).names() == ["1[0]", "h0[-1]"]
    assert engine.group(2, 3, 1).names() == ["h0[0]"]
    assert engine.group(0, 0, 0).names() == ["1[-1]"]


def test_group_records_tridegree(engine):
    g = engine.group(3, 7, 1)
    assert (g.stem, g.coweight, g.classical_t) == (4, 3, 5)
    assert all(c.summand == "M" for c in g.basis)


def test_summand_tags_for_nonpositive_weight(engine):
    tags = {c.summand for c in engine.group(3, 6, 0).basis}
    assert tags <= {"P", "S"}


def test_window_errors(engine):
    with pytest.raises(WindowError):
        engine.group(6, 10, 0)
    with pytest.raises(WindowError):
        engine.group(1, 40, 0)


@pytest.mark.parametrize("stw", [(2, 3, 1), (3, 7, 1), (3, 6, 2), (4, 9, 3)])
def test_rho_matches_truncations(engine, stw):
    assert engine.verify_rho(*stw, K=16)


def test_rho_lowers_weight_and_stem(engine):
    rho = engine.rho_map(3, 7, 1)
    assert (rho.target.s, rho.target.t, rho.target.w) == (3, 6, 0)
    for ln in engine.rho_lines(3):
        (s1, t1, w1), (s2, t2, w2) = ln.source, ln.target
        assert (s2, t2 - s2, w2) == (s1, t1 - s1 - 1, w1 - 1)


@pytest.mark.parametrize("variant,source,target", [
    ("A", "h0h2[0]", "c0[-6]"),
    ("A", "h0^3h3[-4]", "Ph2[-9]"),
    ("B", "h1^2[1]", "c0[-6]"),
])
def test_dictionary_pairs_are_depth_stable(engine, variant, source, target):
    d = engine.dictionary(variant)
    assert d.depths == (16, 24)
    assert d.contains(source, target)
    assert d.source_of(target) == source


@pytest.mark.parametrize("cls,name", [
    ("1", "1[-1]"), ("h0", "h1[-2]"), ("h1", "h2[-3]"), ("h2", "h3[-5]"),
    ("h0^2", "h1^2[-3]"), ("h0h2", "h1h3[-6]"),
])
def test_mahowald_invariants(engine, cls, name):
    res = engine.mahowald(cls)
    assert res.stable and res.name.label == name


def test_ladder_policy():
    assert ladder_for(32) == (32, 73, 81)


@pytest.mark.parametrize("w", [-1, 0, 3])
def test_limit_columns_at_low_filtration(store, w):
    eng = LimitEngine(4, -2, 13, store=store)
    chart = eng.ext_of_limit(w)
    assert not chart.unstable
    assert eng.check_transport(w) == []

import pytest

from borelext.cobar import CapExceeded, cobar_ext, dualize
from borelext.modules import dictionary_model, sphere, stunted_module
from borelext.resolution import Resolution

T_MAX = 14
SUITE = {"S0": sphere(0), "P1:8": stunted_module(1, 8), "P-5:-1": stunted_module(-5, -1),
         "DB:4:4": dictionary_model("B", 4, 4)}


def test_sphere_examples():
    chart = cobar_ext(dualize(sphere(0)), 1, 4)
    assert chart.dims[(0, 0)] == 1
    assert chart.dims[(1, 1)] == 1 and chart.cocycles[(1, 1)] == [[(((1,),), 0)]]
    assert chart.dims[(1, 2)] == 1 and chart.cocycles[(1, 2)] == [[(((2,),), 0)]]
    assert (1, 3) not in chart.dims


def test_dualize_examples():
    assert dualize(sphere(3)).coaction[3] == frozenset()
    assert ((1,), 1) in dualize(stunted_module(1, 2)).coaction[2]
    c = dualize(stunted_module(-6, 4))
    assert c.coaction[-1] == frozenset()


def test_caps_refused():
    with pytest.raises(CapExceeded):
        cobar_ext(dualize(sphere(0)), 4, 10)
    with pytest.raises(CapExceeded):
        cobar_ext(dualize(sphere(0)), 3, 15)


@pytest.mark.parametrize("name", SUITE)
def test_oracle_matches_resolution(name):
    m = SUITE[name]
    oracle = cobar_ext(dualize(m), 3, T_MAX).dims
    res = Resolution(m, 3, T_MAX)
    engine = {(s, t): d for (s, t), d in res.chart().items() if t <= T_MAX and s <= 3}
    assert oracle == engine

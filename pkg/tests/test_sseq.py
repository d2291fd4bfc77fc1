import pytest

from borelext.modules import dictionary_model, parse_module_spec, sphere
from borelext.sseq import Ahss, Detector, convergence_check, structure_audit


@pytest.fixture(scope="module")
def p18(store):
    return Ahss(parse_module_spec("P:1:8"), 5, 12, store)


@pytest.fixture(scope="module")
def da16(store):
    return Ahss(dictionary_model("A", 16, 14), 6, 14, store)


def test_convergence_on_p18(p18):
    report = convergence_check(p18, 0, 11)
    assert report.ok, report.mismatches


def test_structure_audit_on_p18(p18):
    assert structure_audit(p18, 0, 11) == []


def test_single_cell_has_no_differentials(store):
    a = Ahss(sphere(3), 4, 10, store)
    assert a.differentials(0, 10) == []
    assert convergence_check(a, 0, 7).ok


def test_e1_is_sphere_ext(p18, store):
    # E_1 at cell n is Ext of S^n: h0 on cell 2 lives in (s, t) = (1, 3)
    assert p18.e1_dim(2, 1, 3) == 1
    assert p18.e1_dim(2, 1, 4) == 1     # h1
    assert p18.e1_dim(2, 1, 5) == 0


@pytest.mark.parametrize("source,target,r", [
    ("h0h2[0]", "c0[-6]", 6),
    ("h1^2[1]", "h1^2h3[-7]", 8),
    ("h0^3h3[-4]", "Ph2[-9]", 5),
])
def test_dictionary_model_differentials(da16, source, target, r):
    found = {(d.source_name, d.target_name, d.r) for d in da16.differentials(-3, 12, range(7))}
    assert (source, target, r) in found


def test_differential_targets_survive_to_their_page(da16):
    for d in da16.differentials(2, 4, range(5)):
        n, s, t = d.target
        assert da16.entry(d.r, n, s, t).dim > 0


def test_detector_names_bottom_classes(store):
    m = parse_module_spec("P:1:4")
    det = Detector(m, 3, 8, store)
    names = [c.label for c, _ in det.named_basis(0, 1)]
    assert names == ["1[1]"]
    labels = {c.label for c, _ in det.named_basis(1, 4)}
    assert labels and all(lbl.endswith("]") for lbl in labels)

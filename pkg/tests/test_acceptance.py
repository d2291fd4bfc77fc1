"""Acceptance criteria 1-9, one printed PASS/FAIL line each."""

import time

import pytest

from borelext import validate
from borelext.borel import BorelEngine
from borelext.modules import dictionary_model, parse_module_spec
from borelext.sseq import Ahss, convergence_check, structure_audit


@pytest.fixture
def verdict(capsys):
    def say(n: int, ok: bool, detail: str) -> bool:
        with capsys.disabled():
            print(f"\nCRITERION {n}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok
    return say


@pytest.fixture(scope="module")
def engine(store):
    return BorelEngine(s_max=10, store=store)


def test_criterion_1_vanishing(store, verdict):
    start = time.perf_counter()
    dim = BorelEngine(s_max=9, store=store).group(9, 23, 11).dim
    took = time.perf_counter() - start
    assert verdict(1, dim == 0 and took < 120, f"dim Ext(9,23,11) = {dim} in {took:.1f}s")


def test_criterion_2_named_classes(engine, verdict):
    want = {(5, 16, 8): "h0^3h3[-4]", (3, 7, 1): "h0h2[0]", (3, 6, 0): "h1^2[1]"}
    found = {k: engine.group(*k).names() for k in want}
    ok = all(name in found[k] for k, name in want.items())
    assert verdict(2, ok, "; ".join(f"{k}: {found[k]}" for k in want))


def test_criterion_3_dictionary(engine, verdict):
    a, b = engine.dictionary("A"), engine.dictionary("B")
    pairs = [(a, "h0h2[0]", "c0[-6]"), (a, "h0^3h3[-4]", "Ph2[-9]"), (b, "h1^2[1]", "c0[-6]")]
    ok = all(d.contains(src, tgt) for d, src, tgt in pairs) and a.depths == b.depths == (16, 24)
    assert verdict(3, ok, f"3 pairs stable at K={a.depths[0]} and K={a.depths[1]}")


def test_criterion_4_rho(engine, verdict):
    name, ok, detail = validate.rho_check(engine)
    assert verdict(4, ok and engine.verify_rho(3, 7, 1, K=16), detail)


def test_criterion_5_cobar(store, verdict):
    start = time.perf_counter()
    rep = validate.cobar_suite(store)
    took = time.perf_counter() - start
    assert verdict(5, rep.ok and took < 60,
                   f"{[c.name for c in rep.checks if c.ok]} agree with the oracle in {took:.1f}s")


def test_criterion_6_limits(store, verdict):
    rep = validate.posw_negw_suite(store)
    bad = [c.name for c in rep.checks if not c.ok]
    assert verdict(6, rep.ok, f"{len(rep.checks)} columns, s <= {validate.LIMIT_S_MAX}, failing {bad}")


def test_criterion_7_lin(store, verdict):
    rep = validate.lin_suite(store)
    assert verdict(7, rep.ok, "; ".join(f"{c.name}: {c.ok}" for c in rep.checks))


def test_criterion_8_ahss_structure(store, verdict):
    problems = []
    p18 = Ahss(parse_module_spec("P:1:8"), 5, 12, store)
    conv = convergence_check(p18, 0, 11)
    problems += structure_audit(p18, 0, 11)
    problems += structure_audit(Ahss(dictionary_model("A", 16, 14), 4, 12, store), -3, 10)
    parity = validate.parity_suite(store)
    ok = conv.ok and not problems and parity.ok
    assert verdict(8, ok, f"audit problems {len(problems)}, convergence {conv.ok}, "
                          f"parity {parity.checks[0].detail}")


def test_criterion_9_chart_reproduction(tmp_path, verdict):
    from borelext import cli
    runs, times = [], []
    for k in (1, 2):
        out = tmp_path / f"run{k}"
        out.mkdir()
        start = time.perf_counter()
        code = cli.main(["borel", "--json", str(out), "--svg", str(out)])
        times.append(time.perf_counter() - start)
        assert code == cli.EXIT_OK
        runs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    pages = [f"coweight_{c}.json" for c in range(-2, 14)]
    complete = all(p in runs[0] for p in pages) and len(runs[0]) == 32
    identical = runs[0] == runs[1]
    from borelext.charts import ChartDocument
    page3 = ChartDocument.from_json(runs[0]["coweight_3.json"].decode())
    dot = page3.entry_at(11, 5)
    ok = complete and identical and max(times) < 30 * 60 and dot and "h0^3h3[-4]" in dot.names
    assert verdict(9, ok, f"16 pages (stems 0..30, s <= 12), byte-identical rerun: {identical}; "
                          f"wall times {times[0]:.0f}s and {times[1]:.0f}s on one core")

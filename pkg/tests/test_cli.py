import json

import pytest

from borelext import cli
from borelext.charts import ChartDocument, ChartEntry, ChartLine, render_svg, write_atomic


def sample_doc(coweight=3):
    entries = [ChartEntry(10, 4, 10 - coweight, ("h0^2h3[-1]",), ("M",)),
               ChartEntry(11, 4, 11 - coweight, ("a[0]", "b[2]"), ("M", "M")),
               ChartEntry(11, 5, 11 - coweight, ("h0^3h3[-4]",), ("M",))]
    lines = [ChartLine((11, 4), (10, 4), "b[2]", "h0^2h3[-1]")]
    return ChartDocument(coweight, 0, 12, 6, entries, lines,
                         {"code_version": "test", "unstable": [[11, 4]]})


def test_json_roundtrip_and_bytes():
    doc = sample_doc()
    text = doc.to_json()
    back = ChartDocument.from_json(text)
    assert back == doc
    assert back.to_json() == text
    assert text.isascii() and text.endswith("\n")


def test_document_validation():
    doc = sample_doc()
    doc.rho_lines.append(ChartLine((3, 1), (2, 1), "x[0]", "y[0]"))
    with pytest.raises(ValueError):
        doc.validate()
    bad = sample_doc()
    bad.entries[0] = ChartEntry(10, 4, 99, ("x[0]",), ("M",))
    with pytest.raises(ValueError):
        bad.validate()


def test_empty_page_is_valid():
    doc = ChartDocument(13, 0, 30, 12, [], [], {})
    doc.validate()
    svg = render_svg(doc)
    assert svg.startswith("<svg") and "<circle" not in svg


def test_svg_is_deterministic():
    a, b = render_svg(sample_doc()), render_svg(sample_doc())
    assert a == b
    assert a.count("<circle") == 4
    assert 'stroke="red"' in a and "h0³h3[−4]" in a
    assert ">!</text>" in a


def test_write_atomic(tmp_path):
    target = tmp_path / "out" / "chart.json"
    write_atomic(target, "one\n")
    write_atomic(target, "two\n")
    assert target.read_text() == "two\n"
    assert [p.name for p in target.parent.iterdir()] == ["chart.json"]


def test_render_verb(tmp_path):
    src = tmp_path / "page.json"
    src.write_text(sample_doc().to_json())
    out = tmp_path / "page.svg"
    assert cli.main(["render", str(src), "--svg", str(out)]) == cli.EXIT_OK
    assert out.read_text() == render_svg(sample_doc())


def test_ext_verb_matches_oracle(tmp_path, capsys):
    from borelext.cobar import cobar_ext, dualize
    from borelext.modules import sphere
    assert cli.main(["ext", "S:0", "--smax", "3", "--tmax", "14"]) == 0
    doc = json.loads(capsys.readouterr().out)
    dims = {(d["s"], d["t"]): d["dimension"] for d in doc["dims"] if d["s"] <= 3}
    assert dims == cobar_ext(dualize(sphere(0)), 3, 14).dims


def test_ext_verb_two_cells(capsys):
    assert cli.main(["ext", "P:1:2", "--smax", "2", "--tmax", "4"]) == 0
    doc = json.loads(capsys.readouterr().out)
    dims = {(d["s"], d["t"]): d["dimension"] for d in doc["dims"]}
    # Sq^1 joins the cells: one generator in s=0, and h0 on the bottom cell is gone
    assert dims[(0, 1)] == 1 and (0, 2) not in dims and (1, 2) not in dims


def test_ext_is_byte_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    cli.main(["ext", "P:-3:2", "--smax", "3", "--tmax", "8", "--json", str(a)])
    cli.main(["ext", "P:-3:2", "--smax", "3", "--tmax", "8", "--json", str(b)])
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("argv", [["ext", "P:2:1"], ["ext", "Q:1"], ["borel", "--coweight", "40"],
                                  ["frobnicate"], ["validate", "nope"]])
def test_usage_errors_exit_2(argv, capsys):
    try:
        code = cli.main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == cli.EXIT_USAGE


def test_spec_error_names_the_problem(capsys):
    assert cli.main(["ext", "P:2:1"]) == cli.EXIT_USAGE
    assert "empty cell range" in capsys.readouterr().err


def test_config_file(tmp_path):
    cfg = tmp_path / "borelext.conf"
    cfg.write_text("# settings\nsmax = 5\nstem-max = 20  # inline\njobs=2\n")
    assert cli.read_config(cfg) == {"smax": 5, "stem_max": 20, "jobs": 2}
    args = cli.build_parser().parse_args(["borel", "--config", str(cfg), "--smax", "7"])
    settings = cli._settings(args)
    assert settings["smax"] == 7 and settings["stem_max"] == 20
    cfg.write_text("colour = red\n")
    with pytest.raises(cli.UsageError):
        cli.read_config(cfg)
    cfg.write_text("smax = lots\n")
    assert cli.main(["ext", "S:0", "--config", str(cfg)]) == cli.EXIT_USAGE


def test_validate_reports_and_exit_code(capsys):
    assert cli.main(["validate", "parity", "--smax", "3"]) == cli.EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["ok"] and report["suite"] == "parity"


def test_mahowald_unit(capsys):
    assert cli.main(["mahowald", "1"]) == cli.EXIT_OK
    assert json.loads(capsys.readouterr().out)["name"] == "1[-1]"

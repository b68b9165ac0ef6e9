import json
from pathlib import Path

import pytest

from barelim.cli import main
from barelim.harness import CORPUS, DEMO_SOURCE
from barelim.parse import parse
from barelim import syntax as sx


@pytest.fixture
def term_file(tmp_path):
    def write(text, name="t.t"):
        p = tmp_path / name
        p.write_text(text + "\n")
        return str(p)
    return write


def test_translate_writes_pure_term(term_file, tmp_path):
    out = tmp_path / "out.t"
    assert main(["translate", "--input", term_file(DEMO_SOURCE), "--output", str(out)]) == 0
    t = parse(out.read_text())
    assert sx.is_pure_t(t) and not sx.free_vars(t)


def test_check_pass_and_determinism(term_file, tmp_path):
    src = term_file("fun alpha:N->N->N. alpha (alpha 0 0) 1")
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert main(["check", "--tau", "N->N", "--input", src, "--seed", "5", "--samples", "30",
                     "--report", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert json.loads(paths[0].read_text())["tau"] == "N->N"


def test_level_table(term_file, capsys):
    assert main(["level", "--input", term_file(DEMO_SOURCE)]) == 0
    assert "max level 0" in capsys.readouterr().out


def test_run_with_args(term_file, capsys):
    f = term_file("fun x:N. fun y:N. plus x (rec[N] 0 (fun k:N. fun r:N. S (S r)) y)", "f.t")
    assert main(["run", "--input", f, "--args", term_file("3", "a.t"), term_file("4", "b.t")]) == 0
    assert capsys.readouterr().out.strip() == "11"


@pytest.mark.parametrize("text, argv", [
    ("fun a:N->N. a a", ["level"]),
    ("fun a:N->N. (", ["level"]),
    ("fun a:N->N. a 0", ["check", "--tau", "(N->N)->N"]),
    ("fun a:N->N. a 0", ["translate", "--sigma", "N ->"]),
])
def test_input_errors_exit_2(term_file, text, argv):
    assert main(argv + ["--input", term_file(text)]) == 2


def test_missing_file_exit_2(tmp_path):
    assert main(["level", "--input", str(tmp_path / "missing.t")]) == 2


def test_fuel_exit_3(term_file):
    assert main(["check", "--input", term_file(DEMO_SOURCE), "--fuel-steps", "10"]) == 3
    assert main(["run", "--input", term_file("rec[N] 0 (fun k:N. fun r:N. S r) 1000"),
                 "--fuel-steps", "100"]) == 3


def test_mismatch_exit_1(term_file, monkeypatch):
    from barelim import harness
    real = harness.elimination
    monkeypatch.setattr(harness, "elimination", lambda y, ctx: real(parse("fun a:N->N. a 1"), ctx))
    assert main(["check", "--input", term_file("fun a:N->N. a 0"), "--samples", "40"]) == 1


def test_demo_exit_0(capsys):
    assert main(["demo", "--samples", "10"]) == 0
    assert "10/10 samples agree" in capsys.readouterr().out


def test_demo_program_golden(capsys):
    golden = (Path(__file__).parent / "golden" / "demo_program.txt").read_text()
    assert main(["demo", "--samples", "1"]) == 0
    assert golden in capsys.readouterr().out


def test_translate_show_definitions_golden(term_file, tmp_path, capsys):
    golden = (Path(__file__).parent / "golden" / "demo_program.txt").read_text()
    assert main(["translate", "--input", term_file(DEMO_SOURCE), "--output", str(tmp_path / "o.t"),
                 "--show-definitions"]) == 0
    assert capsys.readouterr().out == golden


def test_corpus_files_match_library():
    root = Path(__file__).parent.parent / "corpus"
    for entry in CORPUS:
        assert parse((root / f"{entry.name}.t").read_text()) == entry.term()

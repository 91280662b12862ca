import json
import subprocess
import sys
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from derivedfunctors.cli import (
    ParseError,
    RowLengthMismatch,
    build_map,
    format_presentation,
    main,
    parse_file,
    parse_presentation,
)
from derivedfunctors.fp_modules import canonical_form, make_module

DATA = Path(__file__).resolve().parent.parent / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def report(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


class TestParse:
    def test_cyclic(self):
        M = parse_presentation("generators 1\nrelations [4]\n")
        assert M == make_module(1, [[4]])

    def test_two_rows_on_one_line(self):
        M = parse_presentation("generators 2\nrelations [4,0],[0,6]\n")
        assert M.relations.to_rows() == [[4, 0], [0, 6]]

    def test_row_length_mismatch(self):
        with pytest.raises(RowLengthMismatch) as exc:
            parse_presentation("generators 1\nrelations [1,2]\n")
        assert exc.value.line == 2

    def test_bad_token_location(self):
        with pytest.raises(ParseError) as exc:
            parse_presentation("module A\ngenerators 1\nrelations\n[4] junk\n")
        assert exc.value.line == 4 and exc.value.column > 1

    def test_comments_and_names(self):
        parsed = parse_file("# two modules\nmodule A\ngenerators 1\nrelations\n[2]\nmodule B\ngenerators 0\n")
        assert set(parsed.modules) == {"A", "B"}
        assert parsed.modules["B"].generators == 0

    def test_map_file(self):
        f = build_map(parse_file((DATA / "double.map").read_text()))
        assert f.matrix.to_rows() == [[2]]

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 3).flatmap(lambda g: st.lists(
        st.lists(st.integers(-99, 99), min_size=g, max_size=g), max_size=4).map(lambda rows: (g, rows))))
    def test_round_trip(self, gr):
        g, rows = gr
        M = make_module(g, rows)
        assert parse_presentation(format_presentation(M, "X")) == M


class TestCommands:
    def test_tor_z4_z6(self, capsys):
        code, rep = report(capsys, "tor", DATA / "z4.pres", DATA / "z6.pres")
        assert code == 0
        assert rep["outputs"]["canonical_form"]["torsion"] == [2]
        assert rep["seed"] == 1729

    def test_tor_free_vanishes(self, capsys):
        code, rep = report(capsys, "tor", DATA / "z.pres", DATA / "z6.pres")
        assert code == 0 and rep["outputs"]["canonical_form"]["torsion"] == []
        assert rep["outputs"]["canonical_form"]["free_rank"] == 0

    def test_tor_with_free_summand(self, capsys):
        code, rep = report(capsys, "tor", DATA / "z4_plus_z.pres", DATA / "z6.pres")
        assert code == 0 and rep["outputs"]["canonical_form"]["torsion"] == [2]

    def test_resolve(self, capsys):
        code, rep = report(capsys, "resolve", DATA / "z4.pres", "--family-size", 3)
        assert code == 0
        assert len(rep["outputs"]["members"]) == 3
        assert all(c["passed"] for c in rep["checks"])

    def test_map(self, capsys):
        code, rep = report(capsys, "map", DATA / "double.map", DATA / "z4.pres")
        assert code == 0
        assert rep["outputs"]["matrix"] == [[2]]
        assert rep["outputs"]["source"]["torsion"] == [2]
        assert rep["outputs"]["target"]["torsion"] == [4]

    def test_map_not_well_defined(self, capsys):
        code, _, err = run(capsys, "map", DATA / "not_well_defined.map", DATA / "z4.pres")
        assert code == 2 and "NotWellDefined" in err

    def test_missing_file(self, capsys):
        code, _, _ = run(capsys, "tor", DATA / "nope.pres", DATA / "z6.pres")
        assert code == 2

    def test_bad_presentation_file(self, capsys, tmp_path):
        p = tmp_path / "bad.pres"
        p.write_text("generators 1\nrelations [1,2]\n")
        code, _, err = run(capsys, "tor", p, DATA / "z6.pres")
        assert code == 2 and "RowLengthMismatch" in err

    def test_human_output(self, capsys):
        code, out, _ = run(capsys, "tor", DATA / "z4.pres", DATA / "z6.pres")
        assert code == 0 and "Z/2" in out

    def test_verify_passes(self, capsys):
        code, rep = report(capsys, "verify", "--cases", 6)
        assert code == 0
        assert {s["suite"] for s in rep["outputs"]["suites"]} == {
            "cocycle", "homotopy-independence", "functoriality", "limit-oracle", "L0-vs-F"}

    def test_verify_catches_fault(self, capsys):
        code, rep = report(capsys, "verify", "--cases", 4, "--inject-fault")
        assert code == 1
        bad = [s for s in rep["outputs"]["suites"] if not s["passed"]]
        assert bad[0]["suite"] == "cocycle"
        assert bad[0]["counterexample"]["error"] == "CocycleViolation"

    @pytest.mark.parametrize("argv", [
        ("tor", DATA / "z4.pres", DATA / "z6.pres", "--verbose"),
        ("map", DATA / "double.map", DATA / "z4.pres"),
        ("resolve", DATA / "z4_plus_z.pres"),
    ])
    def test_reports_are_bit_identical(self, capsys, argv):
        _, first, _ = run(capsys, *argv, "--json")
        _, second, _ = run(capsys, *argv, "--json")
        assert first == second


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "derivedfunctors", "tor", str(DATA / "z4.pres"),
                           str(DATA / "z6.pres"), "--json"], capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["outputs"]["canonical_form"]["display"] == "Z/2"


def test_canonical_form_of_data_files():
    assert canonical_form(parse_presentation((DATA / "z4_plus_z.pres").read_text())).free_rank == 1

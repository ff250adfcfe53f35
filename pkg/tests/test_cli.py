"""Command-line surface: exit codes, JSON schema, CSV shape."""
import csv
import io
import json

import pytest

from genwait.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out) if out.strip() else None, err


def test_info_builtin(capsys):
    code, doc, _ = run_json(capsys, "info", "--group", "builtin:sym(3)")
    assert code == 0
    assert doc["schema"] == "genwait/1"
    assert doc["kind"] == "info"
    assert doc["group"]["order"] == 6
    assert doc["d"] == 2


def test_estats_matches_documented_example(capsys):
    code, doc, _ = run_json(capsys, "estats", "--group", "builtin:sym(3)")
    assert code == 0
    assert doc["e"] == {"num": "29", "den": "10"}
    assert doc["m_table"] == {"2": 1, "3": 3}
    assert doc["M"]["ceil"] == 1
    assert doc["bounds"]["ok"] is True


def test_estats_with_generating_subset(capsys):
    code, doc, _ = run_json(capsys, "estats", "--group", "builtin:sym(3)",
                            "--subset", "(1,2);(1,2,3)")
    assert code == 0
    assert doc["e"] == {"num": "0", "den": "1"}
    assert doc["m_table"] == {}
    assert doc["M"]["value"] == "0"
    assert doc["note"] == "Y generates G"


def test_scan_csv_gaps(capsys):
    code, out, _ = run(capsys, "scan", "--group", "builtin:sym(3)",
                       "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    gaps = {r["element_order"]: r["gap"] for r in rows}
    assert gaps == {"1": "0", "2": "7/5", "3": "9/10"}


def test_mc_exact_side_by_side(capsys):
    code, doc, _ = run_json(capsys, "mc", "--group", "builtin:cyclic(2)",
                            "--samples", "20000", "--seed", "42")
    assert code == 0
    assert doc["exact"] == {"num": "2", "den": "1"}
    assert abs(doc["estimate"]["mean"] - 2.0) < 0.05
    assert float(doc["z"]) <= 3.0


def test_mc_requires_seed(capsys):
    code, _, _ = run(capsys, "mc", "--group", "builtin:cyclic(2)")
    assert code == 2


def test_crowns_s3_two_classes(capsys):
    code, doc, _ = run_json(capsys, "crowns", "--group", "builtin:sym(3)")
    assert code == 0
    assert [c["formula_check"] for c in doc["classes"]] == [True, True]
    assert all(chk["all_ok"] for chk in doc["soluble_checks"])


def test_crowns_insoluble_skips_checks(capsys):
    code, doc, _ = run_json(capsys, "crowns", "--group", "builtin:alt(5)")
    assert code == 0
    assert doc["residue_count"] == 21
    assert "soluble_checks" not in doc


def test_bounds_all_ok(capsys):
    code, doc, _ = run_json(capsys, "bounds", "--group", "builtin:alt(4)")
    assert code == 0
    assert doc["growth_bounds"]["ok"] is True
    assert all(s["ok"] for s in doc["singleton_gaps"])


def test_construct_round_trip(tmp_path, capsys):
    out_file = tmp_path / "d6.json"
    code, doc, _ = run_json(capsys, "construct", "--spec", "dihedral(6)",
                            "--out", str(out_file))
    assert code == 0
    data = json.loads(out_file.read_text())
    assert data["kind"] == "group"
    assert data["order"] == 12
    code2, doc2, _ = run_json(capsys, "info", "--group", str(out_file))
    assert code2 == 0
    assert doc2["group"]["order"] == 12
    # byte-identical on a second construct run
    out2 = tmp_path / "d6_again.json"
    run(capsys, "construct", "--spec", "dihedral(6)", "--out", str(out2))
    assert out2.read_text() == out_file.read_text()


def test_group_file_errors(tmp_path, capsys):
    missing = tmp_path / "nope.json"
    code, _, err = run(capsys, "info", "--group", str(missing))
    assert code == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "info", "--group", str(bad))
    assert code == 2
    assert "genwait/1" in err


def test_unknown_builder_is_parse_error(capsys):
    code, _, err = run(capsys, "estats", "--group", "builtin:nosuch(3)")
    assert code == 2
    assert json.loads(err)["status"] == 2


def test_cap_violation_exit_code(capsys):
    code, _, err = run(capsys, "lattice", "--group", "builtin:alt(7)",
                       "--cap", "lattice_order_cap=100")
    assert code == 3
    assert json.loads(err)["status"] == 3


def test_bad_cap_name(capsys):
    code, _, _ = run(capsys, "info", "--group", "builtin:cyclic(2)",
                     "--cap", "bogus=5")
    assert code == 2


def test_info_above_cap_omits_d(capsys):
    code, doc, _ = run_json(capsys, "info", "--group", "builtin:alt(7)",
                            "--cap", "lattice_order_cap=100")
    assert code == 0
    assert doc["d"] is None
    assert "note" in doc


def test_corpus_single_criterion(capsys):
    code, out, _ = run(capsys, "corpus", "--only", "12")
    assert code == 0
    assert "[PASS] criterion 12" in out


def test_corpus_bad_selection(capsys):
    code, _, _ = run(capsys, "corpus", "--only", "99")
    assert code == 2
    code, _, _ = run(capsys, "corpus", "--only", "three")
    assert code == 2


def test_lattice_summary(capsys):
    code, doc, _ = run_json(capsys, "lattice", "--group", "builtin:quaternion8()")
    assert code == 0
    assert doc["subgroup_count"] == 6
    assert doc["maximal_count"] == 3
    assert doc["frattini_order"] == 2
    assert doc["subgroups_by_order"] == {"1": 1, "2": 1, "4": 3, "8": 1}


def test_help_exits_zero(capsys):
    code, _, _ = run(capsys, "--help")
    assert code == 0

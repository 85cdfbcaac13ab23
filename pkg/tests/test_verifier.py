"""End-to-end verification, table run, report emission, CLI exit codes."""

import json

import pytest

from heegnercert.cli import main
from heegnercert.verifier import (
    RowInput,
    emit_report,
    report_to_dict,
    run_table,
    verify_row,
)


def test_verify_row_11a1_13_all_pass():
    rep = verify_row(RowInput("11a1", (0, -1, 1, -10, -20), -7, 13))
    assert rep.overall() == "pass"
    assert all(v["status"] == "pass" for v in rep.star.values())
    assert all(v["status"] == "pass" for v in rep.thm41.values())
    assert rep.table_row == (-1, 4)
    assert rep.reduction_type == "ordinary"
    assert any("ASSUMPTION" in a for a in rep.assumptions)


def test_verify_row_supersingular_vacuous_iv():
    rep = verify_row(RowInput("11a1", (0, -1, 1, -10, -20), -7, 29))
    assert rep.reduction_type == "supersingular"
    for key in ("iva", "ivb", "ivc"):
        assert rep.star[key]["status"] == "pass"
        assert "vacuous" in rep.star[key].get("note", "")
    assert rep.overall() == "pass"


def test_table_no_golden_mismatches(table_run):
    reports, mismatches, _ = table_run
    assert len(reports) == 19
    assert mismatches == []


def test_table_golden_columns(table_run, golden):
    reports, _, _ = table_run
    by_key = {(r.label, r.D, r.p): r for r in reports}
    for label, D, p, kr, ap in golden:
        assert by_key[(label, D, p)].table_row == (kr, ap)


def test_table_known_statuses(table_run):
    reports, _, _ = table_run
    by_key = {(r.label, r.D, r.p): r for r in reports}
    # the one row whose own a_p = 2 with p split violates the split
    # ordinariness condition; reported honestly as a failure
    bad = by_key[("99a1", -35, 17)]
    assert bad.star["ivc"]["status"] == "fail"
    assert bad.overall() == "fail"
    # the large-prime row where the index certificate exhausts its bound
    big = by_key[("53a1", -11, 751)]
    assert big.thm41["b"]["status"] == "inconclusive"
    assert big.overall() == "inconclusive"
    # every other row passes outright
    for key, rep in by_key.items():
        if key not in (("99a1", -35, 17), ("53a1", -11, 751)):
            assert rep.overall() == "pass", key


def test_machine_report_round_trips_as_json(table_run):
    reports, _, _ = table_run
    text = emit_report(reports, "machine")
    data = json.loads(text)
    assert len(data) == 19
    assert [d["label"] for d in data] == [r.label for r in reports]


def test_determinism_byte_identical(table_run):
    reports, _, _ = table_run
    once = emit_report(reports, "machine")
    reports2, _ = run_table()
    twice = emit_report(reports2, "machine")
    assert once == twice
    assert [report_to_dict(r) for r in reports] == [report_to_dict(r) for r in reports2]


def test_cli_verify_pass_exit_zero(capsys):
    assert main(["verify", "--curve", "11a1", "--disc", "-7", "--prime", "13"]) == 0
    out = capsys.readouterr().out
    assert "pass" in out


def test_cli_verify_machine_format(capsys):
    code = main(
        ["verify", "--curve", "0,-1,1,-10,-20", "--disc", "-7", "--prime", "13",
         "--format", "machine"]
    )
    assert code == 0
    data = json.loads(capsys.readouterr().out)
    row = data[0] if isinstance(data, list) else data
    assert row["thm41"]["e"]["status"] == "pass"


def test_cli_inconclusive_exit_three():
    code = main(
        ["verify", "--curve", "53a1", "--disc", "-11", "--prime", "751"]
    )
    assert code == 3


def test_cli_fail_exit_two():
    code = main(["verify", "--curve", "99a1", "--disc", "-35", "--prime", "17"])
    assert code == 2


def test_cli_usage_errors_exit_one(capsys):
    with pytest.raises(SystemExit) as err:
        main(["verify", "--curve", "11a1"])
    assert err.value.code == 1
    assert main(["verify", "--curve", "nope", "--disc", "-7", "--prime", "13"]) == 1
    assert main(["verify", "--curve", "11a1", "--disc", "-12", "--prime", "13"]) == 1
    capsys.readouterr()


def test_cli_golden_mismatch_exit_four(tmp_path, capsys):
    golden = tmp_path / "golden.csv"
    golden.write_text(
        "label,D,p,kronecker,ap\n11a1,-7,13,-1,5\n", encoding="utf-8"
    )
    code = main(["table", "--golden", str(golden)])
    assert code == 4
    assert "mismatch" in capsys.readouterr().err


def test_non_minimal_model_rejected_via_cli(capsys):
    code = main(
        ["verify", "--curve", "0,-4,8,-160,-1280", "--disc", "-7", "--prime", "13"]
    )
    assert code == 1
    assert "minimal" in capsys.readouterr().err

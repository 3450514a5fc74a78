from __future__ import annotations

import json

import pytest

from subshift_speed.cli import EXIT_BUDGET, EXIT_ERROR, EXIT_OK, main
from subshift_speed.core import loads_sft


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def phi_column(csv_text: str) -> list[str]:
    lines = csv_text.strip().splitlines()
    col = lines[0].split(",").index("n")
    return [ln.split(",")[col] for ln in lines[1:]]


def test_fullshift_phi_is_zero(capsys):
    code, out, _ = run(capsys, "phi", "--system", "fullshift", "--kmax", "10")
    assert code == EXIT_OK
    assert phi_column(out) == ["0"] * 10


def test_phi_output_is_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert main(["phi", "--system", "example21", "--kmax", "6", "--out", str(path)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    assert phi_column(a.read_text()) == ["0", "0", "0", "1", "1", "2"]


def test_phi_budget_exit(capsys):
    code, _, err = run(capsys, "phi", "--system", "example21", "--kmax", "6", "--n-budget", "1")
    assert code == EXIT_BUDGET
    assert "budget exceeded at k=6" in err and "'aaabba' survives at n=1" in err


def test_vertex_budget_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("SUBSHIFT_BUDGET_VERTICES", "5")
    code, _, _ = run(capsys, "phi", "--system", "example21", "--kmax", "4")
    assert code == EXIT_BUDGET


def test_not_a_realization_is_an_error(capsys):
    code, _, err = run(capsys, "phi", "--system", "golden", "--oracle", "fullshift", "--kmax", "3")
    assert code == EXIT_ERROR and "error:" in err


def test_malformed_sft_names_path_and_field(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    doc = {"dimension": 2, "alphabet": ["0", "1"], "forbidden": [{"cells": [{"letter": "1"}]}]}
    bad.write_text(json.dumps(doc))
    code, _, err = run(capsys, "phi", "--sft", str(bad), "--oracle", "fullshift", "--kmax", "2")
    assert code == EXIT_ERROR
    assert str(bad) in err and "forbidden[0]" in err

    broken = tmp_path / "broken.json"
    broken.write_text("{")
    code, _, err = run(capsys, "phi", "--sft", str(broken), "--oracle", "fullshift", "--kmax", "2")
    assert code == EXIT_ERROR and str(broken) in err


def test_missing_file(capsys):
    code, _, err = run(capsys, "phi", "--sft", "/nonexistent/x.json", "--oracle", "fullshift", "--kmax", "2")
    assert code == EXIT_ERROR and "/nonexistent/x.json" in err


def test_build_round_trip(tmp_path, capsys):
    out = tmp_path / "up.json"
    assert main(["build", "--system", "example21", "--scale-up", "2", "--out", str(out)]) == EXIT_OK
    sft, factor = loads_sft(out.read_text())
    assert factor is not None and factor.target.letters == ("a", "b", "$")
    code, text, _ = run(capsys, "phi", "--sft", str(out), "--oracle", "sigma_eq", "--kmax", "5")
    assert code == EXIT_OK
    assert phi_column(text) == ["0", "0", "0", "2", "2"]


def test_word_list_oracle_with_truncation(tmp_path, capsys):
    words = tmp_path / "words.txt"
    words.write_text("11\n101\n")
    code, text, _ = run(capsys, "phi", "--system", "golden", "--oracle", str(words), "--truncation-K", "1", "--kmax", "4")
    assert code == EXIT_OK and phi_column(text) == ["0"] * 4
    # with no words kept the target is the full shift, which the golden rules never reach
    code, _, _ = run(capsys, "phi", "--system", "golden", "--oracle", str(words), "--truncation-K", "0",
                     "--kmax", "4", "--n-budget", "2")
    assert code == EXIT_ERROR


def test_unknown_oracle(capsys):
    code, _, err = run(capsys, "phi", "--system", "example21", "--oracle", "nope", "--kmax", "2")
    assert code == EXIT_ERROR and "unknown oracle" in err


def test_lang(capsys):
    code, out, _ = run(capsys, "lang", "--system", "example21", "--n", "0", "--k", "3")
    assert code == EXIT_OK
    assert len([ln for ln in out.splitlines() if ln.strip()]) >= 16


def test_followers(capsys):
    code, out, _ = run(capsys, "followers", "--system", "example21", "--k1", "3", "--k2", "3")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert {"oracle", "table", "bound"} <= set(doc)


def test_tm_enum(capsys):
    code, out, _ = run(capsys, "tm-enum", "--tm", "golden", "--oracle", "golden", "--k", "3")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert (doc["dtime"], doc["dspace"]) == (2, 3)


def test_tm_enum_budget(capsys):
    code, _, _ = run(capsys, "tm-enum", "--tm", "silent", "--oracle", "golden", "--k", "2", "--budget", "20")
    assert code == EXIT_BUDGET


def test_compile_tm(tmp_path, capsys):
    row = ("0100100010" * 5)[:39]
    out = tmp_path / "rules.json"
    code, text, _ = run(capsys, "compile-tm", "--tm", "golden", "--w", "0", "--fixture-row", row, "--out", str(out))
    assert code == EXIT_OK
    assert "product alphabet: 1600 letters" in text
    assert "fixture: 0 violations" in text
    assert json.loads(out.read_text())["sizes"]["product"] == 1600


def test_compile_tm_letter_budget(capsys):
    code, _, _ = run(capsys, "compile-tm", "--tm", "golden", "--w", "0", "--max-letters", "10")
    assert code == EXIT_BUDGET


def test_grid_check(capsys):
    code, out, _ = run(capsys, "grid-check", "--runs", "3")
    assert code == EXIT_OK and "doubling OK, top run length 8" in out


def test_hilbert(capsys):
    code, out, _ = run(capsys, "hilbert", "--n", "3")
    assert code == EXIT_OK and out.strip() == "path OK, 64 cells"
    code, _, err = run(capsys, "hilbert", "--n", "2", "--tile", "zigzag")
    assert code == EXIT_ERROR and "unknown tile" in err


def test_usage_error_exits():
    with pytest.raises(SystemExit):
        main(["phi"])

import json

import pytest

from satset import matrixfile
from satset.cli import main
from satset.field import make_field
from satset.verify import ParityCheckMatrix


@pytest.fixture
def in_tmp(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def test_matrix_roundtrip_byte_exact(in_tmp):
    H = ParityCheckMatrix(make_field(9), [[1, 0, 8, 3], [0, 1, 2, 7]])
    text = matrixfile.dumps(H, ["hello"])
    assert text.splitlines()[:3] == ["# hello", "9 4 2", "1 0 1"]
    H2 = matrixfile.loads(text)
    assert H2 == H
    assert matrixfile.dumps(H2, ["hello"]) == text
    matrixfile.write("m.pchk", H)
    assert matrixfile.read("m.pchk") == H


@pytest.mark.parametrize(
    "text,where",
    [
        ("2 3\n-\n", "line 1"),
        ("2 3 2\n-\n1 0 1\n", "line 4"),
        ("2 3 2\n-\n1 0 x\n0 1 1\n", "line 3, column 5"),
        ("2 3 2\n-\n1 0 1\n0 1 2\n", "line 4, column 3"),
        ("6 3 2\n-\n1 0 1\n0 1 1\n", "prime power"),
        ("4 3 2\n0 0 1\n1 0 1\n0 1 1\n", "reducible"),
        ("# c\n2 2 1\n-\n1 1\n1 1\n", "line 5"),
    ],
)
def test_parse_errors_name_a_location(text, where):
    with pytest.raises(matrixfile.MatrixParseError, match=where):
        matrixfile.loads(text)


def test_construct_and_verify(in_tmp, capsys):
    assert main(["construct", "--R", "3", "--q", "5", "--out", "c5"]) == 0
    rec = json.loads((in_tmp / "c5.json").read_text())
    assert rec["schema"] == 1 and rec["certificate"]["is_AMDS"]
    assert rec["result"]["points"] and rec["trace"]
    assert main(["verify", "c5.pchk", "--amds", "--covering-radius", "3", "--saturation-level", "2"]) == 0
    assert main(["verify", "c5.pchk", "--covering-radius", "2"]) == 3


def test_construct_input_errors(in_tmp, capsys):
    assert main(["construct", "--R", "3", "--q", "6"]) == 2
    assert "not a prime power" in capsys.readouterr().err
    assert main(["construct", "--R", "2", "--q", "5"]) == 2
    assert "R >= 3" in capsys.readouterr().err
    assert main(["construct", "--R", "7", "--q", "13"]) == 4


def test_construct_reports_fallback_level_mismatch(in_tmp, capsys):
    # R=4, q=2 falls back and lands on a lower saturation level
    assert main(["construct", "--R", "4", "--q", "2"]) == 3
    assert "expected 3" in capsys.readouterr().err


def test_verify_small_code(in_tmp, capsys):
    (in_tmp / "h.pchk").write_text("2 3 2\n-\n1 0 1\n0 1 1\n")
    assert main(["verify", "h.pchk", "--covering-radius", "1"]) == 0
    capsys.readouterr()
    assert main(["verify", "h.pchk", "--covering-radius", "2"]) == 3
    assert "farthest" in capsys.readouterr().err
    assert main(["verify", "missing.pchk"]) == 2


def test_bounds_commands(in_tmp, capsys):
    assert main(["bounds", "--table1"]) == 0
    out = capsys.readouterr().out
    assert "7,0.84050266,0.1201,0.84193234,0.1203,0.84193331" in out
    assert main(["bounds", "--table2", "--out", "t2.csv"]) == 0
    assert "10,0.7178," in (in_tmp / "t2.csv").read_text()
    assert main(["bounds", "--report", "--R", "3", "--q", "5", "--t", "2"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["schema"] == 1 and rep["per_qt"][0]["t"] == 2
    assert main(["bounds", "--report"]) == 2


def test_lift_commands(in_tmp, capsys):
    assert main(["lift", "--n0", "5", "--r0", "4", "--q", "4", "--R", "3", "--m", "1"]) == 0
    e = json.loads(capsys.readouterr().out)["entries"][0]
    assert (e["n"], e["r"]) == (35, 7)
    assert main(["lift", "--n0", "9", "--r0", "4", "--q", "7", "--R", "3", "--m", "1"]) == 2
    capsys.readouterr()
    assert main(["construct", "--R", "3", "--q", "8", "--out", "b"]) == 0
    capsys.readouterr()
    assert main(["lift", "--base", "b.pchk", "--t-max", "4"]) == 0
    fam = json.loads(capsys.readouterr().out)
    assert [x["r"] for x in fam["entries"]] == [7, 10, 13]
    assert main(["construct", "--R", "3", "--q", "5", "--out", "b5"]) == 0
    capsys.readouterr()
    assert main(["lift", "--base", "b5.pchk", "--t-max", "4"]) == 2


def test_threads_flag_and_env_do_not_change_output(in_tmp, monkeypatch):
    assert main(["--threads", "1", "construct", "--R", "3", "--q", "7", "--out", "a"]) == 0
    monkeypatch.setenv("SATSET_THREADS", "4")
    assert main(["construct", "--R", "3", "--q", "7", "--out", "b"]) == 0
    assert (in_tmp / "a.pchk").read_bytes() == (in_tmp / "b.pchk").read_bytes()
    ja, jb = (json.loads((in_tmp / f).read_text()) for f in ("a.json", "b.json"))
    ja.pop("wall_time_s"), jb.pop("wall_time_s")
    ja["result"].pop("wall_time"), jb["result"].pop("wall_time")
    assert ja == jb


def test_bad_arguments_exit_2(capsys):
    assert main(["construct", "--R", "x"]) == 2
    assert main([]) == 2

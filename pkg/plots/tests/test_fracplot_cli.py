"""Exit-code contract for the fracplot command."""

import pytest

from fracplot.cli import main


@pytest.fixture()
def strobe_csv(tmp_path):
    path = tmp_path / "strobe.csv"
    path.write_text("f,k,x,y\n0.1,0,-1.2,1.0\n0.1,1,0.9,-0.4\n")
    return str(path)


def test_happy_path_reports_the_output_file(tmp_path, strobe_csv, capsys):
    out = tmp_path / "img.png"
    code = main(["strobe", "--in", strobe_csv, "--out", str(out)])
    assert code == 0
    assert f"wrote {out}" in capsys.readouterr().out
    assert out.exists()


def test_axis_label_flags_are_accepted(tmp_path, strobe_csv):
    out = tmp_path / "img.png"
    code = main(["strobe", "--in", strobe_csv, "--out", str(out),
                 "--xlabel", "x", "--ylabel", "y", "--title", "section"])
    assert code == 0


def test_unknown_kind_is_a_usage_error(tmp_path, strobe_csv, capsys):
    code = main(["histogram", "--in", strobe_csv, "--out",
                 str(tmp_path / "img.png")])
    assert code == 1
    assert "usage" in capsys.readouterr().err.lower()


def test_missing_out_flag_is_a_usage_error(strobe_csv, capsys):
    assert main(["strobe", "--in", strobe_csv]) == 1
    assert "--out" in capsys.readouterr().err


def test_missing_in_flag_is_a_usage_error(tmp_path, capsys):
    assert main(["strobe", "--out", str(tmp_path / "img.png")]) == 1
    assert "--in" in capsys.readouterr().err


def test_header_mismatch_exits_two_and_names_the_column(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("f,k,x,z\n0.1,0,-1.2,1.0\n")
    out = tmp_path / "img.png"
    code = main(["strobe", "--in", str(bad), "--out", str(out)])
    assert code == 2
    err = capsys.readouterr().err
    assert "y" in err and "z" in err
    assert not out.exists()


def test_empty_input_exits_two(tmp_path, strobe_csv, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text("f,k,x,y\n")
    code = main(["strobe", "--in", str(empty), "--out",
                 str(tmp_path / "img.png")])
    assert code == 2
    assert "no data rows" in capsys.readouterr().err

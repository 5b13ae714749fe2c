import csv
import io
import json

import pytest

from zenochain import cli
from zenochain.protocols import DetectorDist


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def record(out):
    return next(csv.DictReader(io.StringIO(out)))


def test_analytic(capsys):
    code, out, _ = run(["analytic", "--M", "25", "--t", "0.001"], capsys)
    assert code == 0
    r = record(out)
    assert float(r["C0"]) == pytest.approx(0.987, abs=5e-4)
    assert float(r["C1"]) == pytest.approx(0.905959159425, abs=1e-11)
    assert r["slaz_p2"] == ""


def test_analytic_m1_and_json(capsys):
    code, out, _ = run(["analytic", "--M", "1", "--format", "json"], capsys)
    assert code == 0
    assert json.loads(out)["C1"] == pytest.approx(0.0, abs=1e-30)


@pytest.mark.parametrize("argv", [["analytic", "--M", "0"], ["analytic"]])
def test_analytic_bad_args(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 1 and "usage" in err


def test_argparse_errors_exit_1():
    with pytest.raises(SystemExit) as exc:
        cli.main(["analytic", "--M", "x"])
    assert exc.value.code == 1


def test_run_commands(capsys):
    code, out, _ = run(["run", "--protocol", "improved", "--M", "25", "--bob", "pass", "--mask", "none"], capsys)
    assert code == 0 and float(record(out)["D2"]) == pytest.approx(1.0, abs=1e-12)
    code, out, _ = run(["run", "--protocol", "slaz", "--M", "25", "--N", "320", "--bob", "block", "--mask", "none"], capsys)
    assert code == 0 and float(record(out)["D2"]) == pytest.approx(0.912, abs=1e-2)
    code, out, _ = run(["run", "--protocol", "improved", "--M", "25", "--bob", "pass", "--mask", "13", "--c", "0"], capsys)
    assert code == 0 and float(record(out)["D2"]) == pytest.approx(0.2195, abs=1e-4)
    assert float(record(out)["total"]) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("mask", ["3,x", "40", ",", "some"])
def test_run_malformed_mask(mask, capsys):
    code, _, err = run(["run", "--M", "25", "--mask", mask], capsys)
    assert code == 1


def test_run_conservation_failure_exits_2(monkeypatch, capsys):
    monkeypatch.setattr(cli, "improved_run", lambda *a, **k: DetectorDist(D1=0.5))
    code, _, err = run(["run", "--M", "5"], capsys)
    assert code == 2 and "conservation" in err


def test_config_precedence(tmp_path, capsys):
    conf = tmp_path / "run.conf"
    conf.write_text("# Bob blocks\nM = 25\nbob = block\nc = 0.0\nformat = json\n")
    code, out, _ = run(["run", "--config", str(conf)], capsys)
    assert code == 0
    assert json.loads(out)["D1"] == pytest.approx(0.905959159425, abs=1e-11)
    code, out, _ = run(["run", "--config", str(conf), "--bob", "pass"], capsys)
    assert json.loads(out)["D2"] == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("text", ["M 25\n", "colour = red\n", "M = twenty\n"])
def test_bad_config(tmp_path, text, capsys):
    conf = tmp_path / "bad.conf"
    conf.write_text(text)
    code, _, _ = run(["analytic", "--config", str(conf)], capsys)
    assert code == 1


def test_missing_config_file(tmp_path, capsys):
    code, _, err = run(["analytic", "--M", "3", "--config", str(tmp_path / "nope")], capsys)
    assert code == 1 and "file error" in err


def test_table1(tmp_path, capsys):
    out_file = tmp_path / "t1.csv"
    code, out, _ = run(["table1", "--out", str(out_file)], capsys)
    assert code == 0
    assert len(out_file.read_text().splitlines()) == 41
    assert "part I: 20 cells, 0 flagged" in out


def test_table1_regression_exit_3(tmp_path, monkeypatch, capsys):
    monkeypatch.setitem(cli.ex.EXPECTED_C0, (0.001, 25), 0.5)
    code, out, _ = run(["table1", "--out", str(tmp_path / "t.csv")], capsys)
    assert code == 3 and "FLAG part I" in out


def test_fig3(tmp_path, capsys):
    code, out, _ = run(["fig3", "--out", str(tmp_path / "f3.csv")], capsys)
    assert code == 0 and "FAIL" not in out
    assert len((tmp_path / "f3.csv").read_text().splitlines()) == 1 + 4 * 126


def test_fig4_needs_seed_and_trials(tmp_path, capsys):
    assert run(["fig4", "--out", str(tmp_path / "a.csv")], capsys)[0] == 1
    assert run(["fig4", "--out", str(tmp_path / "a.csv"), "--seed", "1", "--trials", "0"], capsys)[0] == 1
    assert run(["fig4", "--out", str(tmp_path / "a.csv"), "--seed", "-1"], capsys)[0] == 1


def test_fig4_small_run(tmp_path, capsys):
    out_file = tmp_path / "f4.csv"
    argv = ["fig4", "--out", str(out_file), "--seed", "3", "--trials", "2000", "--B-step", "0.5"]
    code, out, _ = run(argv, capsys)
    assert code == 0
    rows = list(csv.DictReader(out_file.open()))
    assert len(rows) == 4 * 3 * 2
    meta = json.loads((tmp_path / "f4.csv.meta.json").read_text())
    assert meta["seed"] == 3 and meta["B_grid"] == [0.0, 0.5, 1.0]
    assert "claim" in out


def test_unwritable_output(tmp_path, capsys):
    code, _, err = run(["table1", "--out", str(tmp_path / "no" / "t.csv")], capsys)
    assert code == 1 and "file error" in err


@pytest.mark.parametrize(
    "cmd, phrase",
    [("analytic", "C0"), ("run", "detector"), ("table1", "p2"), ("fig3", "C0 as a function of M"), ("fig4", "noise rate B")],
)
def test_help_names_reproduced_quantity(cmd, phrase, capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main([cmd, "--help"])
    assert exc.value.code == 0
    assert phrase in capsys.readouterr().out.replace("\n", " ").replace("  ", " ")

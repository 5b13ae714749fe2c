import csv
import json

import pytest

from zenochain import experiments as ex
from zenochain.montecarlo import McConfig
from zenochain.protocols import slaz_p1


@pytest.fixture(scope="module")
def table1():
    return ex.gen_table1()


def test_table1_shape(table1):
    rows, report = table1
    assert len(rows) == 40 and len(report.cells) == 40
    assert sum(r.protocol == "improved" for r in rows) == 20


@pytest.mark.parametrize(
    "part, param, M, expected",
    [("I", 0.0001, 75, 0.996), ("II", 2500, 100, 0.953), ("I", 0.00005, 25, 0.999)],
)
def test_table1_cells(table1, part, param, M, expected):
    _, report = table1
    (cell,) = [c for c in report.cells if (c.part, c.param, c.M) == (part, param, M)]
    assert cell.expected == expected
    assert cell.deviation <= (ex.TOL_C0 if part == "I" else ex.TOL_P2)


def test_table1_has_no_part_one_flags(table1):
    _, report = table1
    assert report.ok
    assert not [c for c in report.flags if c.part == "I"]
    assert "part I: 20 cells, 0 flagged" in report.summary()


def test_table1_audit_lists_loose_part_two_cells(table1):
    _, report = table1
    assert all(c.part == "II" and c.deviation > ex.AUDIT_P2 for c in report.audit)
    for c in report.audit:
        assert f"N={c.param:g}, M={c.M}" in report.summary()


def test_report_flags_a_bad_cell():
    report = ex.Table1Report([ex.CellCheck("I", 0.001, 25, 0.99, 0.987, ex.TOL_C0)])
    assert not report.ok
    assert "FLAG part I" in report.summary()


def test_sweep_c0_endpoints_and_order():
    rows = ex.sweep_c0([1e-3], range(25, 151))
    assert rows[0].value == pytest.approx(0.987, abs=5e-4)
    assert rows[-1].value == pytest.approx(0.927, abs=5e-4)
    assert all(r.value == 1.0 for r in ex.sweep_c0([0.0], range(1, 40)))
    rows = ex.sweep_c0(list(ex.T_VALUES), range(25, 151))
    assert all(ok for _, ok in ex.fig3_checks(rows))
    with pytest.raises(ValueError):
        ex.sweep_c0([], range(3))


def test_fig3_checks_catch_violations():
    rows = [ex.SweepRow("improved", 1, 0.9, t=0.1), ex.SweepRow("improved", 2, 0.95, t=0.1)]
    assert not all(ok for _, ok in ex.fig3_checks(rows))


def test_render_header_only():
    assert ex.render([], "csv") == ",".join(ex.COLUMNS) + "\n"
    assert json.loads(ex.render([], "json")) == []


def test_render_fields_and_order():
    rows = [
        ex.SweepRow("slaz", 25, 0.9054711116401234, N=320),
        ex.SweepRow("improved", 50, 1 / 3, t=0.001),
        ex.SweepRow("improved", 25, 2 / 3, B=0.05, c=0.0, trials=10, seed=7, stderr=0.01),
        ex.SweepRow("improved", 25, 0.5, B=0.05, c=0.0),
    ]
    text = ex.render(rows, "csv")
    assert "\r" not in text
    parsed = list(csv.DictReader(text.splitlines()))
    assert [r["protocol"] for r in parsed] == ["improved", "improved", "improved", "slaz"]
    assert parsed[0]["trials"] == "" and parsed[1]["trials"] == "10"
    assert parsed[2]["value"] == "0.333333333333"
    assert parsed[3]["value"] == "0.90547111164"
    objs = json.loads(ex.render(rows, "json"))
    assert "N" not in objs[0] and objs[3]["N"] == 320
    assert list(objs[1]) == [c for c in ex.COLUMNS if c in objs[1]]
    with pytest.raises(ValueError):
        ex.render(rows, "xml")


def test_emit_is_deterministic(tmp_path, table1):
    rows, _ = table1
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    ex.emit(rows, "csv", a)
    ex.emit(list(reversed(rows)), "csv", b)
    assert a.read_bytes() == b.read_bytes()
    assert len(a.read_text().splitlines()) == 41


def test_emit_reports_io_failure(tmp_path):
    with pytest.raises(OSError):
        ex.emit([], "csv", tmp_path / "missing" / "x.csv")


@pytest.fixture(scope="module")
def small_noise_rows():
    cfg = ex.NoiseSweepConfig(
        seed=5,
        trials=200,
        B_grid=(0.0, 0.1, 1.0),
        configs=(McConfig.improved(25), McConfig.improved(50), McConfig.slaz(25, 320)),
    )
    return ex.sweep_noise(cfg)


def test_sweep_noise_rows(small_noise_rows):
    rows = small_noise_rows
    assert len(rows) == 3 * 3 * 2
    mc = {(r.protocol, r.M, r.B): r for r in rows if r.trials is not None}
    assert mc[("improved", 25, 0.0)].value == pytest.approx(1.0, abs=1e-12)
    assert mc[("slaz", 25, 0.0)].value == pytest.approx(slaz_p1(25), abs=1e-12)
    assert mc[("improved", 25, 1.0)].value == 0.0
    assert all(r.seed == 5 and r.stderr is not None for r in mc.values())
    assert all(r.c is None for r in rows if r.protocol == "slaz")


def test_fig4_regression_and_claims(small_noise_rows):
    assert all(ok for _, ok in ex.fig4_regression(small_noise_rows))
    claims = dict(ex.fig4_claims(small_noise_rows))
    assert claims["B=0.1: improved M=25 >= improved M=50"]
    assert claims["B=0: improved M=25 >= slaz M=25 N=320"]
    assert claims["B=0.1: improved M=25 >= slaz M=25 N=320"]


def test_sweep_noise_rejects_zero_trials():
    with pytest.raises(ValueError):
        ex.sweep_noise(ex.NoiseSweepConfig(seed=1, trials=0))


def test_expected_table_is_complete():
    assert {M for _, M in ex.EXPECTED_C0} == set(ex.M_GRID)
    assert {t for t, _ in ex.EXPECTED_C0} == set(ex.T_VALUES)
    assert {N for N, _ in ex.EXPECTED_P2} == set(ex.N_VALUES)

"""Timing harness: table mechanics, speedup arithmetic, CSV layout."""

import dataclasses

import numpy as np
import pytest

from fracsim import (
    DEFAULT_LCR,
    Problem,
    TimingRow,
    TimingTable,
    ValidationError,
    make_lcr_rhs,
    speedup_report,
    time_solve,
    write_timing_csv,
)


def small_problem(steps=200):
    return Problem(
        dim=2,
        orders=(0.9, 0.9),
        init=((0.1,), (0.1,)),
        rhs=make_lcr_rhs(dataclasses.replace(DEFAULT_LCR, f=0.125)),
        horizon=2.0,
        steps=steps,
    )


# --- time_solve -----------------------------------------------------------


def test_time_solve_row_per_worker_count():
    table = time_solve(small_problem(), worker_counts=[1, 2], repeats=2)
    assert len(table) == 2
    by_workers = {row.workers: row for row in table}
    assert set(by_workers) == {1, 2}
    for row in table:
        assert row.n_steps == 200
        assert row.mode == "balanced"
        assert row.repeats == 2
        assert 0.0 < row.seconds_min <= row.seconds_median


def test_time_solve_respects_mode_and_single_repeat():
    table = time_solve(
        small_problem(steps=120), worker_counts=[2], repeats=1, mode="static_block"
    )
    (row,) = table.rows
    assert row.mode == "static_block"
    assert row.seconds_median == row.seconds_min


def test_time_solve_validation():
    problem = small_problem(steps=50)
    with pytest.raises(ValidationError):
        time_solve(problem, worker_counts=[1], repeats=0)
    with pytest.raises(ValidationError):
        time_solve(problem, worker_counts=[1], repeats=2.5)
    with pytest.raises(ValidationError):
        time_solve(problem, worker_counts=[], repeats=1)
    with pytest.raises(ValidationError):
        time_solve(problem, worker_counts=[1], repeats=1, mode="roundrobin")


# --- table mechanics ------------------------------------------------------


def synthetic_table():
    rows = (
        TimingRow(n_steps=100, workers=1, mode="balanced",
                  seconds_median=2.0, seconds_min=1.9, repeats=3),
        TimingRow(n_steps=100, workers=4, mode="balanced",
                  seconds_median=0.5, seconds_min=0.5, repeats=3),
        TimingRow(n_steps=200, workers=1, mode="balanced",
                  seconds_median=8.0, seconds_min=7.5, repeats=3),
    )
    return TimingTable(rows=rows)


def test_cell_lookup_and_miss():
    table = synthetic_table()
    assert table.cell(100, 4).seconds_median == 0.5
    with pytest.raises(ValidationError) as excinfo:
        table.cell(100, 8)
    message = str(excinfo.value)
    assert "N=100" in message and "workers=8" in message


def test_merged_concatenates_rows():
    table = synthetic_table()
    extra = TimingTable(
        rows=(
            TimingRow(n_steps=400, workers=1, mode="balanced",
                      seconds_median=32.0, seconds_min=31.0, repeats=3),
        )
    )
    merged = table.merged(extra)
    assert len(merged) == 4
    assert merged.cell(400, 1).seconds_median == 32.0
    # originals untouched
    assert len(table) == 3 and len(extra) == 1


def test_timing_row_validation():
    with pytest.raises(ValidationError):
        TimingRow(n_steps=10, workers=1, mode="balanced",
                  seconds_median=0.0, seconds_min=0.0, repeats=3)
    with pytest.raises(ValidationError):
        TimingRow(n_steps=10, workers=1, mode="balanced",
                  seconds_median=1.0, seconds_min=1.0, repeats=0)


# --- speedup arithmetic ---------------------------------------------------


def test_speedup_report_exact_arithmetic():
    report = speedup_report(synthetic_table())
    by_cell = {(r.n_steps, r.workers): r for r in report}
    assert by_cell[(100, 1)].speedup == 1.0
    assert by_cell[(100, 4)].speedup == 4.0
    assert by_cell[(100, 4)].efficiency == 1.0
    assert by_cell[(200, 1)].speedup == 1.0
    assert by_cell[(100, 1)].efficiency == 1.0


def test_speedup_baselines_match_per_group():
    # N=200 has its own baseline; N=100's 2.0 s must not leak into it.
    rows = synthetic_table().rows + (
        TimingRow(n_steps=200, workers=2, mode="balanced",
                  seconds_median=4.0, seconds_min=4.0, repeats=3),
    )
    report = speedup_report(TimingTable(rows=rows))
    by_cell = {(r.n_steps, r.workers): r for r in report}
    assert by_cell[(200, 2)].speedup == 2.0
    assert by_cell[(200, 2)].efficiency == 1.0


def test_speedup_requires_matching_baseline():
    orphan = TimingTable(
        rows=(
            TimingRow(n_steps=100, workers=4, mode="static_block",
                      seconds_median=0.5, seconds_min=0.5, repeats=3),
        )
    )
    with pytest.raises(ValidationError) as excinfo:
        speedup_report(orphan)
    assert "baseline" in str(excinfo.value)


def test_speedup_report_text_layout():
    text = speedup_report(synthetic_table()).to_text()
    lines = text.splitlines()
    assert lines[0].split() == ["N", "workers", "mode", "median", "s", "speedup", "effcy"]
    assert len(lines) == 4
    assert "4.000" in text  # speedup of the four-worker cell


# --- CSV output -----------------------------------------------------------


def test_timing_csv_layout_and_round_trip(tmp_path):
    path = tmp_path / "timing.csv"
    write_timing_csv(synthetic_table(), path)
    lines = path.read_text().splitlines()
    assert lines[0] == "n_steps,workers,mode,seconds_median,seconds_min,repeats"
    assert len(lines) == 4
    first = lines[1].split(",")
    assert first[0] == "100" and first[1] == "1" and first[2] == "balanced"
    assert float(first[3]) == 2.0 and float(first[4]) == 1.9 and first[5] == "3"
    data = np.genfromtxt(path, delimiter=",", names=True,
                         dtype=None, encoding="utf-8")
    assert list(data["n_steps"]) == [100, 100, 200]
    assert list(data["seconds_median"]) == [2.0, 0.5, 8.0]

"""Timing harness: wall-clock tables and speedup/efficiency reports.

Desk machines are noisy, so every cell is the median of repeated runs with
an excluded warm-up; absolute numbers are host-bound and only the structure
(quadratic growth in N, speedup trends across worker counts) is meaningful.
The harness never touches numerical output: it times the same deterministic
solves the rest of the package runs.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass
from typing import Sequence

from ._textio import fmt17, open_for_write
from .errors import ValidationError
from .parallel import solve_parallel
from .partition import MODES, PartitionPlan
from .problem import Problem

__all__ = [
    "TimingRow",
    "TimingTable",
    "time_solve",
    "SpeedupRow",
    "SpeedupReport",
    "speedup_report",
    "write_timing_csv",
]


@dataclass(frozen=True, slots=True)
class TimingRow:
    n_steps: int
    workers: int
    mode: str
    seconds_median: float
    seconds_min: float
    repeats: int

    def __post_init__(self):
        if self.seconds_median <= 0 or self.seconds_min <= 0:
            raise ValidationError("timing rows need positive wall seconds")
        if self.repeats < 1:
            raise ValidationError("timing rows need repeats >= 1")


@dataclass(frozen=True, slots=True)
class TimingTable:
    """Timing rows, one per (N, workers, mode) cell; concatenable."""

    rows: tuple[TimingRow, ...]

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def merged(self, other: "TimingTable") -> "TimingTable":
        return TimingTable(rows=self.rows + other.rows)

    def cell(self, n_steps: int, workers: int, mode: str = "balanced") -> TimingRow:
        for row in self.rows:
            if row.n_steps == n_steps and row.workers == workers and row.mode == mode:
                return row
        raise ValidationError(
            f"no timing row for N={n_steps}, workers={workers}, mode={mode}"
        )


def time_solve(
    problem: Problem,
    worker_counts: Sequence[int],
    repeats: int = 3,
    mode: str = "balanced",
    warmup: bool = True,
) -> TimingTable:
    """Median/min wall time per worker count for one problem.

    Every run solves the identical problem through the worker engine (one
    worker reproduces the sequential path bit for bit, so the baseline is
    honest).  The warm-up run per cell is excluded from statistics; it
    absorbs compilation and first-touch effects.

    Raises:
        ValidationError: repeats < 1, empty worker_counts, bad mode.
    """
    if not isinstance(repeats, int) or repeats < 1:
        raise ValidationError(f"repeats must be a positive integer, got {repeats!r}")
    counts = [int(p) for p in worker_counts]
    if not counts:
        raise ValidationError("worker_counts must not be empty")
    if mode not in MODES:
        raise ValidationError(f"mode must be one of {MODES}, got {mode!r}")
    rows = []
    for workers in counts:
        plan = PartitionPlan(workers=workers, mode=mode)
        if warmup:
            solve_parallel(problem, plan)
        seconds = []
        for _ in range(repeats):
            start = time.perf_counter()
            solve_parallel(problem, plan)
            seconds.append(time.perf_counter() - start)
        rows.append(
            TimingRow(
                n_steps=problem.steps,
                workers=workers,
                mode=mode,
                seconds_median=statistics.median(seconds),
                seconds_min=min(seconds),
                repeats=repeats,
            )
        )
    return TimingTable(rows=tuple(rows))


@dataclass(frozen=True, slots=True)
class SpeedupRow:
    n_steps: int
    workers: int
    mode: str
    seconds_median: float
    speedup: float
    efficiency: float


@dataclass(frozen=True, slots=True)
class SpeedupReport:
    rows: tuple[SpeedupRow, ...]

    def __iter__(self):
        return iter(self.rows)

    def to_text(self) -> str:
        lines = [
            f"{'N':>10} {'workers':>8} {'mode':>12} {'median s':>12} {'speedup':>8} {'effcy':>6}"
        ]
        for r in self.rows:
            lines.append(
                f"{r.n_steps:>10d} {r.workers:>8d} {r.mode:>12} "
                f"{r.seconds_median:>12.4f} {r.speedup:>8.3f} {r.efficiency:>6.3f}"
            )
        return "\n".join(lines)


def speedup_report(table: TimingTable) -> SpeedupReport:
    """speedup(P) = median(1 worker) / median(P workers), efficiency = speedup/P.

    Baselines are matched per (N, mode).

    Raises:
        ValidationError: some (N, mode) group lacks a one-worker baseline.
    """
    baselines: dict[tuple[int, str], float] = {}
    for row in table:
        if row.workers == 1:
            baselines[(row.n_steps, row.mode)] = row.seconds_median
    rows = []
    for row in table:
        base = baselines.get((row.n_steps, row.mode))
        if base is None:
            raise ValidationError(
                f"missing one-worker baseline for N={row.n_steps}, mode={row.mode}"
            )
        speedup = base / row.seconds_median
        rows.append(
            SpeedupRow(
                n_steps=row.n_steps,
                workers=row.workers,
                mode=row.mode,
                seconds_median=row.seconds_median,
                speedup=speedup,
                efficiency=speedup / row.workers,
            )
        )
    return SpeedupReport(rows=tuple(rows))


def write_timing_csv(table: TimingTable, path) -> None:
    """n_steps,workers,mode,seconds_median,seconds_min,repeats."""
    with open_for_write(path) as fh:
        fh.write("n_steps,workers,mode,seconds_median,seconds_min,repeats\n")
        for r in table:
            fh.write(
                f"{r.n_steps},{r.workers},{r.mode},{fmt17(r.seconds_median)},"
                f"{fmt17(r.seconds_min)},{r.repeats}\n"
            )

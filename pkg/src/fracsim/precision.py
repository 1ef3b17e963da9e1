"""Dual-width runs: solve the same problem at two precisions and compare.

Fast 64-bit runs are for the overall view; the extended rerun quantifies
what the narrower arithmetic cost.  Both runs follow the identical
algorithmic path (same partition, same summation order), so the divergence
isolates accumulation effects.

Extended means >= 18 significant decimal digits.  On hosts whose native
long double carries that (x86's 80-bit format), the hardware path is used;
otherwise a software arbitrary-precision path stands in.  The contract is
digits, not bit layout.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import _engine
from ._textio import fmt17, open_for_write
from .errors import UnsupportedPrecisionError, ValidationError
from .partition import PartitionPlan
from .problem import Problem, Trajectory

__all__ = [
    "HARDWARE_EXTENDED_DIGITS",
    "HAS_HARDWARE_EXTENDED",
    "DivergenceReport",
    "resolve_width",
    "solve_with_width",
    "run_dual_precision",
    "write_divergence_csv",
]

#: Decimal digits of the host's long double type.
HARDWARE_EXTENDED_DIGITS: int = np.finfo(np.longdouble).precision

#: Whether the host's long double meets the extended contract (>= 18 digits).
HAS_HARDWARE_EXTENDED: bool = HARDWARE_EXTENDED_DIGITS >= 18

WIDTHS = ("f64", "extended", "extended-hw", "extended-sw")

#: Software-path working precision, decimal digits.
SOFTWARE_DPS = 30


def resolve_width(name: str) -> str:
    """Map a requested width to a concrete implementation name.

    'f64' stays itself; 'extended' picks 'extended-hw' when the host's long
    double carries >= 18 digits and 'extended-sw' otherwise; the explicit
    forms demand that implementation.

    Raises:
        UnsupportedPrecisionError: unknown name, or 'extended-hw' on a host
            without a wide long double (the message names the software
            fallback to request instead).
    """
    if name == "f64":
        return "f64"
    if name == "extended":
        return "extended-hw" if HAS_HARDWARE_EXTENDED else "extended-sw"
    if name == "extended-hw":
        if not HAS_HARDWARE_EXTENDED:
            raise UnsupportedPrecisionError(
                f"hardware extended precision is unavailable on this host (long double "
                f"carries {HARDWARE_EXTENDED_DIGITS} digits, the contract needs >= 18); "
                f"use 'extended-sw' (software extended) or 'extended' to auto-select"
            )
        return "extended-hw"
    if name == "extended-sw":
        return "extended-sw"
    raise UnsupportedPrecisionError(
        f"unsupported precision {name!r}; supported widths: {', '.join(WIDTHS)} "
        f"('extended' falls back to software when no >= 18-digit hardware type exists)"
    )


def solve_with_width(
    problem: Problem, plan: PartitionPlan | None, width: str
) -> Trajectory:
    """Run the engine matching a resolved width name."""
    impl = resolve_width(width)
    if impl == "f64":
        return _engine.solve_f64(problem, plan)
    if impl == "extended-hw":
        return _engine.solve_longdouble(problem, plan)
    return _engine.solve_mpf(problem, plan, dps=SOFTWARE_DPS)


@dataclass(frozen=True, slots=True)
class DivergenceReport:
    """Outcome of a dual-width run.

    divergence[n] is the max abs component difference at step n;
    cumulative_max is its running maximum (non-decreasing by construction).
    first_exceedance is the first step with divergence > threshold, or None.
    wall_times aligns with widths/resolved positionally.
    """

    widths: tuple[str, str]
    resolved: tuple[str, str]
    times: np.ndarray
    divergence: np.ndarray
    cumulative_max: np.ndarray
    threshold: float | None
    first_exceedance: int | None
    wall_times: tuple[float, float]

    @property
    def final_divergence(self) -> float:
        return float(self.cumulative_max[-1])


def run_dual_precision(
    problem: Problem,
    plan: PartitionPlan | None = None,
    widths: tuple[str, str] = ("f64", "extended"),
    threshold: float | None = None,
) -> DivergenceReport:
    """Solve twice, once per width, and report per-step divergence and timings.

    Identical widths give identically zero divergence (same code path, same
    bits).  In chaotic regimes divergence growth is expected; this function
    reports, it never judges.

    Raises:
        UnsupportedPrecisionError: a width is unknown or unavailable.
        ValidationError: widths is not a pair, or threshold is not positive.
    """
    if len(widths) != 2:
        raise ValidationError(f"widths must be a pair of precision modes, got {widths!r}")
    if threshold is not None and not threshold > 0:
        raise ValidationError(
            f"divergence threshold must be positive, got {threshold!r}"
        )
    resolved = (resolve_width(widths[0]), resolve_width(widths[1]))
    trajectories = []
    walls = []
    for impl in resolved:
        start = time.perf_counter()
        trajectories.append(solve_with_width(problem, plan, impl))
        walls.append(time.perf_counter() - start)

    lo = trajectories[0].states.astype(np.longdouble)
    hi = trajectories[1].states.astype(np.longdouble)
    divergence = np.abs(lo - hi).max(axis=1).astype(np.float64)
    cumulative = np.maximum.accumulate(divergence)
    first = None
    if threshold is not None:
        above = divergence > threshold
        if above.any():
            first = int(np.argmax(above))
    return DivergenceReport(
        widths=(widths[0], widths[1]),
        resolved=resolved,
        times=trajectories[0].times.astype(np.float64),
        divergence=divergence,
        cumulative_max=cumulative,
        threshold=threshold,
        first_exceedance=first,
        wall_times=(walls[0], walls[1]),
    )


def write_divergence_csv(report: DivergenceReport, path) -> None:
    """step,t,divergence,cumulative_max at 17 significant digits."""
    with open_for_write(path) as fh:
        fh.write("step,t,divergence,cumulative_max\n")
        for n in range(len(report.divergence)):
            fh.write(
                f"{n},{fmt17(report.times[n])},{fmt17(report.divergence[n])},"
                f"{fmt17(report.cumulative_max[n])}\n"
            )

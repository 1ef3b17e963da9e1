"""Worker-partitioned history sums with a deterministic all-reduce.

Each step's predictor/corrector sums are split across P workers; every
worker computes its chunk's partial sums, and a rank-ordered left fold
combines them, so the result depends only on (problem, plan) -- never on
thread scheduling.  With one worker the fold is the identity and the solve
is bit-identical to the sequential engine: both run the same compiled chunk
kernel over the same index range.

This is a one-process emulation of a masterless message-passing design:
shared read-only history instead of messages, the fold instead of a network
all-reduce, and a step-boundary append by a single writer instead of a
barrier-protected exchange.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _engine
from .errors import ValidationError
from .partition import MODES, PartitionPlan
from .problem import Problem, Trajectory
from .solver import _as_history, _per_component
from .weights import WeightTable

__all__ = [
    "PartitionPlan",
    "PartialSums",
    "partial_sums",
    "reduce_all",
    "solve_parallel",
    "MODES",
]


@dataclass(frozen=True, slots=True)
class PartialSums:
    """One worker's contribution to a step's history sums.

    sp[i]: sum of b_{n-k} f_k[i] over the worker's chunk.
    sc[i]: sum of a_{n-k} f_k[i] over the chunk for k >= 1, plus c_n f_0[i]
    when the chunk contains k = 0.  Zero vectors for an empty chunk.
    """

    sp: np.ndarray
    sc: np.ndarray

    def __post_init__(self):
        if self.sp.shape != self.sc.shape:
            raise ValidationError("sp and sc must have matching shapes")


def partial_sums(chunk: tuple[int, int], n: int, rhs_history, weights) -> PartialSums:
    """Reference chunk sums over history indices [chunk[0], chunk[1]).

    Pure-Python mirror of the compiled kernel, accumulating ascending in k
    with one chain per component; IEEE doubles make it bit-identical to the
    engine for float64 history.  Intended for tests and small interactive
    use -- the engine computes these inline.

    Raises:
        ValidationError: chunk not contained in [0, n+1).
    """
    lo, hi = int(chunk[0]), int(chunk[1])
    if lo < 0 or hi > n + 1 or lo > hi:
        raise ValidationError(
            f"chunk [{lo}, {hi}) must lie within the history range [0, {n + 1})"
        )
    hist = _as_history(rhs_history, n)
    d = hist.shape[1]
    tables = _per_component(weights, d)
    dtype = hist.dtype if hist.dtype in (np.float64, np.longdouble) else np.float64
    sp = np.zeros(d, dtype=dtype)
    sc = np.zeros(d, dtype=dtype)
    for i, wt in enumerate(tables):
        b = np.asarray(wt.b, dtype=dtype)
        a = np.asarray(wt.a, dtype=dtype)
        c = np.asarray(wt.c, dtype=dtype)
        f = np.ascontiguousarray(hist[:, i], dtype=dtype)
        if lo == hi:
            continue
        if lo == 0:
            s1 = b[n] * f[0]
            s2 = c[n] * f[0]
            start = 1
        else:
            s1 = b[n - lo] * f[lo]
            s2 = a[n - lo] * f[lo]
            start = lo + 1
        for k in range(start, hi):
            s1 = s1 + b[n - k] * f[k]
            s2 = s2 + a[n - k] * f[k]
        sp[i] = s1
        sc[i] = s2
    return PartialSums(sp=sp, sc=sc)


def reduce_all(partials: Sequence[PartialSums]) -> PartialSums:
    """Deterministic all-reduce: component-wise left fold in rank order.

    result = ((p_0 + p_1) + p_2) + ...; a single entry is returned as-is.
    Every caller sees the identical value -- the one-process stand-in for a
    collective where all ranks obtain the same total.
    """
    if not partials:
        raise ValidationError("reduce_all needs at least one worker's partial sums")
    sp = partials[0].sp.astype(partials[0].sp.dtype, copy=True)
    sc = partials[0].sc.astype(partials[0].sc.dtype, copy=True)
    for part in partials[1:]:
        if part.sp.shape != sp.shape:
            raise ValidationError("all partial sums must have the same dimension")
        sp = sp + part.sp
        sc = sc + part.sc
    sp.setflags(write=False)
    sc.setflags(write=False)
    return PartialSums(sp=sp, sc=sc)


def solve_parallel(
    problem: Problem,
    plan: PartitionPlan,
    store_predictor: bool = False,
) -> Trajectory:
    """Solve with the history sums partitioned across plan.workers.

    States match solve_sequential within floating-point reassociation
    tolerance; a one-worker balanced plan is bit-identical to it.  Output is
    a pure function of (problem, plan): repeated runs produce identical
    bytes regardless of thread count or scheduling.
    """
    if not isinstance(plan, PartitionPlan):
        raise ValidationError(f"plan must be a PartitionPlan, got {type(plan).__name__}")
    return _engine.solve_f64(problem, plan=plan, store_predictor=store_predictor)

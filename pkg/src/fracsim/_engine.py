"""Solve drivers shared by the sequential and parallel entry points.

Three implementations of the same step recurrence, selected by precision:

* float64: compiled kernels from ``_kernels`` (the production path),
* long double: numpy long-double dot products per chunk (hardware extended),
* mpf: arbitrary-precision software arithmetic (fallback extended).

All three follow the identical algorithmic path -- same partition, same
ascending per-chunk accumulation, same rank-ordered fold -- so precision is
the only thing that differs between them.
"""

from __future__ import annotations

import math

import mpmath
import numpy as np
import numba as nb

from . import _kernels
from .errors import NonFiniteStateError, ValidationError
from .partition import PartitionPlan
from .problem import Problem, Trajectory, freeze_trajectory
from .weights import build_weights_mpf, tables_for_orders


def _setup(problem: Problem, dtype):
    """Stacked per-component weight tables in engine layout."""
    d = problem.dim
    N = problem.steps
    L = N + 2
    tables = tables_for_orders(problem.orders, N, dtype=dtype)
    bR = np.empty((d, L), dtype=dtype)
    aR = np.empty((d, L), dtype=dtype)
    cS = np.empty((d, L), dtype=dtype)
    h_al = np.empty(d, dtype=dtype)
    inv_ga2 = np.empty(d, dtype=dtype)
    h = dtype(problem.horizon) / dtype(N)
    for i, wt in enumerate(tables):
        bR[i] = wt.b[::-1]
        aR[i] = wt.a[::-1]
        cS[i] = wt.c
        h_al[i] = h ** dtype(problem.orders[i])
        inv_ga2[i] = wt.inv_gamma_a2

    tay0 = np.array([entry[0] for entry in problem.init], dtype=dtype)
    tay1 = np.zeros(d, dtype=dtype)
    has_depth2 = False
    for i, entry in enumerate(problem.init):
        if len(entry) > 1:
            tay1[i] = entry[1]
            has_depth2 = True
    return bR, aR, cS, h_al, inv_ga2, tay0, tay1, has_depth2, h


def _eval_rhs(problem: Problem, t, y, dtype) -> np.ndarray:
    out = np.asarray(problem.rhs(t, y), dtype=dtype)
    if out.shape != (problem.dim,):
        raise ValidationError(
            f"rhs must return {problem.dim} value(s), got shape {out.shape}"
        )
    return out


def solve_f64(
    problem: Problem,
    plan: PartitionPlan | None = None,
    store_predictor: bool = False,
) -> Trajectory:
    """Production 64-bit solve; plan=None runs the single-threaded driver."""
    dtype = np.float64
    d, N = problem.dim, problem.steps
    bR, aR, cS, h_al, inv_ga2, tay0, tay1, has_depth2, h = _setup(problem, dtype)

    times = h * np.arange(N + 1, dtype=dtype)
    states = np.empty((N + 1, d), dtype=dtype)
    fT = np.empty((d, N + 1), dtype=dtype)
    pred = np.full((N + 1, d), np.nan, dtype=dtype) if store_predictor else None

    states[0] = tay0
    fT[:, 0] = _eval_rhs(problem, times[0], states[0].copy(), dtype)

    out = np.empty((2, d), dtype=dtype)
    cn = np.empty(d, dtype=dtype)

    if plan is not None:
        P = plan.workers
        mode = _kernels.BALANCED if plan.mode == "balanced" else _kernels.STATIC_BLOCK
        block = plan.block_size(N) if plan.mode == "static_block" else 0
        partials = np.empty((P, 2, d), dtype=dtype)
        prev_threads = nb.get_num_threads()
        nb.set_num_threads(max(1, min(P, prev_threads)))
    try:
        for n in range(N):
            t1 = times[n + 1]
            off = (N + 2) - 1 - n
            cn[:] = cS[:, n]
            if plan is None:
                _kernels.step_sums_seq(bR, aR, fT, cn, off, n + 1, out)
            else:
                _kernels.step_sums_par(bR, aR, fT, cn, off, n + 1, P, mode, block, partials)
                _kernels.fold_partials(partials, out)
            taylor = tay0 + t1 * tay1 if has_depth2 else tay0
            yP = taylor + h_al * out[0]
            fP = _eval_rhs(problem, t1, yP, dtype)
            y1 = taylor + h_al * (out[1] + fP * inv_ga2)
            if not np.isfinite(y1).all():
                raise NonFiniteStateError(n, float(times[n]))
            states[n + 1] = y1
            fT[:, n + 1] = _eval_rhs(problem, t1, y1, dtype)
            if pred is not None:
                pred[n + 1] = yP
    finally:
        if plan is not None:
            nb.set_num_threads(prev_threads)
    return freeze_trajectory(problem, times, states, fT, pred)


def _chunk_sums_dot(bR, aR, fT, cS, n, off, lo, hi, out_sp, out_sc, i):
    """Long-double chunk sums via numpy's sequential ascending dot."""
    if lo == 0:
        if hi > 0:
            out_sp[i] = np.dot(bR[i, off: off + hi], fT[i, 0:hi])
            sc = cS[i, n] * fT[i, 0]
            if hi > 1:
                sc = sc + np.dot(aR[i, off + 1: off + hi], fT[i, 1:hi])
            out_sc[i] = sc
        else:
            out_sp[i] = 0.0
            out_sc[i] = 0.0
    elif hi > lo:
        out_sp[i] = np.dot(bR[i, off + lo: off + hi], fT[i, lo:hi])
        out_sc[i] = np.dot(aR[i, off + lo: off + hi], fT[i, lo:hi])
    else:
        out_sp[i] = 0.0
        out_sc[i] = 0.0


def solve_longdouble(
    problem: Problem,
    plan: PartitionPlan | None = None,
    store_predictor: bool = False,
) -> Trajectory:
    """Hardware extended-precision solve (80-bit long double where available).

    Mirrors solve_f64 chunk for chunk: numpy's long-double dot accumulates
    ascending in a single chain, the same order the compiled kernel uses.
    """
    dtype = np.longdouble
    d, N = problem.dim, problem.steps
    bR, aR, cS, h_al, inv_ga2, tay0, tay1, has_depth2, h = _setup(problem, dtype)

    times = h * np.arange(N + 1, dtype=dtype)
    states = np.empty((N + 1, d), dtype=dtype)
    fT = np.empty((d, N + 1), dtype=dtype)
    pred = np.full((N + 1, d), np.nan, dtype=dtype) if store_predictor else None

    states[0] = tay0
    fT[:, 0] = _eval_rhs(problem, times[0], states[0].copy(), dtype)

    eff_plan = plan if plan is not None else PartitionPlan(1, "balanced")
    P = eff_plan.workers
    sp_parts = np.empty((P, d), dtype=dtype)
    sc_parts = np.empty((P, d), dtype=dtype)
    sp = np.empty(d, dtype=dtype)
    sc = np.empty(d, dtype=dtype)

    for n in range(N):
        t1 = times[n + 1]
        off = (N + 2) - 1 - n
        chunks = eff_plan.chunks(n, N)
        for p, (lo, hi) in enumerate(chunks):
            for i in range(d):
                _chunk_sums_dot(bR, aR, fT, cS, n, off, lo, hi, sp_parts[p], sc_parts[p], i)
        for i in range(d):
            s1 = sp_parts[0, i]
            s2 = sc_parts[0, i]
            for p in range(1, P):
                s1 += sp_parts[p, i]
                s2 += sc_parts[p, i]
            sp[i] = s1
            sc[i] = s2
        taylor = tay0 + t1 * tay1 if has_depth2 else tay0
        yP = taylor + h_al * sp
        fP = _eval_rhs(problem, t1, yP, dtype)
        y1 = taylor + h_al * (sc + fP * inv_ga2)
        if not np.isfinite(y1).all():
            raise NonFiniteStateError(n, float(times[n]))
        states[n + 1] = y1
        fT[:, n + 1] = _eval_rhs(problem, t1, y1, dtype)
        if pred is not None:
            pred[n + 1] = yP
    return freeze_trajectory(problem, times, states, fT, pred)


def _mpf_to_longdouble(x: "mpmath.mpf") -> np.longdouble:
    return np.longdouble(mpmath.nstr(x, 25))


def solve_mpf(
    problem: Problem,
    plan: PartitionPlan | None = None,
    dps: int = 30,
    store_predictor: bool = False,
) -> Trajectory:
    """Software extended-precision solve (arbitrary-precision arithmetic).

    Same algorithmic path as the native drivers; O(N^2) interpreted work, so
    intended for modest N or hosts lacking a wide hardware float.  The rhs is
    evaluated on mpf scalars; the built-in systems and parsed expressions
    support that.  Output arrays are rounded once to long double.
    """
    d, N = problem.dim, problem.steps
    with mpmath.workdps(dps):
        per_comp = [build_weights_mpf(a, N, dps=dps) for a in problem.orders]
        h = mpmath.mpf(problem.horizon) / N
        h_al = [h ** mpmath.mpf(a) for a in problem.orders]
        inv_ga2 = [w[4] for w in per_comp]
        tay0 = [mpmath.mpf(entry[0]) for entry in problem.init]
        tay1 = [mpmath.mpf(entry[1]) if len(entry) > 1 else mpmath.mpf(0) for entry in problem.init]
        has_depth2 = any(len(entry) > 1 for entry in problem.init)

        eff_plan = plan if plan is not None else PartitionPlan(1, "balanced")
        times = [h * k for k in range(N + 1)]
        states = [list(tay0)]
        preds: list[list] = []
        f_hist = [list(np.asarray(problem.rhs(times[0], np.array(tay0, dtype=object))))]

        for n in range(N):
            t1 = times[n + 1]
            sp = [mpmath.mpf(0)] * d
            sc = [mpmath.mpf(0)] * d
            for lo, hi in eff_plan.chunks(n, N):
                for i in range(d):
                    b, a, c = per_comp[i][0], per_comp[i][1], per_comp[i][2]
                    s1 = mpmath.mpf(0)
                    s2 = mpmath.mpf(0)
                    for k in range(lo, hi):
                        s1 += b[n - k] * f_hist[k][i]
                        s2 += (c[n] if k == 0 else a[n - k]) * f_hist[k][i]
                    sp[i] += s1
                    sc[i] += s2
            taylor = [tay0[i] + t1 * tay1[i] if has_depth2 else tay0[i] for i in range(d)]
            yP = [taylor[i] + h_al[i] * sp[i] for i in range(d)]
            fP = list(np.asarray(problem.rhs(t1, np.array(yP, dtype=object))))
            y1 = [taylor[i] + h_al[i] * (sc[i] + fP[i] * inv_ga2[i]) for i in range(d)]
            # Non-real results (negative base to a fractional power) count as
            # non-finite: the state left the real line.
            if not all(isinstance(v, mpmath.mpf) and mpmath.isfinite(v) for v in y1):
                raise NonFiniteStateError(n, float(times[n]))
            states.append(y1)
            if store_predictor:
                preds.append(yP)
            f_hist.append(list(np.asarray(problem.rhs(t1, np.array(y1, dtype=object)))))

        times_ld = np.array([_mpf_to_longdouble(t) for t in times], dtype=np.longdouble)
        states_ld = np.array(
            [[_mpf_to_longdouble(v) for v in row] for row in states], dtype=np.longdouble
        )
        fT_ld = np.array(
            [[_mpf_to_longdouble(f_hist[k][i]) for k in range(N + 1)] for i in range(d)],
            dtype=np.longdouble,
        )
    pred = None
    if store_predictor:
        pred = np.full((N + 1, d), np.nan, dtype=np.longdouble)
        for n, row in enumerate(preds):
            pred[n + 1] = [_mpf_to_longdouble(v) for v in row]
    return freeze_trajectory(problem, times_ld, states_ld, fT_ld, pred)

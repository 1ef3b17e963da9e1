"""Compiled history-sum kernels.

One scalar chunk kernel is the single source of truth for the summation
order: the sequential driver calls it over the whole history, the parallel
driver calls it once per worker chunk.  No fastmath anywhere -- the strict
IEEE evaluation order is what makes one-worker runs bit-identical to
sequential runs and every run reproducible.

Layout contract: weight rows are stored reversed (rev[L-1-m] = w_m), so
w_{n-k} sits at rev[off + k] with off = L-1-n and the inner loop walks a
contiguous ascending slice.
"""

import numba as nb
import numpy as np

# Thread count is capped by the plan's worker count at call sites via
# nb.set_num_threads; oversubscription beyond physical cores is allowed.

BALANCED = 0
STATIC_BLOCK = 1


@nb.njit(cache=True, inline="always")
def chunk_sums(bR, aR, fT, cn, off, lo, hi, out):
    """Predictor/corrector partial sums over history chunk [lo, hi).

    out[0, i] += nothing; overwritten: sum of b_{n-k} f_k over the chunk.
    out[1, i]: sum of a_{n-k} f_k for k >= 1, plus c_n f_0 when the chunk
    contains k = 0.  Ascending k, one accumulation chain per component.
    """
    d = fT.shape[0]
    for i in range(d):
        b = bR[i, off + lo: off + hi]
        a = aR[i, off + lo: off + hi]
        f = fT[i, lo:hi]
        m = hi - lo
        sp = 0.0
        sc = 0.0
        if lo == 0:
            if m > 0:
                sp = b[0] * f[0]
                sc = cn[i] * f[0]
                for k in range(1, m):
                    sp += b[k] * f[k]
                    sc += a[k] * f[k]
        else:
            for k in range(m):
                sp += b[k] * f[k]
                sc += a[k] * f[k]
        out[0, i] = sp
        out[1, i] = sc


@nb.njit(cache=True)
def step_sums_seq(bR, aR, fT, cn, off, n1, out):
    """Full-history sums for one step: the sequential engine's inner call."""
    chunk_sums(bR, aR, fT, cn, off, 0, n1, out)


@nb.njit(cache=True, parallel=True)
def step_sums_par(bR, aR, fT, cn, off, n1, P, mode, block, partials):
    """Per-worker chunk sums for one step.

    Chunk bounds are computed inline (no per-step allocation): balanced mode
    splits [0, n1) into P near-equal parts; static_block uses fixed blocks of
    ``block`` clamped to the available history.  partials[p] is written only
    by worker p, so the result is independent of thread scheduling.
    """
    for p in nb.prange(P):
        if mode == BALANCED:
            lo = (p * n1) // P
            hi = ((p + 1) * n1) // P
        else:
            lo = min(p * block, n1)
            hi = min((p + 1) * block, n1)
        chunk_sums(bR, aR, fT, cn, off, lo, hi, partials[p])


@nb.njit(cache=True)
def fold_partials(partials, out):
    """Rank-ordered left fold of worker partials: ((s_0 + s_1) + s_2) + ...

    The fixed order is the determinism guarantee; with one worker the result
    is partials[0] bit-for-bit.
    """
    P = partials.shape[0]
    d = partials.shape[2]
    for i in range(d):
        sp = partials[0, 0, i]
        sc = partials[0, 1, i]
        for p in range(1, P):
            sp += partials[p, 0, i]
            sc += partials[p, 1, i]
        out[0, i] = sp
        out[1, i] = sc


def warm_up(parallel: bool = False) -> None:
    """Trigger JIT compilation with a tiny call so timed runs start warm."""
    d = 1
    bR = np.ones((d, 4))
    aR = np.ones((d, 4))
    fT = np.ones((d, 3))
    cn = np.ones(d)
    out = np.zeros((2, d))
    step_sums_seq(bR, aR, fT, cn, 1, 2, out)
    if parallel:
        partials = np.zeros((2, 2, d))
        step_sums_par(bR, aR, fT, cn, 1, 2, 2, BALANCED, 1, partials)
        fold_partials(partials, out)

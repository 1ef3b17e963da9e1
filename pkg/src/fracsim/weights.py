"""Predictor-corrector coefficient tables for one fractional order.

The scheme advancing a Caputo-type system needs three weight sequences per
order alpha:

    b_n = ((n+1)^a - n^a) / Gamma(a+1)                      (predictor)
    a_n = ((n+2)^(a+1) - 2(n+1)^(a+1) + n^(a+1)) / Gamma(a+2)  (corrector, k >= 1)
    c_n = (n^(a+1) - (n-a)(n+1)^a) / Gamma(a+2)             (corrector, k = 0 term)

All three are precomputed once for the full horizon and shared read-only by
every worker; per-term access during the history sums is then O(1).

The inner expressions are second differences of nearly-equal large powers and
lose digits in 64-bit arithmetic for large n, so every table is computed in
the widest native precision available (80-bit long double on x86) and then
narrowed to the requested dtype.  The two gamma constants are sourced from a
50-digit arbitrary-precision evaluation and rounded once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import mpmath
import numpy as np

from .errors import ValidationError

_ALPHA_RANGE_MSG = "order alpha must satisfy 0 < alpha <= 2, got {!r}"
_COUNT_MSG = "weight count must be a positive integer, got {!r}"

#: Decimal digits used for the gamma constants; far beyond long double.
_GAMMA_DPS = 50


@dataclass(frozen=True, slots=True)
class WeightTable:
    """Immutable coefficient table for one fractional order.

    Fields:
        alpha: the order, 0 < alpha <= 2.
        length: number of entries in each sequence (count + 2).
        b: predictor weights b_0 .. b_{length-1}.
        a: corrector weights a_0 .. a_{length-1}.
        c: initial-point corrector weights c_0 .. c_{length-1}.
        inv_gamma_a1: 1 / Gamma(alpha + 1) in the table dtype.
        inv_gamma_a2: 1 / Gamma(alpha + 2) in the table dtype.

    Safe for concurrent read by any number of workers; never mutated after
    construction (arrays are flagged non-writeable).
    """

    alpha: float
    length: int
    b: np.ndarray
    a: np.ndarray
    c: np.ndarray
    inv_gamma_a1: float
    inv_gamma_a2: float

    @property
    def dtype(self) -> np.dtype:
        return self.b.dtype


def _inv_gammas(alpha: float, dtype: np.dtype) -> tuple[np.number, np.number]:
    """1/Gamma(alpha+1) and 1/Gamma(alpha+2), evaluated at 50 digits, rounded once."""
    with mpmath.workdps(_GAMMA_DPS):
        inv_a1 = 1 / mpmath.gamma(mpmath.mpf(alpha) + 1)
        inv_a2 = 1 / mpmath.gamma(mpmath.mpf(alpha) + 2)
        # String round-trip: numpy parses the decimal literal straight into the
        # target dtype, so long double keeps all 18 of its digits.
        return (
            np.dtype(dtype).type(mpmath.nstr(inv_a1, 36)),
            np.dtype(dtype).type(mpmath.nstr(inv_a2, 36)),
        )


def _validate(alpha: float, count: int) -> None:
    if not (isinstance(alpha, (int, float, np.floating)) and math.isfinite(float(alpha))):
        raise ValidationError(_ALPHA_RANGE_MSG.format(alpha))
    if not 0.0 < float(alpha) <= 2.0:
        raise ValidationError(_ALPHA_RANGE_MSG.format(alpha))
    if not isinstance(count, (int, np.integer)) or isinstance(count, bool) or count < 1:
        raise ValidationError(_COUNT_MSG.format(count))


def build_weights(alpha: float, count: int, dtype=np.float64) -> WeightTable:
    """Compute the three coefficient sequences for indices 0 .. count+1.

    Args:
        alpha: fractional order, 0 < alpha <= 2.
        count: step count N; the returned sequences have N+2 entries, enough
            for every history index a solve to step N can touch.
        dtype: target dtype of the stored sequences (float64 or longdouble).

    Returns:
        WeightTable with b, a, c of length count+2 in ``dtype``.

    Raises:
        ValidationError: alpha outside (0, 2] or count < 1.
    """
    _validate(alpha, count)
    alpha = float(alpha)
    length = int(count) + 2

    ld = np.longdouble
    al = ld(alpha)
    n = np.arange(length, dtype=ld)
    np1 = n + ld(1)
    np2 = n + ld(2)

    inv_ga1_ld, inv_ga2_ld = _inv_gammas(alpha, np.longdouble)

    b = (np1**al - n**al) * inv_ga1_ld
    ap1 = al + ld(1)
    a = (np2**ap1 - ld(2) * np1**ap1 + n**ap1) * inv_ga2_ld
    c = (n**ap1 - (n - al) * np1**al) * inv_ga2_ld

    out = np.dtype(dtype)
    b = np.asarray(b, dtype=out)
    a = np.asarray(a, dtype=out)
    c = np.asarray(c, dtype=out)
    for arr in (b, a, c):
        arr.setflags(write=False)

    inv_ga1, inv_ga2 = (
        (inv_ga1_ld, inv_ga2_ld) if out == np.longdouble else _inv_gammas(alpha, out)
    )
    return WeightTable(
        alpha=alpha, length=length, b=b, a=a, c=c,
        inv_gamma_a1=inv_ga1, inv_gamma_a2=inv_ga2,
    )


def build_weights_mpf(alpha: float, count: int, dps: int = 40) -> tuple[list, list, list, "mpmath.mpf", "mpmath.mpf"]:
    """Arbitrary-precision variant for the software extended mode.

    Returns (b, a, c, inv_gamma_a1, inv_gamma_a2) with mpf entries computed at
    ``dps`` decimal digits.  Slow; intended for hosts without a wide native
    float and for cross-checking the native tables.
    """
    _validate(alpha, count)
    with mpmath.workdps(dps):
        al = mpmath.mpf(alpha)
        inv_ga1 = 1 / mpmath.gamma(al + 1)
        inv_ga2 = 1 / mpmath.gamma(al + 2)
        b, a, c = [], [], []
        for i in range(int(count) + 2):
            n = mpmath.mpf(i)
            b.append((((n + 1) ** al) - n**al) * inv_ga1)
            ap1 = al + 1
            a.append(((n + 2) ** ap1 - 2 * (n + 1) ** ap1 + n**ap1) * inv_ga2)
            c.append((n**ap1 - (n - al) * (n + 1) ** al) * inv_ga2)
        return b, a, c, inv_ga1, inv_ga2


def reversed_layout(seq: np.ndarray) -> np.ndarray:
    """Copy ``seq`` reversed, so seq[n-k] reads contiguously ascending in k.

    With rev = reversed_layout(seq) of length L, the identity is
    rev[(L-1-n) + k] == seq[n-k]; the history sum over k then walks a
    contiguous ascending slice, which is what the kernels want.
    """
    rev = np.ascontiguousarray(seq[::-1])
    rev.setflags(write=False)
    return rev


def tables_for_orders(orders: Sequence[float], count: int, dtype=np.float64) -> list[WeightTable]:
    """One WeightTable per component order, deduplicated by exact value.

    Components sharing an order share the identical table object, which makes
    'same order, same bits' hold by construction.
    """
    cache: dict[float, WeightTable] = {}
    out = []
    for al in orders:
        key = float(al)
        if key not in cache:
            cache[key] = build_weights(key, count, dtype=dtype)
        out.append(cache[key])
    return out

"""Sequential predictor-corrector scheme for Caputo-type systems.

The step recurrence, per component with order alpha and h = T/N:

    predicted  y^P_{n+1} = taylor(t_{n+1}) + h^a * sum_{k=0..n} b_{n-k} f_k
    corrected  y_{n+1}   = taylor(t_{n+1}) + h^a * ( c_n f_0
                             + sum_{k=1..n} a_{n-k} f_k
                             + f(t_{n+1}, y^P_{n+1}) / Gamma(a+2) )

taylor(t) carries the initial data: sum of t^k/k! * y0^(k) for k < ceil(a).
At alpha = 1 this collapses to Heun's method.  The rhs is evaluated exactly
twice per step: once at the predicted point (used once, discarded) and once
at the corrected point (cached for all future history sums).

``predictor_step`` and ``corrector_step`` mirror the engine's accumulation
order operation for operation, so composing them reproduces ``solve_*``
output bit for bit at either precision.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from . import _engine
from .errors import ValidationError
from .problem import Problem, Trajectory, order_depth
from .weights import WeightTable

__all__ = [
    "Problem",
    "Trajectory",
    "taylor_term",
    "predictor_step",
    "corrector_step",
    "solve_sequential",
]


def taylor_term(t, init: Sequence[float], alpha: float):
    """Initial-data polynomial: sum of t^k / k! * init[k] for k < ceil(alpha).

    Args:
        t: evaluation time (any real scalar type; dtype is preserved).
        init: exactly ceil(alpha) initial derivatives y0^(k).
        alpha: component order in (0, 2].

    Raises:
        ValidationError: wrong number of initial values.
    """
    m = order_depth(alpha)
    if len(init) != m:
        raise ValidationError(
            f"init must supply exactly {m} value(s) for order {alpha}, got {len(init)}"
        )
    if m == 1:
        return init[0]
    return init[0] + t * init[1]


def _per_component(weights, d: int) -> list[WeightTable]:
    if isinstance(weights, WeightTable):
        return [weights] * d
    tables = list(weights)
    if len(tables) != d:
        raise ValidationError(
            f"weights must supply one table per component: expected {d}, got {len(tables)}"
        )
    return tables


def _as_history(rhs_history, n: int) -> np.ndarray:
    hist = np.asarray(rhs_history)
    if hist.ndim == 1:
        hist = hist[:, np.newaxis]
    if hist.ndim != 2 or hist.shape[0] != n + 1:
        raise ValidationError(
            f"rhs_history must hold f_0..f_{n} ({n + 1} rows), got shape {hist.shape}"
        )
    return hist


def _as_vector(value, d: int, dtype) -> np.ndarray:
    arr = np.asarray(value, dtype=dtype)
    if arr.ndim == 0:
        arr = np.full(d, arr, dtype=dtype)
    if arr.shape != (d,):
        raise ValidationError(f"expected scalar or length-{d} vector, got shape {arr.shape}")
    return arr


def predictor_step(n: int, rhs_history, weights, h: float, taylor) -> np.ndarray:
    """Explicit predictor: taylor + h^a * sum_{k=0..n} b_{n-k} f_k per component.

    Args:
        n: step index; the state being predicted is y^P_{n+1}.
        rhs_history: f_0..f_n, shape (n+1, d) (or (n+1,) for d = 1).
        weights: one WeightTable shared by all components, or one per component.
        h: grid spacing.
        taylor: taylor_term(t_{n+1}, ...) per component (scalar broadcasts).

    Returns:
        Length-d predicted state, in the history's dtype.
    """
    hist = _as_history(rhs_history, n)
    d = hist.shape[1]
    tables = _per_component(weights, d)
    dtype = hist.dtype if hist.dtype in (np.float64, np.longdouble) else np.float64
    tay = _as_vector(taylor, d, dtype)
    out = np.empty(d, dtype=dtype)
    scalar = np.dtype(dtype).type
    for i, wt in enumerate(tables):
        if wt.length < n + 1:
            raise ValidationError(
                f"weight table covers indices up to {wt.length - 1}, step needs {n}"
            )
        b = np.asarray(wt.b, dtype=dtype)
        f = np.ascontiguousarray(hist[:, i], dtype=dtype)
        s = b[n] * f[0]
        for k in range(1, n + 1):
            s = s + b[n - k] * f[k]
        h_al = scalar(h) ** scalar(wt.alpha)
        out[i] = tay[i] + h_al * s
    return out


def corrector_step(
    n: int,
    rhs_history,
    predicted,
    weights,
    h: float,
    taylor,
    rhs: Callable,
    t_next,
) -> np.ndarray:
    """One corrector application at the predicted point.

    Per component: taylor + h^a * (c_n f_0 + sum_{k=1..n} a_{n-k} f_k
    + f(t_{n+1}, y^P) / Gamma(a+2)).  The rhs is evaluated here once, at
    ``predicted``; the caller caches the rhs of the returned state itself.
    """
    hist = _as_history(rhs_history, n)
    d = hist.shape[1]
    tables = _per_component(weights, d)
    dtype = hist.dtype if hist.dtype in (np.float64, np.longdouble) else np.float64
    tay = _as_vector(taylor, d, dtype)
    predicted = _as_vector(predicted, d, dtype)
    f_pred = np.asarray(rhs(t_next, predicted), dtype=dtype)
    if f_pred.shape != (d,):
        raise ValidationError(f"rhs must return {d} value(s), got shape {f_pred.shape}")
    out = np.empty(d, dtype=dtype)
    scalar = np.dtype(dtype).type
    for i, wt in enumerate(tables):
        a = np.asarray(wt.a, dtype=dtype)
        c = np.asarray(wt.c, dtype=dtype)
        f = np.ascontiguousarray(hist[:, i], dtype=dtype)
        s = c[n] * f[0]
        for k in range(1, n + 1):
            s = s + a[n - k] * f[k]
        h_al = scalar(h) ** scalar(wt.alpha)
        out[i] = tay[i] + h_al * (s + f_pred[i] * scalar(wt.inv_gamma_a2))
    return out


def solve_sequential(problem: Problem, store_predictor: bool = False) -> Trajectory:
    """Single-threaded reference solve.

    Returns the trajectory of N+1 states on the uniform grid; aborts with
    NonFiniteStateError (reporting the last valid step) if a state overflows
    or turns NaN.  Runtime is quadratic in N: every step sums the entire
    history.
    """
    return _engine.solve_f64(problem, plan=None, store_predictor=store_predictor)

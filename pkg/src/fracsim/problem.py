"""Problem and Trajectory: the data contract between setup, solvers, and analysis."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ValidationError

Rhs = Callable[..., "np.ndarray"]


def order_depth(alpha: float) -> int:
    """Number of initial derivatives a component of order alpha requires (ceil)."""
    return int(math.ceil(float(alpha)))


@dataclass(frozen=True, slots=True)
class Problem:
    """One fractional-order initial value problem on [0, T].

    Fields:
        dim: component count d >= 1.
        orders: per-component order alpha_i in (0, 2].
        init: per-component initial derivatives; component i supplies exactly
            ceil(alpha_i) values (y(0), and y'(0) when alpha_i > 1).
        rhs: callable (t, state) -> length-d array; must be pure and must
            preserve the dtype of ``state`` (use numpy math functions).
        horizon: T > 0.
        steps: N >= 1; the grid is t_n = n * (T/N).
    """

    dim: int
    orders: tuple[float, ...]
    init: tuple[tuple[float, ...], ...]
    rhs: Rhs
    horizon: float
    steps: int

    def __post_init__(self):
        if not isinstance(self.dim, (int, np.integer)) or isinstance(self.dim, bool) or self.dim < 1:
            raise ValidationError(f"dim must be a positive integer, got {self.dim!r}")
        object.__setattr__(self, "dim", int(self.dim))

        orders = tuple(float(a) for a in self.orders)
        if len(orders) != self.dim:
            raise ValidationError(
                f"orders must supply one value per component: expected {self.dim}, got {len(orders)}"
            )
        for i, a in enumerate(orders):
            if not (math.isfinite(a) and 0.0 < a <= 2.0):
                raise ValidationError(
                    f"orders[{i}] must satisfy 0 < alpha <= 2, got {a!r}"
                )
        object.__setattr__(self, "orders", orders)

        raw_init = self.init
        if len(raw_init) != self.dim:
            raise ValidationError(
                f"init must supply one entry per component: expected {self.dim}, got {len(raw_init)}"
            )
        init = []
        for i, entry in enumerate(raw_init):
            entry = tuple(float(v) for v in (entry if isinstance(entry, Sequence) or isinstance(entry, np.ndarray) else (entry,)))
            need = order_depth(orders[i])
            if len(entry) != need:
                raise ValidationError(
                    f"init[{i}] must supply exactly {need} value(s) for order {orders[i]}, got {len(entry)}"
                )
            if not all(math.isfinite(v) for v in entry):
                raise ValidationError(f"init[{i}] contains a non-finite value")
            init.append(entry)
        object.__setattr__(self, "init", tuple(init))

        if not callable(self.rhs):
            raise ValidationError("rhs must be callable as rhs(t, state)")

        T = self.horizon
        if not (isinstance(T, (int, float, np.floating)) and math.isfinite(float(T)) and float(T) > 0.0):
            raise ValidationError(f"horizon must be a finite positive number, got {T!r}")
        object.__setattr__(self, "horizon", float(T))

        N = self.steps
        if not isinstance(N, (int, np.integer)) or isinstance(N, bool) or N < 1:
            raise ValidationError(f"steps must be a positive integer, got {N!r}")
        object.__setattr__(self, "steps", int(N))

    @property
    def h(self) -> float:
        """Grid spacing T / N."""
        return self.horizon / self.steps

    @property
    def depths(self) -> tuple[int, ...]:
        """ceil(alpha_i) per component."""
        return tuple(order_depth(a) for a in self.orders)

    def initial_state(self, dtype=np.float64) -> np.ndarray:
        return np.array([entry[0] for entry in self.init], dtype=dtype)


@dataclass(frozen=True, slots=True)
class Trajectory:
    """Solver output on the full grid.

    ``rhs_values`` is a transposed view of the internal component-major
    buffer the solvers accumulate into; both alias the same memory, all of it
    read-only.  ``predictor_states`` is populated only when the solve was
    asked to keep the predicted points.
    """

    problem: Problem
    times: np.ndarray
    states: np.ndarray
    rhs_transposed: np.ndarray = field(repr=False)
    predictor_states: np.ndarray | None = None

    @property
    def rhs_values(self) -> np.ndarray:
        """(N+1) x d view: rhs_values[n] = rhs(times[n], states[n])."""
        return self.rhs_transposed.T

    @property
    def h(self) -> float:
        return self.problem.h

    def __len__(self) -> int:
        return self.states.shape[0]


def freeze_trajectory(
    problem: Problem,
    times: np.ndarray,
    states: np.ndarray,
    rhs_transposed: np.ndarray,
    predictor_states: np.ndarray | None = None,
) -> Trajectory:
    """Mark the arrays read-only and wrap them."""
    for arr in (times, states, rhs_transposed, predictor_states):
        if arr is not None:
            arr.setflags(write=False)
    return Trajectory(
        problem=problem,
        times=times,
        states=states,
        rhs_transposed=rhs_transposed,
        predictor_states=predictor_states,
    )

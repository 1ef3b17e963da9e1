"""Built-in right-hand sides and the user-expression front end.

A rhs handle is any pure callable (t, state) -> length-d vector that
preserves its input dtype.  The built-ins here do that for float64, long
double, and mpf scalars, which is what lets every precision path reuse
them unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import mpmath
import numpy as np

from .errors import ValidationError

__all__ = [
    "LcrParams",
    "EquilibriumSet",
    "RhsExpr",
    "DEFAULT_LCR",
    "g_piecewise",
    "lcr_rhs",
    "make_lcr_rhs",
    "linear_rhs",
    "make_linear_rhs",
    "equilibria",
    "parse_rhs",
]

_DEGENERATE_MSG = "degenerate circuit: 1 + sigma*b = {:.6g} has no equilibria away from the origin"


def _sin(x):
    return mpmath.sin(x) if isinstance(x, mpmath.mpf) else np.sin(x)


def _cos(x):
    return mpmath.cos(x) if isinstance(x, mpmath.mpf) else np.cos(x)


def _exp(x):
    return mpmath.exp(x) if isinstance(x, mpmath.mpf) else np.exp(x)


@dataclass(frozen=True, slots=True)
class LcrParams:
    """Forced series-LCR circuit parameters.

    dx/dt-side state is (x, y) with damping sigma, forcing amplitude f at
    frequency omega, and a continuous piecewise-linear conductance with
    inner slope a (|x| < 1) and outer slope b.
    """

    sigma: float = 1.015
    f: float = 0.0
    omega: float = 0.55
    a: float = -1.02
    b: float = -0.58

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValidationError(f"sigma must be positive, got {self.sigma!r}")
        if not self.f >= 0:
            raise ValidationError(f"forcing amplitude f must be >= 0, got {self.f!r}")
        if not self.omega > 0:
            raise ValidationError(f"omega must be positive, got {self.omega!r}")
        if 1.0 + self.sigma * self.b == 0.0:
            raise ValidationError(_DEGENERATE_MSG.format(1.0 + self.sigma * self.b))

    @property
    def period(self) -> float:
        """Forcing period 2*pi/omega."""
        return 2.0 * np.pi / self.omega


#: Reference parameter set: the chaotic test circuit all experiments use.
DEFAULT_LCR = LcrParams()


@dataclass(frozen=True, slots=True)
class EquilibriumSet:
    """The three rest points of the unforced circuit: origin and a symmetric pair."""

    e0: np.ndarray
    e_plus: np.ndarray
    e_minus: np.ndarray


def g_piecewise(x, a, b):
    """Continuous piecewise-linear conductance.

    b*x - a + b for x <= -1;  a*x for |x| < 1;  b*x + a - b for x >= 1.
    The outer formulas evaluate the breakpoints; both branches agree there
    for every (a, b), so the tie-break is value-identical.  Works on any
    real scalar type (comparison plus arithmetic only).
    """
    if x <= -1:
        return b * x - a + b
    if x >= 1:
        return b * x + a - b
    return a * x


def lcr_rhs(t, state, params: LcrParams):
    """Forced circuit equations: dx = y - g(x), dy = -sigma*y - x + f*sin(omega*t)."""
    x = state[0]
    y = state[1]
    dx = y - g_piecewise(x, params.a, params.b)
    dy = -params.sigma * y - x + params.f * _sin(params.omega * t)
    return np.array([dx, dy])


def make_lcr_rhs(params: LcrParams) -> Callable:
    """Bind circuit parameters into a (t, state) handle for the solver."""

    def rhs(t, state):
        return lcr_rhs(t, state, params)

    return rhs


def linear_rhs(t, y, lam: float):
    """Scalar test system: lam * y (per component if y has several)."""
    return lam * y


def make_linear_rhs(lam: float) -> Callable:
    def rhs(t, y):
        return lam * np.asarray(y)

    return rhs


def equilibria(params: LcrParams) -> EquilibriumSet:
    """Rest points of the unforced (f = 0) circuit.

    The origin always; the symmetric pair from y = g(x), x = -sigma*y on the
    outer branches, which works out to
    (+/- sigma*(a-b)/(1+sigma*b), +/- (b-a)/(1+sigma*b)).

    Raises:
        ValidationError: 1 + sigma*b = 0 (the pair escapes to infinity).
    """
    den = 1.0 + params.sigma * params.b
    if den == 0.0 or abs(den) < 1e-300:
        raise ValidationError(_DEGENERATE_MSG.format(den))
    ex = params.sigma * (params.a - params.b) / den
    ey = (params.b - params.a) / den
    e_plus = np.array([ex, ey])
    e_plus.setflags(write=False)
    e_minus = -e_plus
    e_minus.setflags(write=False)
    e0 = np.zeros(2)
    e0.setflags(write=False)
    return EquilibriumSet(e0=e0, e_plus=e_plus, e_minus=e_minus)


@dataclass(frozen=True, slots=True)
class RhsExpr:
    """Compiled per-component expressions over t and y1..yd.

    Callable as rhs(t, y); evaluation preserves the scalar type of its
    inputs (float64, long double, or mpf) and is total on finite inputs --
    out-of-domain operations produce NaN/inf rather than raising, which the
    solver's non-finite guard then reports.
    """

    sources: tuple[str, ...]
    dim: int
    fns: tuple[Callable, ...] = field(repr=False, compare=False)

    def __call__(self, t, y):
        with np.errstate(all="ignore"):
            return np.array([fn(t, y) for fn in self.fns])


def parse_rhs(source: str | Sequence[str]) -> RhsExpr:
    """Parse one expression per component into a solver-ready rhs handle.

    Grammar: + - * / ^ with standard precedence (^ tightest and
    right-associative, then * /, then + -, unary minus below ^), parentheses,
    decimal literals, variables t and y1..yd (d = number of expressions),
    and the functions sin, cos, exp, abs, min, max, g_pw(x, a, b).

    Raises:
        ExprError: syntax error, unknown identifier, or arity mismatch,
            with the character position.
    """
    from . import _expr

    sources = (source,) if isinstance(source, str) else tuple(source)
    if not sources:
        raise ValidationError("parse_rhs needs at least one component expression")
    dim = len(sources)
    fns = tuple(_expr.compile_expression(text, dim) for text in sources)
    return RhsExpr(sources=sources, dim=dim, fns=fns)

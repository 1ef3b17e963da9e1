"""Shared fixtures and the independent reference solver.

``naive_solve`` re-derives every quantity from the defining formulas with
``math.fsum`` accumulation and shares no code with the package; agreement
with it is evidence the engine computes the scheme, not merely itself.
"""

import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from fracsim import DEFAULT_LCR, LcrParams, Problem, make_lcr_rhs

settings.register_profile(
    "fast",
    max_examples=25,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("fast")


def naive_solve(orders, init, rhs, horizon, steps):
    """Plain-Python predictor-corrector from the textbook formulas.

    Weights are recomputed from scratch at every use (no tables) and sums
    use math.fsum, so any structural bug in the package's tabulated and
    incrementally-accumulated path shows up as disagreement.
    """
    d = len(orders)
    h = horizon / steps

    def taylor(i, t):
        total = init[i][0]
        if len(init[i]) > 1:
            total += t * init[i][1]
        return total

    f_hist = [list(map(float, rhs(0.0, np.array([init[i][0] for i in range(d)]))))]
    states = [[float(init[i][0]) for i in range(d)]]
    for n in range(steps):
        t1 = (n + 1) * h
        predicted = []
        for i in range(d):
            al = orders[i]
            terms = [
                ((n - k + 1) ** al - (n - k) ** al) * f_hist[k][i]
                for k in range(n + 1)
            ]
            s = math.fsum(terms) / math.gamma(al + 1)
            predicted.append(taylor(i, t1) + h**al * s)
        f_pred = rhs(t1, np.array(predicted))
        corrected = []
        for i in range(d):
            al = orders[i]
            ga2 = math.gamma(al + 2)
            c_n = (n ** (al + 1) - (n - al) * (n + 1) ** al) / ga2
            terms = [c_n * f_hist[0][i]]
            for k in range(1, n + 1):
                j = n - k
                a_j = (
                    (j + 2) ** (al + 1) - 2 * (j + 1) ** (al + 1) + j ** (al + 1)
                ) / ga2
                terms.append(a_j * f_hist[k][i])
            terms.append(float(f_pred[i]) / ga2)
            corrected.append(taylor(i, t1) + h**al * math.fsum(terms))
        states.append(corrected)
        f_hist.append(list(map(float, rhs(t1, np.array(corrected)))))
    return np.array(states)


@pytest.fixture
def lcr_problem():
    """Forced circuit at chaotic-regime drive, sized for fast tests."""

    def make(
        f: float = 0.125,
        steps: int = 400,
        horizon: float = 4.0,
        alpha: float = 0.9,
        init=((0.1,), (0.1,)),
        params: LcrParams | None = None,
    ) -> Problem:
        if params is None:
            import dataclasses

            params = dataclasses.replace(DEFAULT_LCR, f=f)
        return Problem(
            dim=2,
            orders=(alpha, alpha),
            init=init,
            rhs=make_lcr_rhs(params),
            horizon=horizon,
            steps=steps,
        )

    return make

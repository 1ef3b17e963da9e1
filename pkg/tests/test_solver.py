"""Sequential solver: frozen single-step values, composition, convergence."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracsim import (
    NonFiniteStateError,
    Problem,
    ValidationError,
    build_weights,
    corrector_step,
    make_linear_rhs,
    mittag_leffler,
    order_depth,
    predictor_step,
    solve_sequential,
    taylor_term,
)
from conftest import naive_solve

E09_AT_MINUS_1 = 0.37606602142464188118  # 50-digit series, rounded once


def test_order_depth():
    assert order_depth(0.3) == 1
    assert order_depth(1.0) == 1
    assert order_depth(1.0000001) == 2
    assert order_depth(2.0) == 2


def test_taylor_term():
    assert taylor_term(5.0, (2.0,), 0.9) == 2.0
    assert taylor_term(5.0, (2.0, -1.0), 1.5) == pytest.approx(-3.0, rel=1e-15)
    assert taylor_term(0.0, (2.0, -1.0), 1.5) == 2.0


def test_predictor_reference_value():
    # alpha=0.9, h=0.1, history f = (1, 0.5, 0.25), zero initial polynomial:
    # 50-digit evaluation of h^a (b2 f0 + b1 f1 + b0 f2).
    wt = build_weights(0.9, 4)
    out = predictor_step(2, [1.0, 0.5, 0.25], wt, 0.1, 0.0)
    assert out[0] == pytest.approx(0.19697979072751727491, rel=1e-15, abs=0.0)


def test_corrector_reference_value():
    # alpha=0.9, h=0.1, n=1, taylor=1, history f=(1, 0.5), predicted rhs -0.3.
    wt = build_weights(0.9, 4)
    out = corrector_step(
        1, [1.0, 0.5], [0.0], wt, 0.1, 1.0, lambda t, y: np.array([-0.3]), 0.2
    )
    assert out[0] == pytest.approx(1.0950355238800730547, rel=1e-15, abs=0.0)


def test_steps_compose_into_the_engine_result():
    # Driving the two public step functions by hand must reproduce
    # solve_sequential bit for bit.
    problem = Problem(
        dim=1,
        orders=(0.9,),
        init=((1.0,),),
        rhs=make_linear_rhs(-1.0),
        horizon=1.0,
        steps=64,
    )
    engine = solve_sequential(problem, store_predictor=True)
    wt = build_weights(0.9, problem.steps)
    h = problem.horizon / problem.steps
    f_hist = [problem.rhs(0.0, np.array([1.0]))[0]]
    states = [1.0]
    for n in range(problem.steps):
        t1 = engine.times[n + 1]
        predicted = predictor_step(n, f_hist, wt, h, 1.0)
        corrected = corrector_step(
            n, f_hist, predicted, wt, h, 1.0, problem.rhs, t1
        )
        assert predicted[0] == engine.predictor_states[n + 1, 0]
        assert corrected[0] == engine.states[n + 1, 0]
        states.append(corrected[0])
        f_hist.append(problem.rhs(t1, corrected)[0])
    assert states[-1] == engine.states[-1, 0]


def test_rhs_evaluated_exactly_twice_per_step():
    calls = []

    def rhs(t, y):
        calls.append(t)
        return -np.asarray(y)

    problem = Problem(
        dim=1, orders=(0.9,), init=((1.0,),), rhs=rhs, horizon=1.0, steps=50
    )
    solve_sequential(problem)
    assert len(calls) == 2 * problem.steps + 1


@pytest.mark.parametrize("alpha", [0.5, 0.9])
def test_terminal_error_against_series_oracle(alpha):
    exact = mittag_leffler(alpha, -1.0)
    errors = []
    for steps in (128, 256, 512):
        problem = Problem(
            dim=1,
            orders=(alpha,),
            init=((1.0,),),
            rhs=make_linear_rhs(-1.0),
            horizon=1.0,
            steps=steps,
        )
        trajectory = solve_sequential(problem)
        errors.append(abs(float(trajectory.states[-1, 0]) - exact))
    assert errors[0] > errors[1] > errors[2]
    observed = math.log2(errors[1] / errors[2])
    assert observed > 1.0 + alpha - 0.35


def test_known_value_at_moderate_resolution():
    problem = Problem(
        dim=1,
        orders=(0.9,),
        init=((1.0,),),
        rhs=make_linear_rhs(-1.0),
        horizon=1.0,
        steps=4096,
    )
    trajectory = solve_sequential(problem)
    assert trajectory.states[-1, 0] == pytest.approx(E09_AT_MINUS_1, abs=1e-8)


def test_order_one_matches_classical_trapezoid_pair():
    # At alpha=1 the scheme is Heun's trapezoid predictor-corrector; check
    # against an independent plain-Python implementation of that method.
    lam = -1.3
    steps, horizon = 40, 2.0
    h = horizon / steps
    y = 1.0
    f_hist = [lam * y]
    for n in range(steps):
        pred = y  # placeholder, overwritten below
        pred = 1.0 + h * math.fsum(f_hist)
        corr_sum = math.fsum(
            [0.5 * f_hist[0], *f_hist[1:], 0.5 * lam * pred]
        )
        y = 1.0 + h * corr_sum
        f_hist.append(lam * y)
    problem = Problem(
        dim=1,
        orders=(1.0,),
        init=((1.0,),),
        rhs=make_linear_rhs(lam),
        horizon=horizon,
        steps=steps,
    )
    trajectory = solve_sequential(problem)
    assert trajectory.states[-1, 0] == pytest.approx(y, rel=1e-12)


@given(
    alpha=st.floats(0.3, 1.8),
    lam=st.floats(-2.0, -0.1),
    steps=st.integers(4, 36),
)
@settings(max_examples=25)
def test_agrees_with_naive_reference_linear(alpha, lam, steps):
    init = ((1.0,),) if alpha <= 1 else ((1.0, 0.5),)
    problem = Problem(
        dim=1,
        orders=(alpha,),
        init=init,
        rhs=make_linear_rhs(lam),
        horizon=1.0,
        steps=steps,
    )
    trajectory = solve_sequential(problem)
    reference = naive_solve((alpha,), init, problem.rhs, 1.0, steps)
    assert np.abs(trajectory.states - reference).max() < 1e-11


def test_agrees_with_naive_reference_circuit(lcr_problem):
    problem = lcr_problem(f=0.125, steps=60, horizon=3.0)
    trajectory = solve_sequential(problem)
    reference = naive_solve(
        problem.orders, problem.init, problem.rhs, problem.horizon, problem.steps
    )
    assert np.abs(trajectory.states - reference).max() < 1e-11


def test_mixed_orders_against_naive_reference():
    # Components of different order, one needing two initial derivatives.
    def rhs(t, y):
        return np.array([-y[0] + 0.2 * y[1], -y[1] - 0.1 * y[0]])

    orders = (0.9, 1.3)
    init = ((1.0,), (0.5, -0.2))
    problem = Problem(
        dim=2, orders=orders, init=init, rhs=rhs, horizon=1.5, steps=48
    )
    trajectory = solve_sequential(problem)
    reference = naive_solve(orders, init, rhs, 1.5, 48)
    assert np.abs(trajectory.states - reference).max() < 1e-11


def test_trajectory_layout(lcr_problem):
    problem = lcr_problem(steps=20)
    trajectory = solve_sequential(problem, store_predictor=True)
    assert trajectory.times.shape == (21,)
    assert trajectory.states.shape == (21, 2)
    assert trajectory.rhs_values.shape == (21, 2)
    assert trajectory.predictor_states.shape == (21, 2)
    assert np.all(np.isnan(trajectory.predictor_states[0]))
    assert np.all(np.isfinite(trajectory.predictor_states[1:]))
    assert trajectory.times[0] == 0.0
    assert trajectory.times[-1] == pytest.approx(problem.horizon, rel=1e-15)
    assert len(trajectory) == 21
    assert not trajectory.states.flags.writeable


def test_rhs_values_recorded_consistently(lcr_problem):
    problem = lcr_problem(steps=16)
    trajectory = solve_sequential(problem)
    for n in (0, 7, 16):
        expected = problem.rhs(trajectory.times[n], trajectory.states[n])
        assert np.array_equal(trajectory.rhs_values[n], expected)


def test_nonfinite_state_aborts_with_location():
    def rhs(t, y):
        if t > 0.5:
            return np.array([math.inf])
        return -np.asarray(y)

    problem = Problem(
        dim=1, orders=(0.9,), init=((1.0,),), rhs=rhs, horizon=1.0, steps=10
    )
    with pytest.raises(NonFiniteStateError) as excinfo:
        solve_sequential(problem)
    err = excinfo.value
    assert err.last_valid_index == 5
    assert "step 6" in str(err)
    assert "last valid step is 5" in str(err)


def test_rhs_shape_mismatch_rejected():
    problem = Problem(
        dim=2,
        orders=(0.9, 0.9),
        init=((1.0,), (1.0,)),
        rhs=lambda t, y: np.array([1.0]),
        horizon=1.0,
        steps=4,
    )
    with pytest.raises(ValidationError):
        solve_sequential(problem)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"steps": 0},
        {"steps": -5},
        {"horizon": 0.0},
        {"horizon": -1.0},
        {"horizon": math.nan},
        {"orders": (0.9,)},  # wrong arity for dim=2
        {"orders": (0.9, 2.5)},
        {"init": ((1.0,),)},  # one component missing
        {"init": ((1.0,), (1.0, 0.0))},  # depth 2 for an order-0.9 component
        {"dim": 0},
    ],
)
def test_problem_validation(kwargs):
    base = dict(
        dim=2,
        orders=(0.9, 0.9),
        init=((0.1,), (0.1,)),
        rhs=lambda t, y: -np.asarray(y),
        horizon=1.0,
        steps=8,
    )
    base.update(kwargs)
    with pytest.raises(ValidationError):
        Problem(**base)


def test_two_derivative_component_requires_both_values():
    with pytest.raises(ValidationError):
        Problem(
            dim=1,
            orders=(1.5,),
            init=((1.0,),),
            rhs=lambda t, y: -np.asarray(y),
            horizon=1.0,
            steps=8,
        )

import math

import numpy as np
import pytest

from fluxsat import Event, OdeProblem, Params, Tolerances, find_root, ode_solve
from fluxsat.errors import NoBracket
from fluxsat.exact import example82_f


def test_ode_reciprocal_closed_form():
    # r' = 1/r, r(0) = sqrt(2)  =>  r(t) = sqrt(2 + 2t)
    prob = OdeProblem(lambda t, y: [1.0 / y[0]], 0.0, np.array([math.sqrt(2.0)]))
    sol = ode_solve(prob, 1.0, Tolerances())
    assert abs(sol(1.0)[0] - 2.0) <= 1e-9


def test_ode_constant_rhs():
    prob = OdeProblem(lambda t, y: [0.0, 0.0], 0.0, np.array([3.0, -1.0]))
    sol = ode_solve(prob, 5.0, Tolerances())
    np.testing.assert_allclose(sol(5.0), [3.0, -1.0], rtol=0, atol=1e-12)


def test_ode_event_location():
    prob = OdeProblem(
        lambda t, y: [1.0 / y[0]],
        0.0,
        np.array([math.sqrt(2.0)]),
        events=(Event(lambda t, y: y[0] - 2.0, terminal=True),),
    )
    sol = ode_solve(prob, 3.0, Tolerances(rel_tol=1e-12, abs_tol=1e-14))
    assert len(sol.event_times[0]) == 1
    assert abs(sol.event_times[0][0] - 1.0) <= 1e-9


@pytest.mark.parametrize("m,dim", [(2.0, 1), (2.0, 2), (3.0, 1)])
def test_ode_front_radius_family(m, dim):
    # r' = r^((1-m)N) from r(0) = (t0/alpha)^alpha reproduces
    # r(t) = ((t0+t)/alpha)^alpha at every accepted node
    params = Params(m, dim)
    a = params.alpha
    t0 = 1.0
    rtol = 1e-8
    tol = Tolerances(rel_tol=rtol, abs_tol=1e-12)
    exponent = (1.0 - m) * dim
    prob = OdeProblem(lambda t, y: [y[0] ** exponent], 0.0, np.array([(t0 / a) ** a]))
    sol = ode_solve(prob, 3.0, tol)
    exact = ((t0 + sol.t) / a) ** a
    assert np.max(np.abs(sol.y[0] - exact) / exact) <= 10.0 * rtol


def test_ode_tolerance_halving_never_worse():
    prob = OdeProblem(lambda t, y: [1.0 / y[0]], 0.0, np.array([math.sqrt(2.0)]))
    errs = []
    for rtol in (1e-5, 1e-7, 1e-9):
        sol = ode_solve(prob, 1.0, Tolerances(rel_tol=rtol, abs_tol=rtol * 1e-2))
        errs.append(abs(sol(1.0)[0] - 2.0))
    assert errs[1] <= errs[0] and errs[2] <= errs[1]


def test_find_root_sqrt2():
    root = find_root(lambda x: x * x - 2.0, (1.0, 2.0), Tolerances(abs_tol=1e-13))
    assert abs(root - math.sqrt(2.0)) <= 1e-12


def test_find_root_closure_indicator():
    # the closure indicator has a second zero s1 in (0, 3); the bracket is
    # valid because f increases from 0 and is negative at 3
    s1 = find_root(example82_f, (0.1, 3.0), Tolerances(abs_tol=1e-13))
    assert s1 == pytest.approx(2.095558502073669, abs=1e-9)
    assert example82_f(0.1) > 0 and example82_f(3.0) < 0


def test_find_root_identity():
    root = find_root(lambda x: x, (-1.0, 1.0), Tolerances(abs_tol=1e-12))
    assert abs(root) <= 1e-12


def test_find_root_requires_bracket():
    with pytest.raises(NoBracket):
        find_root(lambda x: x * x + 1.0, (-1.0, 1.0), Tolerances())


def test_ode_step_failure_at_blowup():
    # y' = y^2 blows up at t = 1; the step size underflows there
    from fluxsat.errors import StepFailure

    prob = OdeProblem(lambda t, y: [y[0] ** 2], 0.0, np.array([1.0]))
    with pytest.raises(StepFailure):
        ode_solve(prob, 2.0, Tolerances())


def test_ode_max_steps_budget():
    from fluxsat.errors import MaxStepsExceeded

    prob = OdeProblem(lambda t, y: [np.cos(50.0 * t)], 0.0, np.array([0.0]))
    with pytest.raises(MaxStepsExceeded):
        ode_solve(prob, 1000.0, Tolerances(max_steps=20))

"""Shared ODE integration and bracketed root finding.

Thin, contract-enforcing layer over scipy: an embedded 4(5) Runge-Kutta pair
with dense output and event location (``solve_ivp``) and Brent's safeguarded
bisection/inverse-quadratic hybrid (``brentq``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import MaxStepsExceeded, NoBracket, StepFailure

__all__ = ["Tolerances", "OdeProblem", "OdeResult", "ode_solve", "find_root"]


@dataclass(frozen=True)
class Tolerances:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_steps: int = 1_000_000
    # margin used when an integration must stop short of a singular endpoint
    endpoint_margin: float = 1e-12

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class Event:
    """Scalar event function g(t, y); integration stops at roots if terminal."""

    fn: object
    terminal: bool = True
    direction: float = 0.0


@dataclass(frozen=True)
class OdeProblem:
    rhs: object
    t0: float
    y0: np.ndarray
    events: tuple = field(default=())


class OdeResult:
    """Dense trajectory plus located event times."""

    def __init__(self, sol, t, y, event_times, event_states):
        self._sol = sol
        self.t = t
        self.y = y
        self.event_times = event_times
        self.event_states = event_states

    def __call__(self, t):
        return self._sol(t)

    @property
    def t_end(self):
        return self.t[-1]


class _StepBudget:
    def __init__(self, rhs, max_steps):
        self.rhs = rhs
        self.left = 8 * max_steps  # RK45 uses <= 8 evaluations per step
        self.tripped = False

    def __call__(self, t, y):
        self.left -= 1
        if self.left < 0:
            self.tripped = True
            raise _BudgetExhausted()
        return self.rhs(t, y)


class _BudgetExhausted(Exception):
    pass


def ode_solve(problem: OdeProblem, t_end: float, tol: Tolerances) -> OdeResult:
    """Adaptive RK45 integration of ``problem`` up to ``t_end``.

    Raises StepFailure when the step size underflows (the usual signature of a
    blow-up inside the integration window) and MaxStepsExceeded when the step
    budget runs out.  Event roots are refined by the integrator to its local
    tolerance; terminal events stop the integration there.
    """
    budget = _StepBudget(problem.rhs, tol.max_steps)
    events = []
    for ev in problem.events:
        def wrapped(t, y, _fn=ev.fn):
            return _fn(t, y)

        wrapped.terminal = ev.terminal
        wrapped.direction = ev.direction
        events.append(wrapped)

    try:
        res = solve_ivp(
            budget,
            (problem.t0, t_end),
            np.atleast_1d(np.asarray(problem.y0, dtype=float)),
            method="RK45",
            rtol=tol.rel_tol,
            atol=tol.abs_tol,
            dense_output=True,
            events=events or None,
        )
    except _BudgetExhausted:
        raise MaxStepsExceeded(f"ODE exceeded {tol.max_steps} steps") from None
    if res.status == -1:
        raise StepFailure(res.message)
    ev_t = [np.asarray(t) for t in (res.t_events or [])]
    ev_y = [np.asarray(y) for y in (res.y_events or [])]
    return OdeResult(res.sol, res.t, res.y, ev_t, ev_y)


def find_root(f, bracket, tol: Tolerances) -> float:
    """Root of a continuous scalar function on a sign-changing bracket."""
    a, b = float(bracket[0]), float(bracket[1])
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0:
        raise NoBracket(f"f({a})={fa} and f({b})={fb} do not bracket a root")
    return float(brentq(f, a, b, xtol=tol.abs_tol, rtol=max(tol.rel_tol, 8.9e-16)))

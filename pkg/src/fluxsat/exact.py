"""Closed-form solution families and their constructive ODE/root-finding steps.

These are the oracles every solver in the package is checked against: the
self-similar expanding plateau, the finite-propagation envelope, the
waiting-time family (plateau + matched tail that waits until tau* and then
expands self-similarly), the fully worked 1D example with a bulk shock that
forms and later vanishes, and its generalized-Burgers comparator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import (
    ConsistencyFailure,
    DomainError,
    EventNotFound,
    FluxsatError,
    OrderViolation,
    TimeBeyondBlowup,
)
from .model import Params, PiecewiseProfile, constant, linear, sphere_surface_measure
from .numerics import Event, OdeProblem, Tolerances, ode_solve

__all__ = [
    "SelfSimilarSpec",
    "WaitingTimeSpec",
    "WaitingTimeSolution",
    "Example82Solution",
    "self_similar_eval",
    "self_similar_profile",
    "fsp_radius",
    "barrier_eval",
    "waiting_bounds",
    "wt_construct",
    "wt_eval",
    "wt_initial_profile",
    "example82_solve",
    "example82_eval",
    "example82_initial_profile",
    "example82_f",
    "example82_implicit_check",
    "burgers_example_eval",
    "burgers_shock_position",
]


def _radius(x, x0=0.0):
    """Distance |x - x0| for scalar or vector points."""
    d = np.asarray(x, dtype=float) - np.asarray(x0, dtype=float)
    if d.ndim == 0:
        return abs(float(d))
    return float(np.sqrt(np.sum(d * d)))


# ---------------------------------------------------------------------------
# self-similar source-type solutions and finite speed of propagation


@dataclass(frozen=True)
class SelfSimilarSpec:
    """Scaling parameters of the expanding-plateau family."""

    x0: float = 0.0
    X: float = 1.0
    T: float = 1.0
    t0: float = 1.0

    def __post_init__(self):
        if self.X <= 0 or self.T <= 0 or self.t0 <= 0:
            raise FluxsatError("X, T, t0 must be positive")


def self_similar_eval(spec: SelfSimilarSpec, params: Params, t: float, x) -> float:
    """Expanding plateau: height T^(1/(m-1)-aN) X^(-1/(m-1)) r(t)^(-N) inside
    the ball of radius X^(-1) T^a r(t), with r(t) = (a^(-1)(t0+t))^a."""
    if t < 0:
        raise FluxsatError("t must be nonnegative")
    m, N, a = params.m, params.dim, params.alpha
    r = (1.0 / a * (spec.t0 + t)) ** a
    radius = spec.T**a / spec.X * r
    if _radius(x, spec.x0) >= radius:
        return 0.0
    return spec.T ** (1.0 / (m - 1.0) - a * N) * spec.X ** (-1.0 / (m - 1.0)) * r ** (-N)


def self_similar_radius(spec: SelfSimilarSpec, params: Params, t: float) -> float:
    a = params.alpha
    return spec.T**a / spec.X * (1.0 / a * (spec.t0 + t)) ** a


def self_similar_profile(spec: SelfSimilarSpec, params: Params, t: float) -> PiecewiseProfile:
    """The plateau at time t as a symmetric profile (1D / radial)."""
    height = self_similar_eval(spec, params, t, spec.x0)
    radius = self_similar_radius(spec, params, t)
    return PiecewiseProfile((0.0, radius), (constant(height),), symmetric=True)


def fsp_radius(R: float, t: float, params: Params) -> float:
    """Support envelope R (1 + a^(-1) t)^a of data initially inside B(x0, R)."""
    if R <= 0:
        raise FluxsatError("R must be positive")
    if t < 0:
        raise FluxsatError("t must be nonnegative")
    a = params.alpha
    return R * (1.0 + t / a) ** a


def barrier_eval(tau: float, params: Params, t: float, x) -> float:
    """Separable barrier (|x| / ((N(m-1)+1)(tau - t)))^(1/(m-1)), t < tau."""
    if t < 0:
        raise FluxsatError("t must be nonnegative")
    if t >= tau:
        raise TimeBeyondBlowup(f"barrier blows up at tau={tau}, asked t={t}")
    m, N = params.m, params.dim
    r = _radius(x)
    return (r / ((N * (m - 1.0) + 1.0) * (tau - t))) ** (1.0 / (m - 1.0))


def waiting_bounds(L: float, ell: float, params: Params):
    """Sharp waiting-time sandwich (tau_low, tau_up).

    tau_low = L^(1-m)/(N(m-1)+1) from the growth constant
    L = sup u0(x) |x-x0|^(-1/(m-1)); tau_up is the same expression in the
    lower constant ell.  An infinite constant maps to a zero bound.
    Requires L >= ell so the sandwich is ordered.
    """
    if L <= 0 or ell <= 0:
        raise FluxsatError("constants must be positive (possibly inf)")
    if L < ell:
        raise OrderViolation(f"need L >= ell, got L={L} < ell={ell}")
    m, N = params.m, params.dim
    c = N * (m - 1.0) + 1.0

    def bound(v):
        return 0.0 if math.isinf(v) else v ** (1.0 - m) / c

    return bound(L), bound(ell)


# ---------------------------------------------------------------------------
# waiting-time family


@dataclass(frozen=True)
class WaitingTimeSpec:
    """Initial data of the waiting-time family: plateau D0 on B(x0, rho0),
    tail C0*psi(r) out to radius R."""

    D0: float
    C0: float
    rho0: float
    R: float
    x0: float = 0.0

    def __post_init__(self):
        if self.D0 <= 0 or self.C0 <= 0:
            raise FluxsatError("D0 and C0 must be positive")
        if not 0 < self.rho0 < self.R:
            raise FluxsatError("need 0 < rho0 < R")


@dataclass(frozen=True)
class WaitingTimeSolution:
    """Fully constructed waiting-time solution.

    Scalars (p, K, tau*), the closed forms for C(t) and psi(r), the plateau
    height D(t) obtained from the tail quadrature, and the tabulated plateau
    radius rho(t) on [0, tau*].  The plateau radius is integrated in the
    rescaled time sigma = -log(1 - t/tau*) with inner state log(R - rho),
    which resolves the endpoint where C blows up; rho(tau*) = R is asserted
    against the tabulation rather than computed.
    """

    spec: WaitingTimeSpec
    params: Params
    K: float
    tau_star: float
    D_tau: float
    _sol: object
    _sigma_end: float

    # -- closed forms -------------------------------------------------------

    def psi_pow(self, r) -> float:
        """psi(r)^(m-1), in a form that keeps full relative precision in the
        vanishing factor (R/r)^p - 1 as r -> R."""
        s, P = self.spec, self.params
        rr = np.asarray(r, dtype=float)
        log_ratio = -np.log1p(-(s.R - rr) / s.R)
        return (
            (s.D0 / s.C0) ** (P.m - 1.0)
            * (rr / s.rho0)
            * np.expm1(P.p * log_ratio)
            / ((s.R / s.rho0) ** P.p - 1.0)
        )

    def psi(self, r) -> float:
        return np.asarray(self.psi_pow(r)) ** (1.0 / (self.params.m - 1.0))

    def C(self, t: float) -> float:
        if t >= self.tau_star:
            raise TimeBeyondBlowup("C(t) blows up at tau*")
        m = self.params.m
        return (self.spec.C0 ** (1.0 - m) * (1.0 - t / self.tau_star)) ** (1.0 / (1.0 - m))

    def _sigma(self, t: float) -> float:
        return -math.log1p(-t / self.tau_star)

    def rho(self, t: float) -> float:
        """Tabulated plateau radius, increasing from rho0 to R."""
        if t < 0:
            raise FluxsatError("t must be nonnegative")
        if t >= self.tau_star:
            return self.spec.R
        sigma = self._sigma(t)
        if sigma >= self._sigma_end:
            return self.spec.R
        eta, _ = self._sol(sigma)
        return self.spec.R - math.exp(eta)

    def D(self, t: float) -> float:
        """Plateau height from D^(1-m) = D0^(1-m) + N(m-1) * int_0^t dt'/rho."""
        m, N = self.params.m, self.params.dim
        if t >= self.tau_star:
            return self.D_tau
        sigma = min(self._sigma(t), self._sigma_end)
        _, integral = self._sol(sigma)
        return (self.spec.D0 ** (1.0 - m) + N * (m - 1.0) * integral) ** (1.0 / (1.0 - m))


def wt_construct(spec: WaitingTimeSpec, params: Params, tol: Tolerances) -> WaitingTimeSolution:
    """Build the waiting-time solution: closed-form p, K, tau*, then the
    separable plateau-radius ODE integrated to the endpoint.

    Verifies on exit: the tau*-K identity to 1e-12 relative, rho increasing
    with rho(tau*) = R to 1e-6, D decreasing with D(tau*) > 0, and the
    continuity constraint D(t) = C(t) psi(rho(t)) to ODE tolerance.
    """
    m, N, p = params.m, params.dim, params.p
    D0, C0, rho0, R = spec.D0, spec.C0, spec.rho0, spec.R

    ratio = (R / rho0) ** p - 1.0
    tau_star = rho0 * D0 ** (1.0 - m) / (m * p) * ratio
    K = (D0 / C0) ** (m - 1.0) * m * p / ((m - 1.0) * rho0) / ratio

    ident = C0 ** (1.0 - m) / ((m - 1.0) * K)
    if abs(ident - tau_star) > 1e-12 * tau_star:
        raise ConsistencyFailure(f"tau* identity violated: {ident} vs {tau_star}")

    def psi_pow_gap(rho, gap):
        # (R/rho)^p - 1 through the exact gap R - rho
        return (D0 / C0) ** (m - 1.0) * (rho / rho0) * math.expm1(-p * math.log1p(-gap / R)) / ratio

    def psi_pow(r):
        return psi_pow_gap(r, R - r)

    scale = m * tau_star / C0 ** (1.0 - m)

    def rhs(sigma, y):
        eta = y[0]
        gap = math.exp(eta)  # R - rho
        rho = R - gap
        w = psi_pow_gap(rho, gap)
        drho = scale * w * (N * w / rho + K) / ((N - 1.0) * w / rho + K)
        return [-drho / gap, tau_star * math.exp(-sigma) / rho]

    sigma_end = 36.0
    problem = OdeProblem(rhs, 0.0, np.array([math.log(R - rho0), 0.0]))
    sol = ode_solve(problem, sigma_end, tol)

    eta_end, I_end = sol(sigma_end)
    gap_end = math.exp(eta_end)
    if gap_end > 1e-6 * R:
        raise ConsistencyFailure(f"rho(tau*) missed R by {gap_end}")
    D_tau = (D0 ** (1.0 - m) + N * (m - 1.0) * I_end) ** (1.0 / (1.0 - m))
    if not D_tau > 0:
        raise ConsistencyFailure("plateau height vanished at tau*")

    out = WaitingTimeSolution(spec, params, K, tau_star, D_tau, sol, sigma_end)

    # monotonicity + continuity D = C * psi(rho) along the tabulation; the
    # check runs in sigma and carries the gap R - rho directly, since a float
    # rho cannot hold the gap to relative precision near the endpoint
    check_sigma = np.linspace(0.0, 30.0, 200)
    rho_v = np.array([out.rho(tau_star * (1.0 - math.exp(-s))) for s in check_sigma])
    D_v = np.array([out.D(tau_star * (1.0 - math.exp(-s))) for s in check_sigma])
    if np.any(np.diff(rho_v) < -1e-12 * R) or np.any(np.diff(D_v) > 1e-12 * D0):
        raise ConsistencyFailure("rho must increase and D decrease")
    cont_tol = 1e3 * max(tol.rel_tol, 1e-12)
    for s in check_sigma[::20]:
        eta, integral = sol(s)
        gap = math.exp(eta)
        lhs = D0 ** (1.0 - m) + N * (m - 1.0) * integral
        rhs_v = C0 ** (1.0 - m) * math.exp(-s) / psi_pow_gap(R - gap, gap)
        if abs(lhs - rhs_v) > cont_tol * abs(lhs):
            raise ConsistencyFailure("continuity D = C psi(rho) violated")
    return out


def wt_expansion_radius(sol: WaitingTimeSolution, t: float) -> float:
    """Support radius of the post-tau* self-similar continuation.

    The continuation is the member of the expanding-plateau family passing
    through the state (D(tau*), R) at tau*, so that the front leaves at the
    Rankine-Hugoniot speed D(tau*)^(m-1) of its jump:
        radius(t) = R (1 + alpha^(-1) D(tau*)^(m-1) (t - tau*)/R)^alpha.
    """
    P, s = sol.params, sol.spec
    if t <= sol.tau_star:
        return s.R
    rate = sol.D_tau ** (P.m - 1.0) / (P.alpha * s.R)
    return s.R * (1.0 + rate * (t - sol.tau_star)) ** P.alpha


def wt_eval(sol: WaitingTimeSolution, t: float, x) -> float:
    """Pointwise value of the waiting-time solution.

    Before tau*: plateau D(t) inside B(rho(t)), tail C(t) psi(r) out to R.
    From tau* on: the expanding plateau through (D(tau*), R), exponent
    alpha = 1/(mp), with height D(tau*) (R / radius(t))^N.
    """
    if t < 0:
        raise FluxsatError("t must be nonnegative")
    P, s = sol.params, sol.spec
    m, N = P.m, P.dim
    r = _radius(x, s.x0)
    if t < sol.tau_star:
        rho = sol.rho(t)
        if r <= rho:
            return sol.D(t)
        if r >= s.R:
            return 0.0
        # stable combined form (C^(1-m) / psi^(1-m))^(1/(1-m))
        cm = s.C0 ** (1.0 - m) * (1.0 - t / sol.tau_star)
        return float((cm / sol.psi_pow(r)) ** (1.0 / (1.0 - m)))
    radius = wt_expansion_radius(sol, t)
    height = sol.D_tau * (s.R / radius) ** N
    if r == radius:
        return 0.5 * height  # trace mean at the jump, as for profiles
    if r > radius:
        return 0.0
    return height


def wt_initial_profile(spec: WaitingTimeSpec, params: Params) -> PiecewiseProfile:
    """Initial datum as a profile.  Exact (single linear tail piece) when
    p = 1 and m = 2, where psi is linear; otherwise the tail is not piecewise
    linear and this raises."""
    if params.p != 1.0 or params.m != 2.0:
        raise FluxsatError("exact piecewise datum only for m=2, N=1 (p=1)")
    # psi(r) = (D0/C0)(R - r)/(R - rho0); tail = C0 psi
    slope = -spec.D0 / (spec.R - spec.rho0)
    intercept = spec.D0 * spec.R / (spec.R - spec.rho0)
    return PiecewiseProfile(
        (0.0, spec.rho0, spec.R),
        (constant(spec.D0), linear(slope, intercept)),
        symmetric=True,
    )


def wt_mass(sol: WaitingTimeSolution, t: float) -> float:
    """Radial quadrature of the tabulated solution (diagnostic)."""
    P, s = sol.params, sol.spec
    N = P.dim
    w = sphere_surface_measure(N)
    if t < sol.tau_star:
        rho = sol.rho(t)
        plateau = sol.D(t) * rho**N / N
        tail, _ = quad(lambda r: wt_eval(sol, t, r + s.x0) * r ** (N - 1), rho, s.R, limit=200)
        return w * (plateau + tail)
    radius = wt_expansion_radius(sol, t)
    return w * wt_eval(sol, t, s.x0) * radius**N / N


# ---------------------------------------------------------------------------
# the 1D worked example (m = 2): bulk shock that forms at t = 1/2 and heals


@dataclass(frozen=True)
class Example82Solution:
    """Bulk-shock phase of the 1D example: tabulated r(s), D(s), C(s) on
    [0, s*], the closure time s* where D = C, and the derived (t*, r*)."""

    s_star: float
    t_star: float
    r_star: float
    _sol: object

    def r(self, s: float) -> float:
        s = min(max(s, 0.0), self.s_star)
        return float(self._sol(s)[0])

    def C(self, s: float) -> float:
        return _ex82_C(s, self.r(s))

    def D(self, s: float) -> float:
        return _ex82_D(s, self.r(s))


def _ex82_C(s, r):
    return (9.0 - r) / (2.0 * (3.0 - s))


def _ex82_D(s, r):
    return (7.0 - (9.0 - r) ** 2 / (4.0 * (3.0 - s))) / r


def example82_solve(tol: Tolerances) -> Example82Solution:
    """Integrate the bulk-shock phase of the fixed m=2, N=1 example.

    The shock position solves r' = D + C (the Rankine-Hugoniot speed of the
    D -> C jump); the plateau height D is eliminated through the algebraic
    half-mass constraint 7 = D r + (9-r)^2/(4(3-s)) at every step (no drift),
    and C = (9-r)/(2(3-s)) is the tail trace.  Integration starts at s = 0
    (t = 1/2) from (D, r, C) = (4/3, 3, 1) and stops at the closure event
    D = C, giving s*; then t* = s* + 1/2 and r* = r(s*).  Cross-validates
    r*^2 = 28 t* - 17 and the implicit arctanh relation.
    """

    def rhs(s, y):
        r = y[0]
        return [_ex82_D(s, r) + _ex82_C(s, r)]

    def closure(s, y):
        r = y[0]
        return _ex82_D(s, r) - _ex82_C(s, r)

    problem = OdeProblem(rhs, 0.0, np.array([3.0]), events=(Event(closure, True, -1.0),))
    sol = ode_solve(problem, 2.999, tol)
    if len(sol.event_times[0]) == 0:
        raise EventNotFound("closure event D = C not found in (0, 3)")
    s_star = float(sol.event_times[0][0])
    r_star = float(sol.event_states[0][0][0])
    t_star = s_star + 0.5

    if not 0.5 < t_star < 3.5:
        raise ConsistencyFailure(f"t* = {t_star} outside (1/2, 7/2)")
    if abs(r_star**2 - (28.0 * t_star - 17.0)) > 1e-6:
        raise ConsistencyFailure("r*^2 = 28 t* - 17 violated")
    # closure coincides with C'(s*) = 0 through C' = (C - D)/(2(3-s))
    out = Example82Solution(s_star, t_star, r_star, sol)
    ds = 1e-5
    dC = (out.C(s_star) - out.C(s_star - ds)) / ds
    if abs(dC) > 1e-3:
        raise ConsistencyFailure(f"C'(s*) = {dC} not ~ 0 at closure")
    return out


def example82_eval(sol: Example82Solution, t: float, x: float) -> float:
    """Four-phase evaluation of the example's solution, mirrored for x < 0.

    Plateau heights in the two continuous phases use the rationalized forms
    8/(3 + sqrt(16t+1)) and 14/(9 + sqrt(28t-17)), which are exact and carry
    the analytic limits 4/3 and 7/9 through the singular denominators
    (1 - 2t) and (7 - 2t).
    """
    if t < 0:
        raise FluxsatError("t must be nonnegative")
    xx = abs(float(x))
    if t < 0.5:
        e1 = math.sqrt(16.0 * t + 1.0)
        e2 = 2.0 + 2.0 * t
        if xx < e1:
            return 8.0 / (3.0 + e1)
        if xx < e2:
            return (3.0 - xx) / (1.0 - 2.0 * t)
        if xx <= 9.0:
            return (9.0 - xx) / (7.0 - 2.0 * t)
        return 0.0
    if t < sol.t_star:
        s = t - 0.5
        r = sol.r(s)
        if xx < r:
            return sol.D(s)
        if xx == r:
            return 0.5 * (sol.D(s) + sol.C(s))
        if xx <= 9.0:
            return (9.0 - xx) / (7.0 - 2.0 * t)
        return 0.0
    if t <= 3.5:
        e = math.sqrt(28.0 * t - 17.0)
        plateau = 14.0 / (9.0 + e)
        if xx < e:
            return plateau
        if xx < 9.0:  # unreachable at t = 7/2, where e = 9 covers everything
            return (9.0 - xx) / (7.0 - 2.0 * t)
        if xx == 9.0:
            # the tail closes continuously at 9 before 7/2; at 7/2 it jumps
            return 0.5 * plateau if t == 3.5 else 0.0
        return 0.0
    height = (32.0 / 49.0 + 2.0 * t / 7.0) ** (-0.5)
    edge = 7.0 * math.sqrt(32.0 / 49.0 + 2.0 * t / 7.0)
    if xx < edge:
        return height
    if xx == edge:
        return 0.5 * height
    return 0.0


def example82_initial_profile() -> PiecewiseProfile:
    """The example's datum 2 on [0,1], 3-x on [1,2], (9-x)/7 on [2,9], mirrored."""
    return PiecewiseProfile(
        (0.0, 1.0, 2.0, 9.0),
        (constant(2.0), linear(-1.0, 3.0), linear(-1.0 / 7.0, 9.0 / 7.0)),
        symmetric=True,
    )


_EX82_CONST = math.atanh(math.sqrt(3.0 / 7.0)) - 5.0 * math.sqrt(21.0) / 36.0


def example82_f(s: float) -> float:
    """Closure indicator: f(s) = 0 iff C(s) = 1 along the implicit relation.

    f(s) = arctanh(sqrt((3-s)/7)) - arctanh(sqrt(3/7))
           - 5 sqrt(7(3-s))/(36+9s) + 5 sqrt(21)/36.
    """
    if not 0.0 <= s <= 3.0:
        raise DomainError("f is defined for 0 <= s <= 3")
    q = math.sqrt((3.0 - s) / 7.0)
    return (
        math.atanh(q)
        - math.atanh(math.sqrt(3.0 / 7.0))
        - 5.0 * math.sqrt(7.0 * (3.0 - s)) / (36.0 + 9.0 * s)
        + 5.0 * math.sqrt(21.0) / 36.0
    )


def example82_implicit_check(s: float, C: float) -> float:
    """Residual of the implicit integral of the tail-trace ODE:

    arctanh(sqrt((3-s)/7) C) - sqrt(7(3-s))(14-9C)/(63-9(3-s)C^2)
        - [arctanh(sqrt(3/7)) - 5 sqrt(21)/36].
    """
    if not 0.0 <= s < 3.0:
        raise DomainError("need 0 <= s < 3")
    arg = math.sqrt((3.0 - s) / 7.0) * C
    if arg >= 1.0:
        raise DomainError(f"arctanh argument {arg} >= 1")
    return (
        math.atanh(arg)
        - math.sqrt(7.0 * (3.0 - s)) * (14.0 - 9.0 * C) / (63.0 - 9.0 * (3.0 - s) * C * C)
        - _EX82_CONST
    )


# ---------------------------------------------------------------------------
# generalized-Burgers comparator of the example


def burgers_shock_position(t: float) -> float:
    """Bulk-shock position of the comparator: sqrt(42-12t) + 4t - 5 until the
    linear fan is absorbed at t = 11/4, then 9 + 2(t - 11/4)."""
    if t < 0.5:
        raise FluxsatError("the comparator's shock exists from t = 1/2")
    if t < 11.0 / 4.0:
        return math.sqrt(42.0 - 12.0 * t) + 4.0 * t - 5.0
    return 9.0 + 2.0 * (t - 11.0 / 4.0)


def burgers_example_eval(t: float, x: float) -> float:
    """Entropy solution of v_t = -(v^2)_x with the example's right-half datum
    extended by its maximum for x <= 0 (method of characteristics)."""
    if t < 0:
        raise FluxsatError("t must be nonnegative")
    xx = float(x)
    if t < 0.5:
        if xx <= 1.0 + 4.0 * t:
            return 2.0
        if xx <= 2.0 + 2.0 * t:
            return (3.0 - xx) / (1.0 - 2.0 * t)
        if xx <= 9.0:
            return (9.0 - xx) / (7.0 - 2.0 * t)
        return 0.0
    if t < 11.0 / 4.0:
        rv = burgers_shock_position(t)
        if xx <= rv:
            return 2.0
        if xx <= 9.0:
            return (9.0 - xx) / (7.0 - 2.0 * t)
        return 0.0
    return 2.0 if xx <= burgers_shock_position(t) else 0.0

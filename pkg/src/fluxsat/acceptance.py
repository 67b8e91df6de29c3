"""The acceptance suite: one function per criterion, shared by the CLI
``verify`` subcommand and the pytest acceptance module.

Each criterion returns a CriterionResult with the measured and expected
quantities at the tolerances fixed here; nothing is deferred to later
calibration.  Expensive runs (the reference self-similar simulation) are
cached and reused across criteria.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import diagnostics as dg
from .errors import FluxsatError
from .exact import (
    SelfSimilarSpec,
    WaitingTimeSpec,
    burgers_example_eval,
    burgers_shock_position,
    example82_eval,
    example82_f,
    example82_initial_profile,
    example82_solve,
    fsp_radius,
    self_similar_eval,
    self_similar_profile,
    wt_construct,
    wt_initial_profile,
)
from .fvm import FluxConfig, SchemeConfig, run_scenario
from .hyperbolic import JumpState, rh_speed
from .model import GridField, Params
from .numerics import Tolerances
from .tracker import tracker_evolve, tracker_init

__all__ = ["CriterionResult", "run_all", "CRITERIA"]

DEFAULT_SEED = 20260809


@dataclass
class CriterionResult:
    index: int
    name: str
    passed: bool
    measured: str
    expected: str
    runtime: float


def _result(index, name, passed, measured, expected, t0):
    return CriterionResult(index, name, bool(passed), measured, expected, time.time() - t0)


# reference scenario shared by criteria 1, 2, 3, 10, 11; the implicit output
# interval (= backward Euler step) scales with the mesh width
_REF = {
    "h": 1.0 / 512.0,
    "delta": 1e-3,
    "x_min": -4.0,
    "x_max": 4.0,
    "t_end": 1.0,
    "dt": 1.0 / 512.0,
}


def _reference_run(cache):
    if "reference" in cache:
        return cache["reference"]
    params = Params(2.0, 1)
    spec = SelfSimilarSpec()
    cells = int(round((_REF["x_max"] - _REF["x_min"]) / _REF["h"]))
    outs = np.arange(1, int(round(_REF["t_end"] / _REF["dt"])) + 1) * _REF["dt"]
    traj = run_scenario(
        self_similar_profile(spec, params, 0.0),
        params,
        FluxConfig("smoothed_sign", delta=_REF["delta"]),
        SchemeConfig("implicit", boundary="free"),
        _REF["t_end"],
        outs,
        grid=(_REF["x_min"], _REF["x_max"], cells),
    )
    cache["reference"] = (traj, params, spec)
    return cache["reference"]


def _rel_l1_vs_selfsimilar(field: GridField, params, spec, t):
    l1, _ = dg.error_norms(field, lambda tt, x: self_similar_eval(spec, params, tt, x), t)
    exact_mass = 2.0  # height r^-1 over width 2r
    return l1 / exact_mass


def criterion_1(cache, seed=DEFAULT_SEED):
    """Self-similar reproduction: implicit FV versus the closed form at t=1."""
    t0 = time.time()
    traj, params, spec = _reference_run(cache)
    rel = _rel_l1_vs_selfsimilar(traj.states[-1], params, spec, 1.0)
    runtime = time.time() - t0
    passed = rel <= 3e-2 and runtime <= 30.0
    return _result(1, "self-similar reproduction", passed,
                   f"rel L1 = {rel:.3e}",
                   "rel L1 <= 3e-2, runtime <= 30s", t0)


def criterion_2(cache, seed=DEFAULT_SEED):
    """Mass conservation: free/Neumann drift, absorbing boundary decrease."""
    t0 = time.time()
    traj, params, _ = _reference_run(cache)
    masses = np.array([r.mass for r in traj.records])
    drift_free = float(np.max(np.abs(masses - masses[0])) / masses[0])

    # Neumann box
    box = GridField(-1.0, 1.0 / 256.0, np.where(np.abs(np.linspace(-1, 1, 512)) < 0.5, 1.0, 0.0))
    trajN = run_scenario(box, params, FluxConfig("smoothed_sign", delta=1e-3),
                         SchemeConfig("implicit", boundary="neumann"),
                         0.5, np.arange(1, 251) * 2e-3)
    mN = np.array([r.mass for r in trajN.records])
    drift_neumann = float(np.max(np.abs(mN - mN[0])) / mN[0])

    # absorbing boundary with support touching it: mass strictly decreasing
    full = GridField(0.0, 1.0 / 256.0, np.full(256, 1.0))
    trajD = run_scenario(full, params, FluxConfig("smoothed_sign", delta=1e-3),
                         SchemeConfig("implicit", boundary="dirichlet_absorbing"),
                         0.2, np.arange(1, 101) * 2e-3)
    mD = np.array([r.mass for r in trajD.records])
    decreasing = bool(np.all(np.diff(mD) < 0.0))

    passed = drift_free <= 1e-12 and drift_neumann <= 1e-12 and decreasing
    return _result(2, "mass conservation", passed,
                   f"free drift {drift_free:.2e}, neumann drift {drift_neumann:.2e}, "
                   f"absorbing decreasing: {decreasing}",
                   "drifts <= 1e-12, absorbing strictly decreasing", t0)


def criterion_3(cache, seed=DEFAULT_SEED):
    """Finite speed of propagation on the reference run."""
    t0 = time.time()
    traj, params, _ = _reference_run(cache)
    R = math.sqrt(2.0)
    h = _REF["h"]
    worst = -math.inf
    for t, rec in zip(traj.times, traj.records):
        bound = fsp_radius(R, t, params) + 5.0 * h
        worst = max(worst, rec.support_radius - bound)
    passed = worst <= 0.0
    return _result(3, "finite speed of propagation", passed,
                   f"max(support - envelope - 5h) = {worst:.3e}",
                   "<= 0 at every output time", t0)


def criterion_4(cache, seed=DEFAULT_SEED):
    """Waiting time, exact: tracker onset at tau* = 1/2; closed-form wt data."""
    t0 = time.time()
    params1 = Params(2.0, 1)
    tol = Tolerances()
    spec1 = WaitingTimeSpec(1.0, 1.0, 1.0, 2.0)
    st = tracker_init(wt_initial_profile(spec1, params1))
    _, events = tracker_evolve(st, 1.0, tol, output_times=[0.25, 0.75])
    onset = [e.time for e in events if e.kind == "EdgeJumpOnset"]
    err_onset = abs(onset[0] - 0.5) if onset else math.inf

    params2 = Params(2.0, 2)
    wt = wt_construct(WaitingTimeSpec(1.0, 1.0, 1.0, 4.0), params2, tol)
    err_tau = abs(wt.tau_star - 7.0 / 3.0) / (7.0 / 3.0)
    err_K = abs(wt.K - 3.0 / 7.0) / (3.0 / 7.0)
    gap = abs(wt.rho(wt.tau_star * (1.0 - 1e-12)) - 4.0)

    runtime = time.time() - t0
    passed = err_onset <= 1e-8 and err_tau <= 1e-12 and err_K <= 1e-12 and gap <= 1e-6 \
        and runtime <= 5.0
    return _result(4, "waiting time (exact)", passed,
                   f"onset err {err_onset:.2e}, tau* err {err_tau:.2e}, "
                   f"K err {err_K:.2e}, R - rho(tau*) {gap:.2e}",
                   "onset <= 1e-8; tau*, K <= 1e-12 rel; gap <= 1e-6; runtime <= 5s", t0)


def criterion_5(cache, seed=DEFAULT_SEED):
    """Waiting time, numerical sandwich on u0 = min(1, x_+)."""
    t0 = time.time()
    params = Params(2.0, 1)
    h = 1.0 / 512.0
    x_min, x_max = -1.0, 3.0
    n = int(round((x_max - x_min) / h))
    faces = x_min + np.arange(n + 1) * h
    edge = h / 2.0  # support edge at a cell center

    def prim(y):
        z = y - edge
        return np.where(z <= 0, 0.0, np.where(z <= 1, z * z / 2.0, 0.5 + (z - 1.0)))

    u0 = (prim(faces[1:]) - prim(faces[:-1])) / h
    field = GridField(x_min, h, u0)
    # threshold above the O(h^2) saturated-flux leak (~5e-7 cells), far below
    # physical values; left support edge measured from the far right end
    thr = 1e-6 * float(np.max(u0))
    traj = run_scenario(field, params, FluxConfig("smoothed_sign", delta=1e-3),
                        SchemeConfig("implicit", boundary="neumann"),
                        0.6, np.arange(1, 601) * 1e-3,
                        support_center=x_max, support_threshold=thr)
    sr0 = traj.records[0].support_radius
    disp = {r.t: r.support_radius - sr0 for r in traj.records[1:]}
    early = max(v for t, v in disp.items() if t <= 0.45 + 1e-12)
    late = disp[max(disp)]
    passed = early <= 2.0 * h and late > 5.0 * h
    return _result(5, "waiting time (numerical sandwich)", passed,
                   f"displacement <= {early / h:.1f}h up to t=0.45; {late / h:.1f}h at t=0.6",
                   "<= 2h for t <= 0.45; > 5h by t = 0.6", t0)


def criterion_6(cache, seed=DEFAULT_SEED):
    """The worked 1D example: closure data from both constructions."""
    t0 = time.time()
    tol = Tolerances()
    ex = example82_solve(tol)
    ok_window = 0.5 < ex.t_star < 3.5
    resid_exact = abs(ex.r_star**2 - (28.0 * ex.t_star - 17.0))

    st = tracker_init(example82_initial_profile())
    _, events = tracker_evolve(st, 3.0, tol, output_times=[1.0, 2.0])
    closures = [e for e in events if e.kind == "JumpClosure"]
    t_star_tracker = closures[0].time if closures else math.inf
    r_star_tracker = closures[0].location if closures else math.inf
    resid_tracker = abs(r_star_tracker**2 - (28.0 * t_star_tracker - 17.0))
    dt_star = abs(t_star_tracker - ex.t_star)

    u_half = example82_eval(ex, 0.5, 0.0)
    u_end = example82_eval(ex, 3.5, 0.0)
    e_half = abs(u_half - 4.0 / 3.0)
    e_end = abs(u_end - 7.0 / 9.0)

    f0 = example82_f(0.0)
    fp0 = (example82_f(1e-6) - f0) / 1e-6
    fp0_exact = 7.0 * math.sqrt(7.0) / (144.0 * math.sqrt(3.0))
    f3 = example82_f(3.0)

    runtime = time.time() - t0
    passed = (ok_window and resid_exact <= 1e-6 and resid_tracker <= 1e-6
              and dt_star <= 1e-6 and e_half <= 1e-10 and e_end <= 1e-10
              and f0 == 0.0 and abs(fp0 - fp0_exact) <= 1e-4 and f3 < 0.0
              and runtime <= 5.0)
    return _result(6, "bulk-shock example", passed,
                   f"t*={ex.t_star:.8f}, residuals {resid_exact:.1e}/{resid_tracker:.1e}, "
                   f"|dt*|={dt_star:.1e}, plateau errs {e_half:.1e}/{e_end:.1e}, "
                   f"f'(0) err {abs(fp0 - fp0_exact):.1e}, f(3)={f3:.4f}",
                   "t* in (1/2,7/2); residuals <= 1e-6; |dt*| <= 1e-6; "
                   "plateaus <= 1e-10; f'(0) +- 1e-4; f(3) < 0; runtime <= 5s", t0)


def criterion_7(cache, seed=DEFAULT_SEED):
    """Rankine-Hugoniot: FV Riemann front speed and tracker front residual."""
    t0 = time.time()
    params = Params(2.0, 1)
    h = 1.0 / 512.0
    # long left plateau so the nonlocal plateau drain stays within tolerance
    x_min, x_max = -14.0, 1.5
    n = int(round((x_max - x_min) / h))
    xc = x_min + (np.arange(n) + 0.5) * h
    field = GridField(x_min, h, np.where(xc < 0.0, 2.0, 0.0))
    traj = run_scenario(field, params, FluxConfig("smoothed_sign", delta=1e-3),
                        SchemeConfig("implicit", boundary="neumann"),
                        0.2, np.arange(1, 201) * 1e-3)
    window = [i for i, t in enumerate(traj.times) if t >= 0.04]
    sub = type(traj)(
        times=tuple(traj.times[i] for i in window),
        states=tuple(traj.states[i] for i in window),
        records=tuple(traj.records[i] for i in window),
    )
    rec = dg.shock_track(sub, gradient_threshold=100.0)
    speed = rec[0].speed
    speed_err = abs(speed - 2.0) / 2.0

    # tracker: front speed versus RH speed along the whole jump phase, via
    # per-interval Gauss quadrature of the tabulated traces
    tol = Tolerances(rel_tol=1e-8, abs_tol=1e-10)
    ex = example82_solve(Tolerances())
    nodes, weights = np.polynomial.legendre.leggauss(5)
    edges = np.linspace(0.55, ex.t_star - 0.05, 41)
    times = set()
    for a, b in zip(edges[:-1], edges[1:]):
        times.update(0.5 * (a + b) + 0.5 * (b - a) * nodes)
    times.update(edges)
    st = tracker_init(example82_initial_profile())
    traj_tr, _ = tracker_evolve(st, float(edges[-1]) + 0.01, tol, output_times=sorted(times))
    by_t = dict(zip(traj_tr.times, traj_tr.states))

    def front(t):
        prof = by_t[t]
        j = prof.jumps[0]
        return j.x, j.left, j.right

    resid_max = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        ra = front(a)[0]
        rb = front(b)[0]
        integral = 0.0
        for x, w in zip(nodes, weights):
            tt = 0.5 * (a + b) + 0.5 * (b - a) * x
            _, D, C = front(tt)
            integral += 0.5 * (b - a) * w * rh_speed(JumpState(D, C), 2.0)
        resid_max = max(resid_max, abs(rb - ra - integral))
    thr = 10.0 * (tol.rel_tol * 7.0 + tol.abs_tol)

    passed = speed_err <= 0.05 and resid_max <= thr
    return _result(7, "Rankine-Hugoniot speeds", passed,
                   f"fv speed {speed:.4f} (err {speed_err:.1%}), "
                   f"tracker residual {resid_max:.2e} (thr {thr:.1e})",
                   "speed within 5% of 2; residual <= 10 * ODE tol", t0)


def criterion_8(cache, seed=DEFAULT_SEED):
    """Divergence from the generalized-Burgers comparator, all closed-form."""
    t0 = time.time()
    ex = example82_solve(Tolerances())
    errs = []
    for t in (0.6, 1.0, 1.5, 2.0, 2.5, 2.74):
        errs.append(abs(burgers_example_eval(t, 0.5 * burgers_shock_position(t)) - 2.0))
    v_plateau_err = max(errs)
    shock3 = burgers_shock_position(3.0)
    v_jump_ok = burgers_example_eval(3.0, 9.4) == 2.0 and burgers_example_eval(3.0, 9.6) == 0.0
    u_plateau_err = abs(example82_eval(ex, 3.5, 0.0) - 7.0 / 9.0)
    # after closure the solution is continuous at the former shock: the two
    # one-sided values agree
    gap = 0.0
    for t in (ex.t_star + 0.05, 2.5, 3.0):
        e = math.sqrt(28.0 * t - 17.0)
        gap = max(gap, abs(example82_eval(ex, t, e - 1e-9) - example82_eval(ex, t, e + 1e-9)))
    passed = (v_plateau_err <= 1e-10 and abs(shock3 - 9.5) <= 1e-10 and v_jump_ok
              and u_plateau_err <= 1e-10 and gap <= 1e-6)
    return _result(8, "Burgers comparator divergence", passed,
                   f"v plateau err {v_plateau_err:.1e}, shock(3)={shock3}, "
                   f"u plateau err {u_plateau_err:.1e}, post-closure gap {gap:.1e}",
                   "v plateau 2 for t < 11/4; shock at 9.5; u plateau 7/9; no bulk jump", t0)


def criterion_9(cache, seed=DEFAULT_SEED):
    """Discrete comparison principle: 20 seeded ordered pairs, explicit CFL."""
    t0 = time.time()
    from .fvm import stable_dt, step_explicit

    params = Params(2.0, 1)
    rng = np.random.default_rng(seed)
    flux = FluxConfig("smoothed_sign", delta=0.3)
    scheme = SchemeConfig("explicit", 0.4, 0.4, "neumann")
    violations = 0
    for _ in range(20):
        base = rng.uniform(0.0, 1.0, 128) * (rng.uniform(0.0, 1.0, 128) > 0.3)
        bump = rng.uniform(0.0, 0.5, 128) * (rng.uniform(0.0, 1.0, 128) > 0.3)
        u = GridField(0.0, 1.0 / 64.0, base)
        v = GridField(0.0, 1.0 / 64.0, base + bump)
        for _step in range(150):
            dt = min(stable_dt(u, flux, scheme, 2.0, 1.0),
                     stable_dt(v, flux, scheme, 2.0, 1.0))
            u = step_explicit(u, flux, scheme, dt, 2.0)
            v = step_explicit(v, flux, scheme, dt, 2.0)
            if np.any(u.values > v.values):
                violations += 1
                break
    passed = violations == 0
    return _result(9, "discrete comparison principle", passed,
                   f"{violations} violations over 20 pairs x 150 steps",
                   "zero violations", t0)


def criterion_10(cache, seed=DEFAULT_SEED):
    """Dyadic convergence study against the self-similar oracle."""
    t0 = time.time()
    params = Params(2.0, 1)
    spec = SelfSimilarSpec()
    levels = [(1.0 / 128.0, 4e-3), (1.0 / 256.0, 2e-3), (1.0 / 512.0, 1e-3)]
    errors = []
    for h, delta in levels:
        if abs(h - _REF["h"]) < 1e-15:
            traj, _, _ = _reference_run(cache)
        else:
            cells = int(round(8.0 / h))
            dt = h  # output interval scales with the mesh
            outs = np.arange(1, int(round(1.0 / dt)) + 1) * dt
            traj = run_scenario(self_similar_profile(spec, params, 0.0), params,
                                FluxConfig("smoothed_sign", delta=delta),
                                SchemeConfig("implicit", boundary="free"),
                                1.0, outs, grid=(-4.0, 4.0, cells))
        errors.append(_rel_l1_vs_selfsimilar(traj.states[-1], params, spec, 1.0))
    decreasing = all(e2 < e1 for e1, e2 in zip(errors, errors[1:]))
    order = dg.convergence_order(errors, [lv[0] for lv in levels])
    runtime = time.time() - t0
    passed = decreasing and order >= 0.7 and runtime <= 180.0
    cache["convergence"] = {"levels": levels, "errors": errors, "order": order}
    return _result(10, "convergence under joint refinement", passed,
                   f"errors {['%.3e' % e for e in errors]}, order {order:.2f}",
                   "strictly decreasing, order >= 0.7, runtime <= 180s", t0)


def criterion_11(cache, seed=DEFAULT_SEED):
    """Scaling invariance of the simulation under (T, X) = (4, 2)."""
    t0 = time.time()
    traj, params, spec = _reference_run(cache)
    base0 = traj.states[0]
    base1 = traj.states[-1]
    # transformed run: x' = 2x, t' = 4t, u' = u/2; gradients scale by 1/4,
    # so delta' = delta/4 makes the discrete dynamics exactly equivariant
    scaled0 = GridField(2.0 * base0.x_min, 2.0 * base0.h, base0.values / 2.0)
    outs = np.arange(1, int(round(_REF["t_end"] / _REF["dt"])) + 1) * (4.0 * _REF["dt"])
    traj2 = run_scenario(scaled0, params, FluxConfig("smoothed_sign", delta=_REF["delta"] / 4.0),
                         SchemeConfig("implicit", boundary="free"), 4.0, outs)
    mapped = 2.0 * traj2.states[-1].values  # at x' = 2x on the matching cells
    l1 = float(np.sum(np.abs(mapped - base1.values)) * base1.h)
    rel = l1 / 2.0
    bound = 2.0 * 3e-2
    passed = rel <= bound
    return _result(11, "scaling invariance", passed,
                   f"rel L1 difference after inverse rescaling = {rel:.3e}",
                   f"<= {bound:.1e}", t0)


CRITERIA = [
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
    criterion_10,
    criterion_11,
]


def run_all(seed: int = DEFAULT_SEED):
    """Run every criterion, reusing the reference simulation; returns results."""
    cache: dict = {}
    results = []
    for crit in CRITERIA:
        try:
            results.append(crit(cache, seed))
        except FluxsatError as exc:  # a failed construction is a failed criterion
            idx = len(results) + 1
            results.append(CriterionResult(idx, crit.__name__, False, f"error: {exc}", "", 0.0))
    return results

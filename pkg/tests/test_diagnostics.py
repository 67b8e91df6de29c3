import math

import numpy as np
import pytest

from fluxsat import GridField, Params, Trajectory, sample_profile
from fluxsat.diagnostics import (
    convergence_order,
    error_norms,
    mass,
    shock_track,
    support_radius,
    waiting_time_estimate,
)
from fluxsat.errors import DegenerateInput, NoShockFound
from fluxsat.exact import (
    SelfSimilarSpec,
    example82_initial_profile,
    self_similar_profile,
)

P21 = Params(2.0, 1)


def test_mass_examples():
    f = sample_profile(example82_initial_profile(), -10.0, 1.0 / 1024.0, 20480)
    assert mass(f, P21) == pytest.approx(14.0, abs=2.0 / 1024.0 * 4.0)
    zero = GridField(0.0, 0.1, np.zeros(10))
    assert mass(zero, P21) == 0.0
    ss = sample_profile(self_similar_profile(SelfSimilarSpec(), P21, 0.0), -4.0, 1.0 / 256.0, 2048)
    assert mass(ss, P21) == pytest.approx(2.0, abs=1e-10)


def test_support_radius():
    zero = GridField(0.0, 0.1, np.zeros(10))
    assert support_radius(zero, 1e-8) == 0.0
    f = sample_profile(self_similar_profile(SelfSimilarSpec(), P21, 1.0), -4.0, 1.0 / 256.0, 2048)
    assert support_radius(f, 1e-8) == pytest.approx(2.0, abs=1.0 / 256.0)
    assert support_radius(f, 10.0) == 0.0  # threshold above the maximum


def _traj_from_fields(times, fields):
    from fluxsat.model import DiagnosticsRecord

    recs = tuple(
        DiagnosticsRecord(t=t, mass=0.0, support_radius=support_radius(f, 1e-8))
        for t, f in zip(times, fields)
    )
    return Trajectory(tuple(times), tuple(fields), recs)


def test_waiting_time_estimate():
    h = 1.0 / 64.0
    n = 128
    xc = (np.arange(n) + 0.5) * h

    def box(radius):
        return GridField(0.0, h, np.where(xc < radius, 1.0, 0.0))

    # stationary support: never exceeds the displacement tolerance
    traj = _traj_from_fields([0.0, 0.1, 0.2], [box(1.0)] * 3)
    assert waiting_time_estimate(traj, 1.0, 2 * h) == math.inf
    # moving support: first crossing time is reported
    traj = _traj_from_fields([0.0, 0.1, 0.2], [box(1.0), box(1.0 + h), box(1.0 + 4 * h)])
    assert waiting_time_estimate(traj, 1.0, 2 * h) == 0.2
    zero = GridField(0.0, h, np.zeros(n))
    traj = _traj_from_fields([0.0, 0.1], [zero, zero])
    assert waiting_time_estimate(traj, 0.0, 2 * h) == math.inf


def test_shock_track_synthetic():
    # a sampled discontinuity moving at exactly speed 2; output times aligned
    # so the jump lands on cell interfaces and the fit is exact
    h = 1.0 / 128.0
    n = 512
    x_min = -1.0
    xc = x_min + (np.arange(n) + 0.5) * h
    times = [8.0 * h * k for k in range(6)]  # displacement 16 cells per output
    fields = [GridField(x_min, h, np.where(xc < 2.0 * t, 2.0, 0.0)) for t in times]
    traj = _traj_from_fields(times, fields)
    recs = shock_track(traj, gradient_threshold=10.0)
    assert len(recs) == 1
    assert recs[0].speed == pytest.approx(2.0, rel=1e-12)
    assert recs[0].left_traces[-1] == pytest.approx(2.0)
    assert recs[0].right_traces[-1] == pytest.approx(0.0, abs=1e-12)


def test_shock_track_smooth_raises():
    h = 1.0 / 64.0
    xc = (np.arange(128) + 0.5) * h
    fields = [GridField(0.0, h, 1.0 + 0.1 * np.sin(xc + t)) for t in (0.0, 0.1, 0.2)]
    with pytest.raises(NoShockFound):
        shock_track(_traj_from_fields([0.0, 0.1, 0.2], fields), gradient_threshold=10.0)


def test_error_norms():
    spec = SelfSimilarSpec()
    from fluxsat.exact import self_similar_eval

    def oracle(t, x):
        return self_similar_eval(spec, P21, t, x)

    n, h = 512, 1.0 / 128.0
    xc = -2.0 + (np.arange(n) + 0.5) * h
    f = GridField(-2.0, h, np.array([oracle(0.0, x) for x in xc]))
    l1, linf = error_norms(f, oracle, 0.0)
    assert l1 == 0.0 and linf == 0.0
    # shifting the oracle by one cell costs ~ h * (jump height) at each front
    l1s, _ = error_norms(f, lambda t, x: oracle(t, x - h), 0.0)
    jump = oracle(0.0, 0.0)
    assert l1s == pytest.approx(2.0 * h * jump, rel=0.6)


def test_convergence_order_examples():
    assert convergence_order([0.1, 0.05], [1e-2, 5e-3]) == pytest.approx(1.0, rel=1e-12)
    assert convergence_order([0.1, 0.1, 0.1], [4e-2, 2e-2, 1e-2]) == pytest.approx(0.0, abs=1e-12)
    assert convergence_order([0.1, 0.071], [1e-2, 5e-3]) == pytest.approx(
        math.log(0.1 / 0.071) / math.log(2.0), rel=1e-12
    )
    assert convergence_order([0.1, 0.071], [1e-2, 5e-3]) == pytest.approx(0.494, abs=5e-4)


def test_convergence_order_degenerate():
    with pytest.raises(DegenerateInput):
        convergence_order([0.1], [1e-2])
    with pytest.raises(DegenerateInput):
        convergence_order([0.1, 0.05], [1e-2, 2e-2])
    with pytest.raises(DegenerateInput):
        convergence_order([0.1, 0.0], [1e-2, 5e-3])


def test_fv_bulk_shock_speed_vs_tracker():
    # the worked example's bulk shock in the FV solver moves at the tracker's
    # RH speed D + C within 5%, fitted while the jump is alive (it closes at
    # t* ~ 1.66, so the window is [1, 1.5])
    from fluxsat import Tolerances
    from fluxsat.exact import example82_eval, example82_solve
    from fluxsat.fvm import FluxConfig, SchemeConfig, run_scenario
    from fluxsat.hyperbolic import JumpState, rh_speed
    from fluxsat.tracker import tracker_evolve, tracker_init

    ex = example82_solve(Tolerances())
    h = 1.0 / 256.0
    n = int(round(20.0 / h))
    xc = -10.0 + (np.arange(n) + 0.5) * h
    t_start = 0.6
    u0 = np.array([example82_eval(ex, t_start, x) for x in xc])
    f = GridField(-10.0, h, u0)
    traj = run_scenario(f, P21, FluxConfig("smoothed_sign", delta=1e-3),
                        SchemeConfig("implicit", boundary="neumann"),
                        0.4, np.arange(1, 201) * 2e-3)
    shifted = Trajectory(
        tuple(t_start + t for t in traj.times), traj.states, traj.records
    )
    # threshold between the tail slope (~0.2) and the smeared jump slope
    recs = shock_track(shifted, gradient_threshold=1.0)
    right = [r for r in recs if np.mean(r.positions) > 0]
    fitted = max(right, key=lambda r: len(r.times)).speed

    # reference speed: mean RH speed over the window from the tracker
    st = tracker_init(example82_initial_profile())
    times = list(np.round(np.linspace(t_start, 1.0, 21), 6))
    traj_tr, _ = tracker_evolve(st, 1.0, Tolerances(), output_times=times)
    speeds = []
    for t, prof in zip(traj_tr.times, traj_tr.states):
        if t < t_start - 1e-9:
            continue
        j = prof.jumps[0]
        speeds.append(rh_speed(JumpState(j.left, j.right), 2.0))
    ref = float(np.mean(speeds))
    assert fitted == pytest.approx(ref, rel=0.05)


def test_riemann_speed_converges_with_refinement():
    # the fitted front speed approaches the exact front's window slope under
    # refinement, strictly improving over three levels
    from fluxsat.fvm import FluxConfig, SchemeConfig, run_scenario

    L = 10.0
    errs = []
    for h in (1.0 / 64.0, 1.0 / 128.0, 1.0 / 256.0):
        n = int(round((1.0 + L) / h))
        xc = -L + (np.arange(n) + 0.5) * h
        f = GridField(-L, h, np.where(xc < 0.0, 2.0, 0.0))
        traj = run_scenario(f, P21, FluxConfig("smoothed_sign", delta=1e-3),
                            SchemeConfig("implicit", boundary="neumann"),
                            0.2, np.arange(1, 101) * 2e-3)
        rec = shock_track(traj, gradient_threshold=20.0)[0]
        ts = np.array(rec.times)
        exact_pos = -L + np.sqrt(L * L + 4.0 * L * ts)  # draining-plateau front
        ref = float(np.polyfit(ts, exact_pos, 1)[0])
        errs.append(abs(rec.speed - ref))
    assert errs[1] < errs[0] and errs[2] < errs[1]


def test_waiting_time_estimate_sandwich():
    # barrier-bounded datum min(1, x_+): the estimated waiting time lands in
    # the sandwich around tau_low = tau_up = 1/2
    from fluxsat.exact import waiting_bounds
    from fluxsat.fvm import FluxConfig, SchemeConfig, run_scenario

    h = 1.0 / 512.0
    x_min, x_max = -1.0, 3.0
    n = int(round((x_max - x_min) / h))
    faces = x_min + np.arange(n + 1) * h
    edge = h / 2.0

    def prim(y):
        z = y - edge
        return np.where(z <= 0, 0.0, np.where(z <= 1, z * z / 2.0, 0.5 + (z - 1.0)))

    u0 = (prim(faces[1:]) - prim(faces[:-1])) / h
    field = GridField(x_min, h, u0)
    traj = run_scenario(field, P21, FluxConfig("smoothed_sign", delta=1e-3),
                        SchemeConfig("implicit", boundary="neumann"),
                        0.6, np.arange(1, 601) * 1e-3,
                        support_center=x_max, support_threshold=1e-6)
    tau_low, tau_up = waiting_bounds(1.0, 1.0, P21)
    sr0 = traj.records[0].support_radius
    estimate = waiting_time_estimate(traj, sr0, 5.0 * h)
    band = 0.1
    assert tau_low * (1.0 - band) <= estimate <= tau_up * (1.0 + band) + 5.0 * h


def test_waiting_time_estimate_fv_plateau_datum():
    # FV run of the m=2, N=1 waiting datum (D0=C0=rho0=1, R=2, tau* = 1/2):
    # the estimated onset lies in [0.9 tau*, 1.1 tau* + 5h]
    from fluxsat import Params, Tolerances
    from fluxsat.exact import WaitingTimeSpec, wt_initial_profile
    from fluxsat.fvm import FluxConfig, SchemeConfig, run_scenario

    params = Params(2.0, 1)
    prof = wt_initial_profile(WaitingTimeSpec(1.0, 1.0, 1.0, 2.0), params)
    h = 1.0 / 512.0
    traj = run_scenario(prof, params, FluxConfig("smoothed_sign", delta=1e-3),
                        SchemeConfig("implicit", boundary="neumann"),
                        0.7, np.arange(1, 701) * 1e-3, grid=(-3.0, 3.0, 3072),
                        support_threshold=1e-6)
    est = waiting_time_estimate(traj, 2.0, 5.0 * h)
    assert 0.9 * 0.5 <= est <= 1.1 * 0.5 + 5.0 * h

import numpy as np
import pytest

from fluxsat import Params, PiecewiseProfile, Tolerances, constant, linear, profile_eval
from fluxsat.errors import UnsupportedProfile
from fluxsat.exact import (
    WaitingTimeSpec,
    example82_eval,
    example82_initial_profile,
    example82_solve,
    wt_construct,
    wt_eval,
    wt_initial_profile,
)
from fluxsat.tracker import tracker_evolve, tracker_init, tracker_to_profile

TOL = Tolerances()
P21 = Params(2.0, 1)


def test_init_example_datum():
    st = tracker_init(example82_initial_profile())
    assert st.plateau == 2.0
    assert st.edge == 1.0
    assert st.mode == "continuous"
    assert [(s.a, s.b, s.right_end) for s in st.segments] == [
        (-1.0, 3.0, 2.0),
        (-1.0 / 7.0, 9.0 / 7.0, 9.0),
    ]
    assert st.half_mass == pytest.approx(7.0, rel=1e-15)


def test_init_pure_plateau():
    prof = PiecewiseProfile((0.0, 1.0), (constant(1.0),), symmetric=True)
    st = tracker_init(prof)
    assert st.mode == "jump" and not st.segments  # already in the merged regime
    assert st.edge_trace == 0.0
    assert st.half_mass == 1.0


def test_init_waiting_datum():
    spec = WaitingTimeSpec(1.0, 1.0, 1.0, 2.0)
    st = tracker_init(wt_initial_profile(spec, P21))
    assert st.mode == "continuous"
    assert len(st.segments) == 1
    assert st.segments[0].a == pytest.approx(-1.0)  # psi is linear for p = 1
    assert st.half_mass == pytest.approx(1.5, rel=1e-15)


def test_init_rejects_unsupported():
    with pytest.raises(UnsupportedProfile):
        tracker_init(example82_initial_profile().__class__(  # not symmetric
            (0.0, 1.0), (constant(1.0),), symmetric=False,
        ))
    with pytest.raises(UnsupportedProfile):  # increasing tail piece
        tracker_init(PiecewiseProfile(
            (0.0, 1.0, 2.0), (constant(1.0), linear(0.5, 0.5)), symmetric=True,
        ))
    with pytest.raises(UnsupportedProfile):  # second plateau in the tail
        tracker_init(PiecewiseProfile(
            (0.0, 1.0, 2.0, 3.0), (constant(2.0), linear(-1.0, 3.0), constant(1.0)),
            symmetric=True,
        ))


def test_roundtrip_profile_state():
    for prof in (example82_initial_profile(),
                 wt_initial_profile(WaitingTimeSpec(1.0, 1.0, 1.0, 2.0), P21)):
        st = tracker_init(prof)
        back = tracker_to_profile(st)
        assert back.breakpoints == prof.breakpoints
        assert back.pieces == prof.pieces
        assert tracker_init(back) == st


def test_example82_first_singularity():
    st = tracker_init(example82_initial_profile())
    traj, events = tracker_evolve(st, 0.5, TOL, output_times=[0.25])
    kinds = [e.kind for e in events]
    assert "GradientBlowup" in kinds and "EdgeJumpOnset" in kinds
    assert all(abs(e.time - 0.5) <= 1e-10 for e in events)
    final = traj.states[-1]
    assert profile_eval(final, 0.0) == pytest.approx(4.0 / 3.0, rel=1e-9)
    assert final.breakpoints[1] == pytest.approx(3.0, rel=1e-9)


def test_example82_closure_and_merge():
    st = tracker_init(example82_initial_profile())
    traj, events = tracker_evolve(st, 4.0, TOL, output_times=[1.0, 2.0, 3.0])
    closure = [e for e in events if e.kind == "JumpClosure"]
    assert len(closure) == 1
    t_star, r_star = closure[0].time, closure[0].location
    assert 0.5 < t_star < 3.5
    assert abs(r_star**2 - (28.0 * t_star - 17.0)) <= 1e-6
    merge = [e for e in events if e.kind == "SupportMerge"]
    assert len(merge) == 1
    assert merge[0].time == pytest.approx(3.5, abs=1e-9)
    assert merge[0].location == pytest.approx(9.0, abs=1e-8)


def test_cross_oracle_example82():
    # two independent constructions of the same solution
    ex = example82_solve(TOL)
    st = tracker_init(example82_initial_profile())
    times = [0.1, 0.25, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0,
             2.3, 2.6, 2.9, 3.2, 3.4, 3.6, 3.8, 4.0, 4.5]
    traj, _ = tracker_evolve(st, 4.5, TOL, output_times=times)
    xs = np.linspace(0.0, 11.0, 157)
    worst = 0.0
    for t, prof in zip(traj.times, traj.states):
        for x in xs:
            worst = max(worst, abs(profile_eval(prof, x) - example82_eval(ex, t, x)))
    assert worst <= 1e-6


def test_cross_oracle_waiting_time():
    spec = WaitingTimeSpec(1.0, 1.0, 1.0, 2.0)
    wt = wt_construct(spec, P21, TOL)
    st = tracker_init(wt_initial_profile(spec, P21))
    times = list(np.round(np.linspace(0.03, 1.0, 20), 6))
    traj, events = tracker_evolve(st, 1.0, TOL, output_times=times)
    onset = [e for e in events if e.kind == "EdgeJumpOnset"]
    assert abs(onset[0].time - 0.5) <= 1e-8  # tau* = 1/2 for this datum
    xs = np.linspace(0.0, 2.7, 108)
    worst = 0.0
    for t, prof in zip(traj.times, traj.states):
        for x in xs:
            worst = max(worst, abs(profile_eval(prof, x) - wt_eval(wt, t, x)))
    assert worst <= 1e-6
    # the tracker plateau near tau*/2 matches the closed-form construction
    t_mid = times[4]
    prof_mid = traj.states[traj.times.index(t_mid)]
    assert abs(profile_eval(prof_mid, 0.0) - wt_eval(wt, t_mid, 0.0)) <= 1e-8


def test_half_mass_conserved_and_monotone():
    st = tracker_init(example82_initial_profile())
    times = list(np.linspace(0.2, 4.4, 22))
    traj, _ = tracker_evolve(st, 4.4, TOL, output_times=times)
    masses = [r.mass for r in traj.records]
    np.testing.assert_allclose(masses, 14.0, rtol=1e-8)
    plateaus = [r.plateau_height for r in traj.records]
    assert all(b <= a + 1e-10 for a, b in zip(plateaus, plateaus[1:]))
    support = [r.support_radius for r in traj.records]
    assert all(b >= a - 1e-10 for a, b in zip(support, support[1:]))


def test_waiting_support_stationary():
    # while the profile stays continuous at its edge the support cannot move
    spec = WaitingTimeSpec(1.0, 1.0, 1.0, 2.0)
    st = tracker_init(wt_initial_profile(spec, P21))
    times = [0.1, 0.2, 0.3, 0.4, 0.45, 0.49]
    traj, _ = tracker_evolve(st, 0.49, TOL, output_times=times)
    for rec in traj.records:
        assert rec.support_radius == 2.0


def test_jump_speed_matches_rh():
    # in jump mode the dense front interpolant satisfies dr/dt = D + C
    from fluxsat.hyperbolic import JumpState, rh_speed

    st = tracker_init(example82_initial_profile())
    times = list(np.round(np.linspace(0.6, 1.6, 26), 8))
    traj, _ = tracker_evolve(st, 1.6, TOL, output_times=times)
    rs, speeds = [], []
    for t, prof in zip(traj.times, traj.states):
        if t < 0.6 - 1e-12:
            continue
        j = prof.jumps[0]
        rs.append((t, j.x))
        speeds.append(rh_speed(JumpState(j.left, j.right), 2.0))
    for (t1, r1), (t2, r2), s1, s2 in zip(rs[:-1], rs[1:], speeds[:-1], speeds[1:]):
        fd = (r2 - r1) / (t2 - t1)
        assert fd == pytest.approx(0.5 * (s1 + s2), rel=5e-3)


def test_segment_handoff_before_horizon():
    # a shallow first tail piece is consumed by the plateau long before its
    # characteristics focus: the profile stays continuous across the kink
    prof = PiecewiseProfile(
        (0.0, 1.0, 2.0, 5.8),
        (constant(2.0), linear(-0.1, 2.1), linear(-0.5, 2.9)),
        symmetric=True,
    )
    st = tracker_init(prof)
    traj, events = tracker_evolve(st, 0.2, TOL, output_times=[0.05, 0.1])
    assert [e.kind for e in events] == ["SegmentCollapse"]
    assert events[0].time < 0.1  # well before the piece's horizon at t = 5
    np.testing.assert_allclose([r.mass for r in traj.records], 2 * st.half_mass, rtol=1e-8)


def test_jump_swallows_segment():
    # a moving edge jump overruns its first tail piece and continues into
    # the next one with a continuous outer trace
    from fluxsat.model import JumpMarker

    prof = PiecewiseProfile(
        (0.0, 1.0, 1.2, 3.6),
        (constant(2.0), linear(-0.2, 1.2), linear(-0.4, 1.44)),
        symmetric=True,
        jumps=(JumpMarker(1.0, 2.0, 1.0),),
    )
    st = tracker_init(prof)
    assert st.mode == "jump"
    traj, events = tracker_evolve(st, 0.4, TOL, output_times=[0.1, 0.3])
    assert [e.kind for e in events] == ["SegmentCollapse"]
    np.testing.assert_allclose([r.mass for r in traj.records], 2 * st.half_mass, rtol=1e-8)


def test_interior_blowup_rejected():
    # the second tail piece focuses before the plateau can reach it: a bulk
    # shock would form in the tail, outside the supported profile class
    from fluxsat.errors import UnsupportedEvolution

    prof = PiecewiseProfile(
        (0.0, 1.0, 5.0, 5.23),
        (constant(0.5), linear(-0.01, 0.51), linear(-2.0, 10.46)),
        symmetric=True,
    )
    st = tracker_init(prof)
    with pytest.raises(UnsupportedEvolution):
        tracker_evolve(st, 1.0, TOL)

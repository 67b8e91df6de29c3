"""Exact front-dynamics evolver for m = 2, N = 1 single-plateau profiles.

Automates the constructive recipe behind the closed-form families: outer
linear segments ride their characteristics (staying linear only for m = 2),
the central plateau obeys D' = -D^2/r while the profile is continuous at its
edge, and once a jump forms the edge follows the Rankine-Hugoniot speed with
the plateau height pinned by the conserved half-mass.  Phase changes are
located as ODE events; after the profile collapses to a pure plateau it
follows the self-similar expansion law.

Only symmetric, nonincreasing, single-plateau piecewise-linear data are
supported; the right half carries the whole computation.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    FluxsatError,
    InvariantViolation,
    UnsupportedEvolution,
    UnsupportedProfile,
)
from .model import (
    DiagnosticsRecord,
    JumpMarker,
    PiecewiseProfile,
    Trajectory,
    constant,
    linear,
)
from .numerics import Event, OdeProblem, Tolerances, ode_solve

__all__ = [
    "Segment",
    "TrackerState",
    "TrackerEvent",
    "tracker_init",
    "tracker_evolve",
    "tracker_to_profile",
    "state_half_mass",
]

_M = 2.0  # the tracker is m = 2 only; linear pieces stay linear
_MASS_TOL = 1e-8
_EDGE_TINY = 1e-11


@dataclass(frozen=True)
class Segment:
    """Outer linear piece u = a x + b on [left neighbour's end, right_end]."""

    a: float
    b: float
    right_end: float

    def value(self, x: float) -> float:
        return self.a * x + self.b

    @property
    def kink_value(self) -> float:
        # value at the right end; constant along the kink's characteristic
        return self.a * self.right_end + self.b

    @property
    def focus(self) -> float:
        return -self.b / self.a


@dataclass(frozen=True)
class TrackerState:
    """Right-half profile state at one instant.

    mode "continuous": plateau D on [0, r] with D = segments[0](r);
    mode "jump": plateau on [0, r) jumping down to edge_trace, which equals
    segments[0](r) (or 0 when no segments remain: the self-similar regime,
    where D = M/r).
    """

    time: float
    plateau: float
    edge: float
    mode: str  # "continuous" | "jump"
    edge_trace: float
    segments: tuple
    half_mass: float

    @property
    def support_edge(self) -> float:
        return self.segments[-1].right_end if self.segments else self.edge


@dataclass(frozen=True)
class TrackerEvent:
    kind: str  # SegmentCollapse | GradientBlowup | EdgeJumpOnset | JumpClosure | SupportMerge
    time: float
    location: float


def state_half_mass(state: TrackerState) -> float:
    total = state.plateau * state.edge
    left = state.edge
    for seg in state.segments:
        e = seg.right_end
        total += seg.a * (e * e - left * left) / 2.0 + seg.b * (e - left)
        left = e
    return total


def tracker_init(profile: PiecewiseProfile) -> TrackerState:
    """Build a tracker state from a symmetric single-plateau profile.

    The edge mode (continuous versus jump) is inferred from continuity at
    the plateau edge; the conserved half-mass is computed once here.
    """
    if not profile.symmetric:
        raise UnsupportedProfile("tracker needs a symmetric profile")
    bp = profile.breakpoints
    pieces = profile.pieces
    if bp[0] != 0.0:
        raise UnsupportedProfile("profile must start at x = 0")
    if pieces[0].kind != "constant" or pieces[0].b <= 0:
        raise UnsupportedProfile("first piece must be a positive central plateau")
    D = pieces[0].b
    r = bp[1]

    segments = []
    for i, p in enumerate(pieces[1:], start=1):
        if p.kind != "linear" or p.a >= 0:
            raise UnsupportedProfile("tail must be strictly decreasing linear pieces")
        segments.append(Segment(p.a, p.b, bp[i + 1]))
    segments = tuple(segments)

    scale = D
    for j in profile.jumps:
        if segments and j.x == bp[1]:
            continue  # plateau-edge jump, handled below
        if not segments and j.x == bp[-1]:
            continue  # pure plateau: support-edge jump against 0
        raise UnsupportedProfile(f"unsupported jump marker at x = {j.x}")

    if segments:
        if abs(segments[-1].kink_value) > 1e-9 * scale:
            raise UnsupportedProfile("tail must reach 0 at the support edge")
        trace = segments[0].value(r)
        if trace > D + 1e-9 * scale:
            raise UnsupportedProfile("profile must be nonincreasing at the plateau edge")
        mode = "jump" if D - trace > 1e-9 * scale else "continuous"
        edge_trace = trace if mode == "jump" else D
    else:
        mode = "jump"  # pure plateau: expanding self-similar regime
        edge_trace = 0.0
        r = bp[-1]

    state = TrackerState(0.0, D, r, mode, edge_trace, segments, 0.0)
    M = state_half_mass(state)
    return replace(state, half_mass=M)


def tracker_to_profile(state: TrackerState) -> PiecewiseProfile:
    """Lossless conversion back to a profile, including the jump marker."""
    bps = [0.0, state.edge]
    pieces = [constant(state.plateau)]
    for seg in state.segments:
        bps.append(seg.right_end)
        pieces.append(linear(seg.a, seg.b))
    jumps = ()
    if state.mode == "jump" and state.plateau - state.edge_trace > _EDGE_TINY:
        jumps = (JumpMarker(state.edge, state.plateau, state.edge_trace),)
    return PiecewiseProfile(tuple(bps), tuple(pieces), symmetric=True, jumps=jumps)


# ---------------------------------------------------------------------------
# phase integration


def _advected(seg: Segment, dt: float) -> Segment:
    den = 1.0 + 2.0 * seg.a * dt
    if den <= 0:
        raise UnsupportedEvolution("segment advected beyond its horizon")
    return Segment(seg.a / den, seg.b / den, seg.right_end + 2.0 * seg.kink_value * dt)


def _horizon(seg: Segment) -> float:
    # relative to the segment's anchor time; slope < 0 guaranteed
    return -1.0 / (2.0 * seg.a)


def _tail_mass(segments, r: float, dt: float) -> float:
    """Mass of the advected tail right of r, dt after the anchor time."""
    total = 0.0
    left = r
    for seg in segments:
        den = 1.0 + 2.0 * seg.a * dt
        e = seg.right_end + 2.0 * seg.kink_value * dt
        total += (seg.a * (e * e - left * left) / 2.0 + seg.b * (e - left)) / den
        left = e
    return total


class _Phase:
    """Result of integrating one phase: dense state sampler + transition."""

    def __init__(self, t_end, sample, new_state, events):
        self.t_end = t_end
        self.sample = sample  # t -> TrackerState
        self.new_state = new_state  # state just after the transition (or at t_end)
        self.events = events


def _continuous_phase(state: TrackerState, t_stop_req: float, tol: Tolerances) -> _Phase:
    t0 = state.time
    segs = state.segments
    seg1 = segs[0]
    a1, b1 = seg1.a, seg1.b
    t_h1 = t0 + _horizon(seg1)

    # a later segment pinching first is an interior blow-up outside the
    # supported class; integrate only up to that horizon and require the
    # phase to end (by consumption or t_end) before reaching it
    t_guard = min((t0 + _horizon(seg) for seg in segs[1:]), default=float("inf"))

    def r_of(t, D):
        # continuity point of the plateau on the advected first segment,
        # written without dividing by the vanishing denominator
        den = 1.0 + 2.0 * a1 * (t - t0)
        return (D * den - b1) / a1

    def rhs(t, y):
        return [-y[0] ** 2 / r_of(t, y[0])]

    events = ()
    if len(segs) > 1:
        kink = seg1.kink_value

        def consume(t, y):
            return (seg1.right_end + 2.0 * kink * (t - t0)) - r_of(t, y[0])

        events = (Event(consume, True, -1.0),)

    t_stop = min(t_h1, t_stop_req, t_guard * (1.0 - 1e-12))
    sol = ode_solve(OdeProblem(rhs, t0, np.array([state.plateau]), events), t_stop, tol)

    def sample(t):
        D = float(sol(t)[0])
        dt = t - t0
        return TrackerState(
            t, D, r_of(t, D), "continuous", D,
            tuple(_advected(s, dt) for s in segs), state.half_mass,
        )

    fired = events and len(sol.event_times[0]) > 0
    t_ev = float(sol.event_times[0][0]) if fired else sol.t_end

    if fired and t_ev < t_h1 * (1.0 - 1e-10) - 4.0 * tol.abs_tol:
        # plateau consumed the first segment before its horizon: the values
        # match at the kink, so the profile stays continuous
        D_ev = float(sol.event_states[0][0][0])
        x_ev = r_of(t_ev, D_ev)
        dt = t_ev - t0
        new = TrackerState(
            t_ev, D_ev, x_ev, "continuous", D_ev,
            tuple(_advected(s, dt) for s in segs[1:]), state.half_mass,
        )
        return _Phase(t_ev, sample, new, [TrackerEvent("SegmentCollapse", t_ev, x_ev)])

    if sol.t_end >= t_stop_req * (1.0 - 1e-14) and t_stop_req < t_h1 * (1.0 - 1e-14):
        return _Phase(sol.t_end, sample, sample(sol.t_end), [])

    if t_guard < min(t_h1, t_stop_req) and sol.t_end >= t_guard * (1.0 - 1e-11):
        raise UnsupportedEvolution("interior gradient blow-up outside the supported class")

    # reached the horizon: the segment pinches at its focus and the plateau
    # detaches into a jump there
    t_ev = t_h1
    x_ev = seg1.focus
    D_ev = float(sol(min(t_ev, sol.t_end))[0])
    dt = t_ev - t0
    evs = [TrackerEvent("GradientBlowup", t_ev, x_ev), TrackerEvent("EdgeJumpOnset", t_ev, x_ev)]
    rest = tuple(_advected(s, dt) for s in segs[1:])
    if rest:
        trace = rest[0].value(x_ev)
        D_alg = (state.half_mass - _tail_mass(rest, x_ev, 0.0)) / x_ev
        new = TrackerState(t_ev, D_alg, x_ev, "jump", trace, rest, state.half_mass)
    else:
        # last segment gone: pure plateau with a jump at the support edge
        evs.append(TrackerEvent("SupportMerge", t_ev, x_ev))
        D_alg = state.half_mass / x_ev
        new = TrackerState(t_ev, D_alg, x_ev, "jump", 0.0, (), state.half_mass)
    if abs(D_alg - D_ev) > 1e-6 * max(1.0, D_ev):
        raise InvariantViolation(
            f"plateau height drifted from the mass constraint: {D_ev} vs {D_alg}"
        )
    return _Phase(t_ev, sample, new, evs)


def _jump_phase(state: TrackerState, t_stop_req: float, tol: Tolerances) -> _Phase:
    t0 = state.time
    segs = state.segments
    M = state.half_mass

    if not segs:
        # self-similar regime: D = M/r, edge speed = RH speed of (D, 0) = D
        def rhs(t, y):
            return [M / y[0]]

        sol = ode_solve(OdeProblem(rhs, t0, np.array([state.edge])), t_stop_req, tol)

        def sample(t):
            r = float(sol(t)[0])
            return TrackerState(t, M / r, r, "jump", 0.0, (), M)

        return _Phase(sol.t_end, sample, sample(sol.t_end), [])

    seg1 = segs[0]
    t_h1 = t0 + _horizon(seg1)
    t_guard = min((t0 + _horizon(seg) for seg in segs[1:]), default=float("inf"))

    def C_of(t, r):
        return (seg1.a * r + seg1.b) / (1.0 + 2.0 * seg1.a * (t - t0))

    def D_of(t, r):
        return (M - _tail_mass(segs, r, t - t0)) / r

    def rhs(t, y):
        r = y[0]
        # RH speed of the (D, C) jump for m = 2 is D + C
        return [D_of(t, r) + C_of(t, r)]

    def closure(t, y):
        return D_of(t, y[0]) - C_of(t, y[0])

    kink = seg1.kink_value

    def consume(t, y):
        return (seg1.right_end + 2.0 * kink * (t - t0)) - y[0]

    events = (Event(closure, True, -1.0), Event(consume, True, -1.0))
    # the shock always catches the segment end before its horizon; a later
    # segment pinching first would be an unsupported interior blow-up
    t_stop = min(t_stop_req, t_h1 * (1.0 - 1e-13), t_guard * (1.0 - 1e-12))
    sol = ode_solve(OdeProblem(rhs, t0, np.array([state.edge]), events), t_stop, tol)

    def sample(t):
        r = float(sol(t)[0])
        dt = t - t0
        return TrackerState(
            t, D_of(t, r), r, "jump", C_of(t, r),
            tuple(_advected(s, dt) for s in segs), M,
        )

    closed = len(sol.event_times[0]) > 0
    consumed = len(sol.event_times[1]) > 0

    if closed:
        t_ev = float(sol.event_times[0][0])
        r_ev = float(sol.event_states[0][0][0])
        dt = t_ev - t0
        D_ev = D_of(t_ev, r_ev)
        new = TrackerState(
            t_ev, D_ev, r_ev, "continuous", D_ev,
            tuple(_advected(s, dt) for s in segs), M,
        )
        return _Phase(t_ev, sample, new, [TrackerEvent("JumpClosure", t_ev, r_ev)])

    if consumed:
        t_ev = float(sol.event_times[1][0])
        r_ev = float(sol.event_states[1][0][0])
        dt = t_ev - t0
        rest = tuple(_advected(s, dt) for s in segs[1:])
        evs = [TrackerEvent("SegmentCollapse", t_ev, r_ev)]
        if rest:
            new = TrackerState(
                t_ev, D_of(t_ev, r_ev), r_ev, "jump", rest[0].value(r_ev), rest, M
            )
        else:
            evs.append(TrackerEvent("SupportMerge", t_ev, r_ev))
            new = TrackerState(t_ev, M / r_ev, r_ev, "jump", 0.0, (), M)
        return _Phase(t_ev, sample, new, evs)

    if sol.t_end < t_stop_req * (1.0 - 1e-12):
        raise UnsupportedEvolution("jump phase reached a segment horizon without an event")
    return _Phase(sol.t_end, sample, sample(sol.t_end), [])


# ---------------------------------------------------------------------------
# public evolution driver


def _record(state: TrackerState) -> DiagnosticsRecord:
    shock = ()
    if state.mode == "jump" and state.plateau - state.edge_trace > _EDGE_TINY:
        shock = (state.edge,)
    return DiagnosticsRecord(
        t=state.time,
        mass=2.0 * state_half_mass(state),
        support_radius=state.support_edge,
        shock_positions=shock,
        plateau_height=state.plateau,
        min_value=0.0,
        max_value=state.plateau,
    )


def tracker_evolve(state: TrackerState, t_end: float, tol: Tolerances,
                   output_times=None):
    """Advance the coupled plateau/segment system to ``t_end``.

    Returns ``(trajectory, events)``: the trajectory holds the profile and a
    diagnostics record at the initial time, each requested output time, and
    t_end; the event list carries every phase transition in deterministic
    order.  The conserved half-mass is verified at every sampled state to
    1e-8 relative.
    """
    if t_end <= state.time:
        raise FluxsatError("t_end must exceed the state time")
    outs = sorted(set(float(t) for t in (output_times or [])) | {t_end})

    times = [state.time]
    states = [state]
    events: list[TrackerEvent] = []
    current = state
    pending = [t for t in outs if t > state.time]

    guard = 0
    while current.time < t_end * (1.0 - 1e-14) - 1e-300:
        guard += 1
        if guard > 64:
            raise UnsupportedEvolution("too many phase transitions")
        if current.mode == "continuous":
            phase = _continuous_phase(current, t_end, tol)
        else:
            phase = _jump_phase(current, t_end, tol)
        while pending and pending[0] <= phase.t_end * (1.0 + 1e-14):
            t = pending.pop(0)
            # at a phase boundary the post-transition state is the valid one
            if t >= phase.t_end * (1.0 - 1e-14):
                s = phase.new_state
            else:
                s = phase.sample(t)
            times.append(t)
            states.append(s)
        events.extend(phase.events)
        current = phase.new_state

    if times[-1] < t_end:
        times.append(t_end)
        states.append(current)

    records = []
    M = state.half_mass
    for s in states:
        m_here = state_half_mass(s)
        if abs(m_here - M) > _MASS_TOL * M:
            raise InvariantViolation(
                f"half-mass drifted to {m_here} (expected {M}) at t = {s.time}"
            )
        records.append(_record(s))

    traj = Trajectory(
        times=tuple(times),
        states=tuple(tracker_to_profile(s) for s in states),
        records=tuple(records),
        metadata={"solver": "tracker", "m": _M, "dim": 1, "half_mass": M},
    )
    return traj, events

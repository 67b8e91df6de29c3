"""fluxsat: a desk-scale laboratory for flux-saturated nonlinear diffusion.

The package provides closed-form solution families with their constructive
steps (``exact``), a conservative finite-volume solver for the regularized
equation (``fvm``), an exact front tracker for m = 2 piecewise-linear data
(``tracker``), the scalar conservation-law kernel they share
(``hyperbolic``), shared ODE/root-finding machinery (``numerics``),
quantitative diagnostics (``diagnostics``), and a command-line interface
(``cli``) whose ``verify`` subcommand runs the full acceptance suite.
"""

from .diagnostics import (
    convergence_order,
    error_norms,
    mass,
    shock_track,
    support_radius,
    waiting_time_estimate,
)
from .exact import (
    Example82Solution,
    SelfSimilarSpec,
    WaitingTimeSolution,
    WaitingTimeSpec,
    barrier_eval,
    burgers_example_eval,
    example82_eval,
    example82_solve,
    fsp_radius,
    self_similar_eval,
    waiting_bounds,
    wt_construct,
    wt_eval,
)
from .fvm import FluxConfig, SchemeConfig, numerical_flux, run_scenario, stable_dt
from .hyperbolic import JumpState, char_speed, jump_admissible, kruzhkov_residual, rh_speed
from .model import (
    DiagnosticsRecord,
    GridField,
    JumpMarker,
    Params,
    Piece,
    PiecewiseProfile,
    Trajectory,
    constant,
    linear,
    profile_eval,
    profile_mass,
    sample_profile,
)
from .numerics import Event, OdeProblem, OdeResult, Tolerances, find_root, ode_solve
from .tracker import TrackerEvent, TrackerState, tracker_evolve, tracker_init, tracker_to_profile

__all__ = [
    "Params",
    "PiecewiseProfile",
    "Piece",
    "JumpMarker",
    "GridField",
    "DiagnosticsRecord",
    "Trajectory",
    "constant",
    "linear",
    "profile_eval",
    "profile_mass",
    "sample_profile",
    "Tolerances",
    "OdeProblem",
    "OdeResult",
    "Event",
    "ode_solve",
    "find_root",
    "SelfSimilarSpec",
    "WaitingTimeSpec",
    "WaitingTimeSolution",
    "Example82Solution",
    "self_similar_eval",
    "fsp_radius",
    "barrier_eval",
    "waiting_bounds",
    "wt_construct",
    "wt_eval",
    "example82_solve",
    "example82_eval",
    "burgers_example_eval",
    "JumpState",
    "rh_speed",
    "char_speed",
    "jump_admissible",
    "kruzhkov_residual",
    "TrackerState",
    "TrackerEvent",
    "tracker_init",
    "tracker_evolve",
    "tracker_to_profile",
    "FluxConfig",
    "SchemeConfig",
    "numerical_flux",
    "stable_dt",
    "run_scenario",
    "mass",
    "support_radius",
    "waiting_time_estimate",
    "shock_track",
    "error_norms",
    "convergence_order",
]

__version__ = "0.1.0"

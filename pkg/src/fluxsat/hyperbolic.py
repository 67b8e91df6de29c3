"""Scalar conservation-law kernel for monotone regions.

Where the solution is strictly monotone in x the flux-saturated equation
reduces to u_t + s (u^m)_x = 0 with s = -sign(u_x): this module holds the
characteristic and Rankine-Hugoniot speeds, the admissibility checks, the
exact m = 2 evolution of linear pieces, and a discrete Kruzhkov entropy
residual restricted to such fixed-sign regions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FluxsatError, GridMismatch, Unsupported
from .model import GridField

__all__ = [
    "JumpState",
    "rh_speed",
    "char_speed",
    "jump_admissible",
    "advect_linear_piece",
    "kruzhkov_residual",
]


@dataclass(frozen=True)
class JumpState:
    """Traces on the two sides of a discontinuity.

    ``u_minus``/``u_plus`` are the left/right traces in 1D; ``orientation``
    is the unit normal (+1 for a front moving toward larger x).
    """

    u_minus: float
    u_plus: float
    orientation: int = 1

    def __post_init__(self):
        if self.u_minus < 0 or self.u_plus < 0:
            raise FluxsatError("traces must be nonnegative")
        if self.orientation not in (-1, 1):
            raise FluxsatError("orientation must be +1 or -1")


def rh_speed(jump: JumpState, m: float) -> float:
    """Rankine-Hugoniot quotient ((u+)^m - (u-)^m) / (u+ - u-).

    Symmetric in the traces; at equal traces it returns the characteristic
    limit m*u^(m-1).  Always nonnegative for nonnegative traces (the
    orientation supplies the direction of travel).
    """
    a, b = jump.u_minus, jump.u_plus
    if a == b:
        return char_speed(a, m)
    return (a**m - b**m) / (a - b)


def char_speed(u: float, m: float) -> float:
    """Characteristic speed m*u^(m-1) of the flux u^m."""
    if u < 0:
        raise FluxsatError("state must be nonnegative")
    if u == 0.0:
        return 0.0
    return m * u ** (m - 1.0)


def jump_admissible(jump: JumpState, front_speed: float, m: float, tol: float,
                    flux_sign: int | None = None) -> bool:
    """Check a moving discontinuity against the jump conditions.

    Without ``flux_sign`` this is the full-equation check: the speed must
    match the Rankine-Hugoniot quotient (times orientation); the flux-trace
    condition is then automatically satisfiable by convexity of s -> s^m, so
    upward jumps at the support boundary are admissible.  With ``flux_sign``
    set (+1 for flux +u^m on decreasing regions, -1 mirrored) the jump is
    additionally held to the Oleinik condition of the embedded conservation
    law, which rejects expansion shocks.
    """
    expected = jump.orientation * rh_speed(jump, m)
    if flux_sign is not None:
        expected = flux_sign * rh_speed(jump, m)
    if abs(front_speed - expected) > tol:
        return False
    if flux_sign is not None:
        if flux_sign * (jump.u_minus - jump.u_plus) < 0:
            return False
    return True


def advect_linear_piece(slope: float, intercept: float, t: float, flux_sign: int,
                        m: float = 2.0):
    """Exact evolution of a linear datum under u_t + s(u^2)_x = 0 (m = 2 only).

    The datum a*x + b becomes (a*x + b)/(1 + 2*s*a*t); characteristics of a
    linear piece all cross at the horizon t = -1/(2*s*a), where the slope
    blows up.  Returns (slope, intercept, horizon); horizon is +inf when the
    denominator can never vanish for t > 0.
    """
    if m != 2.0:
        raise Unsupported("linear pieces stay linear only for m = 2")
    if flux_sign not in (-1, 1):
        raise FluxsatError("flux_sign must be +1 or -1")
    a, b, s = float(slope), float(intercept), flux_sign
    horizon = np.inf if s * a >= 0 else -1.0 / (2.0 * s * a)
    den = 1.0 + 2.0 * s * a * t
    if den <= 0:
        raise FluxsatError(f"evolution requested beyond the horizon {horizon}")
    return a / den, b / den, horizon


def _godunov_flux(a, b, m, flux_sign):
    """Saturated-limiter (Godunov) flux of u_t + s(u^m)_x = 0 on u >= 0.

    This is the limit of the solver's regularized flux at steep interfaces
    and uses the same upwind rule: characteristics move with sign s, so the
    upwind state is the left one for s = +1 and the right one for s = -1.
    """
    up = a if flux_sign > 0 else b
    return flux_sign * up**m


def kruzhkov_residual(prev: GridField, curr: GridField, dt: float, k: float,
                      m: float, flux_sign: int) -> np.ndarray:
    """Per-cell residual of the discrete Kruzhkov entropy inequality.

    Entropy pair eta(u) = |u - k|, q(u) = s*sign(u - k)(u^m - k^m); the
    numerical entropy flux is the standard monotone-scheme construction
    Q(a, b) = F(a v k, b v k) - F(a ^ k, b ^ k) built on the saturated
    upwind flux.  Valid on fixed-sign monotone regions only; admissible
    evolutions give residuals <= 0 up to rounding there, while a transported
    expansion shock shows strictly positive residual in the crossing cells.
    """
    if not prev.same_grid(curr):
        raise GridMismatch("fields live on different grids")
    if dt <= 0:
        raise FluxsatError("dt must be positive")
    u0, u1 = prev.values, curr.values
    h = prev.h

    def Q(a, b):
        return _godunov_flux(np.maximum(a, k), np.maximum(b, k), m, flux_sign) - _godunov_flux(
            np.minimum(a, k), np.minimum(b, k), m, flux_sign
        )

    q_interior = Q(u0[:-1], u0[1:])
    # zero-flux extension at the ends: constant ghost states
    q = np.concatenate(([Q(u0[0], u0[0])], q_interior, [Q(u0[-1], u0[-1])]))
    eta0 = np.abs(u0 - k)
    eta1 = np.abs(u1 - k)
    return (eta1 - eta0) / dt + (q[1:] - q[:-1]) / h

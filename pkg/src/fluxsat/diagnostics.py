"""Quantitative post-processing: masses, support radii, waiting times,
shock tracking, error norms, convergence orders."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput, FluxsatError, NoShockFound
from .model import GridField, Params, Trajectory, sphere_surface_measure

__all__ = [
    "mass",
    "support_radius",
    "waiting_time_estimate",
    "steep_clusters",
    "shock_track",
    "ShockRecord",
    "error_norms",
    "convergence_order",
]

DEFAULT_SUPPORT_FACTOR = 1e-8  # threshold = factor * max(u0); leaked tails sit far below


def mass(field: GridField, params: Params) -> float:
    """Discrete mass: h * sum(u) on a line, shell-volume-weighted radially
    (including the surface measure of the unit sphere)."""
    w = field.cell_volumes()
    total = float(np.sum(w * field.values))
    if field.geometry == "radial":
        total *= sphere_surface_measure(field.dim)
    return total


def support_radius(field: GridField, threshold: float, center: float = 0.0) -> float:
    """Largest |x_i - center| over cells with u_i > threshold, else 0."""
    if threshold <= 0:
        raise FluxsatError("threshold must be positive")
    idx = field.values > threshold
    if not np.any(idx):
        return 0.0
    return float(np.max(np.abs(field.centers[idx] - center)))


def waiting_time_estimate(trajectory: Trajectory, edge0: float, displacement_tol: float) -> float:
    """First output time whose recorded support radius exceeds
    edge0 + displacement_tol; +inf when the support never moves that far."""
    if len(trajectory) < 2:
        raise FluxsatError("need at least two trajectory samples")
    for rec in trajectory.records:
        if rec.support_radius > edge0 + displacement_tol:
            return rec.t
    return math.inf


def steep_clusters(field: GridField, gradient_threshold: float):
    """Steep-gradient interface clusters: (centroid, total_jump, i_lo, i_hi).

    Interfaces with |du|/h above the threshold are grouped when adjacent;
    the centroid weights interface positions by their jump sizes.
    """
    u = field.values
    d = np.abs(np.diff(u)) / field.h
    steep = np.where(d > gradient_threshold)[0]
    clusters = []
    if steep.size == 0:
        return clusters
    faces = field.faces
    start = prev = steep[0]
    groups = []
    for i in steep[1:]:
        if i == prev + 1:
            prev = i
        else:
            groups.append((start, prev))
            start = prev = i
    groups.append((start, prev))
    for lo, hi in groups:
        ii = np.arange(lo, hi + 1)
        w = d[ii]
        pos = float(np.sum(w * faces[ii + 1]) / np.sum(w))
        clusters.append((pos, float(np.sum(np.abs(np.diff(u))[ii])), int(lo), int(hi)))
    return clusters


@dataclass(frozen=True)
class ShockRecord:
    """One tracked discontinuity: per-time positions, least-squares speed,
    and plateau-averaged traces reconstructed 3 cells beyond the cluster."""

    times: tuple
    positions: tuple
    speed: float
    left_traces: tuple
    right_traces: tuple


def _traces(field: GridField, i_lo: int, i_hi: int, pad: int = 3):
    u = field.values
    left = u[max(i_lo - pad, 0): i_lo + 1]
    right = u[i_hi + 1: i_hi + 2 + pad]
    lv = float(np.mean(left)) if left.size else float(u[0])
    rv = float(np.mean(right)) if right.size else float(u[-1])
    return lv, rv


def shock_track(trajectory: Trajectory, gradient_threshold: float, min_samples: int = 3):
    """Track steep-gradient clusters through a 1D grid trajectory.

    Clusters at consecutive output times are associated to the nearest
    previous position; each surviving track with at least ``min_samples``
    samples gets a least-squares fitted speed.  Raises NoShockFound when no
    track survives (e.g. smooth fields).
    """
    fields = [s for s in trajectory.states if isinstance(s, GridField)]
    if len(fields) != len(trajectory.states):
        raise FluxsatError("shock_track needs a grid-field trajectory")
    tracks = []  # each: dict(times, positions, lt, rt)
    h = fields[0].h
    window = max(10 * h, 0.15 * fields[0].n * h)
    for t, f in zip(trajectory.times, fields):
        for pos, jump, i_lo, i_hi in steep_clusters(f, gradient_threshold):
            lv, rv = _traces(f, i_lo, i_hi)
            best = None
            for tr in tracks:
                dist = abs(tr["positions"][-1] - pos)
                if dist <= window and (best is None or dist < best[0]):
                    if tr["times"][-1] < t:
                        best = (dist, tr)
            if best is None:
                tracks.append(
                    {"times": [t], "positions": [pos], "lt": [lv], "rt": [rv]}
                )
            else:
                tr = best[1]
                tr["times"].append(t)
                tr["positions"].append(pos)
                tr["lt"].append(lv)
                tr["rt"].append(rv)
    records = []
    for tr in tracks:
        if len(tr["times"]) < min_samples:
            continue
        speed = float(np.polyfit(tr["times"], tr["positions"], 1)[0])
        records.append(
            ShockRecord(
                tuple(tr["times"]),
                tuple(tr["positions"]),
                speed,
                tuple(tr["lt"]),
                tuple(tr["rt"]),
            )
        )
    if not records:
        raise NoShockFound("no steep-gradient cluster persisted across the trajectory")
    return records


def shock_report_csv(trajectory: Trajectory, gradient_threshold: float) -> str:
    """CSV `t,mass,support_radius,shock_pos,shock_speed` per output time.

    The shock columns come from the longest tracked cluster; times it does
    not cover carry empty fields.
    """
    try:
        recs = shock_track(trajectory, gradient_threshold)
        track = max(recs, key=lambda r: len(r.times))
        by_time = dict(zip(track.times, track.positions))
        speed = track.speed
    except NoShockFound:
        by_time, speed = {}, None
    fmt = "%.17g"
    lines = ["t,mass,support_radius,shock_pos,shock_speed"]
    for rec in trajectory.records:
        pos = by_time.get(rec.t)
        lines.append(",".join([
            fmt % rec.t,
            fmt % rec.mass,
            fmt % rec.support_radius,
            fmt % pos if pos is not None else "",
            fmt % speed if pos is not None else "",
        ]))
    return "\n".join(lines) + "\n"


def error_norms(field: GridField, oracle, t: float):
    """(L1, Linf) discrepancy between cell values and an exact solution
    evaluated at cell midpoints; L1 carries the cell volume weights."""
    xc = field.centers
    exact = np.array([oracle(t, x) for x in xc])
    diff = np.abs(field.values - exact)
    w = field.cell_volumes()
    if field.geometry == "radial":
        w = w * sphere_surface_measure(field.dim)
    return float(np.sum(w * diff)), float(np.max(diff))


def convergence_order(errors, hs) -> float:
    """Least-squares slope of log(error) against log(h)."""
    errors = [float(e) for e in errors]
    hs = [float(h) for h in hs]
    if len(errors) != len(hs) or len(errors) < 2:
        raise DegenerateInput("need matching lists with at least two levels")
    if any(h2 >= h1 for h1, h2 in zip(hs, hs[1:])):
        raise DegenerateInput("hs must be strictly decreasing")
    if any(e <= 0 for e in errors):
        raise DegenerateInput("errors must be positive for a log fit")
    return float(np.polyfit(np.log(hs), np.log(errors), 1)[0])

"""Core domain types: parameters, piecewise profiles, grid fields, trajectories.

All types are immutable values after construction and all operations are pure
functions, so everything here is safe to share between threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import FluxsatError, GridMismatch

__all__ = [
    "Params",
    "Piece",
    "constant",
    "linear",
    "JumpMarker",
    "PiecewiseProfile",
    "GridField",
    "DiagnosticsRecord",
    "Trajectory",
    "profile_eval",
    "profile_mass",
    "sphere_surface_measure",
    "sample_profile",
    "profile_to_json",
    "profile_from_json",
    "field_to_csv",
    "field_from_csv",
]


@dataclass(frozen=True)
class Params:
    """Nonlinearity exponent m > 1 and spatial dimension, plus derived constants.

    alpha = 1/(N(m-1)+1) is the self-similar expansion exponent and
    p = (N(m-1)+1)/m = 1/(m*alpha) the waiting-time exponent.  p = 1 exactly
    when N = 1; all downstream formulas remain well defined in that case.
    """

    m: float
    dim: int = 1

    def __post_init__(self):
        if not self.m > 1:
            raise FluxsatError(f"need m > 1, got m={self.m}")
        if not (isinstance(self.dim, (int, np.integer)) and self.dim >= 1):
            raise FluxsatError(f"need integer dim >= 1, got {self.dim}")

    @property
    def alpha(self) -> float:
        return 1.0 / (self.dim * (self.m - 1.0) + 1.0)

    @property
    def p(self) -> float:
        return (self.dim * (self.m - 1.0) + 1.0) / self.m


# surface measure of the unit sphere S^(N-1); index by N
_SPHERE_SURFACE = [2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0) for n in range(1, 12)]


def sphere_surface_measure(dim: int) -> float:
    """Total (N-1)-measure of the unit sphere in R^N (2 for N=1, 2*pi for N=2, ...)."""
    if dim < 1:
        raise FluxsatError("dim must be >= 1")
    if dim <= len(_SPHERE_SURFACE):
        return _SPHERE_SURFACE[dim - 1]
    return 2.0 * math.pi ** (dim / 2.0) / math.gamma(dim / 2.0)


@dataclass(frozen=True)
class Piece:
    """One segment of a piecewise profile, value a*x + b (a = 0 for plateaus)."""

    kind: str  # "constant" | "linear"
    a: float
    b: float

    def __post_init__(self):
        if self.kind not in ("constant", "linear"):
            raise FluxsatError(f"unknown piece kind {self.kind!r}")
        if self.kind == "constant" and self.a != 0.0:
            raise FluxsatError("constant piece must have a = 0")

    def value(self, x):
        return self.a * np.asarray(x, dtype=float) + self.b


def constant(height: float) -> Piece:
    return Piece("constant", 0.0, float(height))


def linear(slope: float, intercept: float) -> Piece:
    return Piece("linear", float(slope), float(intercept))


@dataclass(frozen=True)
class JumpMarker:
    """Explicit jump at a breakpoint with recorded one-sided traces."""

    x: float
    left: float
    right: float


_CONT_TOL = 1e-9


@dataclass(frozen=True)
class PiecewiseProfile:
    """Piecewise constant/linear profile with compact support.

    ``breakpoints`` is strictly ascending with one more entry than ``pieces``.
    The value is 0 outside [breakpoints[0], breakpoints[-1]].  With
    ``symmetric=True`` the profile is evaluated at |x| (mirror about 0), and
    breakpoints must be nonnegative.

    At each interior breakpoint the two one-sided limits either agree or the
    breakpoint carries an explicit jump marker storing both traces; support
    edges with a nonzero closing trace get a marker against 0 automatically.
    Traces are stored explicitly so that shock operations never re-derive them.
    """

    breakpoints: tuple
    pieces: tuple
    symmetric: bool = False
    jumps: tuple = field(default=())

    def __post_init__(self):
        bp = tuple(float(x) for x in self.breakpoints)
        pieces = tuple(self.pieces)
        if len(bp) < 2 or len(pieces) != len(bp) - 1:
            raise FluxsatError("need k+1 breakpoints for k pieces")
        if any(b2 <= b1 for b1, b2 in zip(bp, bp[1:])):
            raise FluxsatError("breakpoints must be strictly ascending")
        if self.symmetric and bp[0] < 0:
            raise FluxsatError("symmetric profile needs nonnegative breakpoints")

        scale = max(abs(p.value(x)) for p in pieces for x in bp) + 1.0
        marked = {float(j.x): j for j in self.jumps}
        for j in self.jumps:
            if not any(abs(j.x - b) <= _CONT_TOL * scale for b in bp):
                raise FluxsatError(f"jump marker at {j.x} is not at a breakpoint")

        jumps = dict(marked)
        # interior continuity unless explicitly marked
        for i in range(1, len(bp) - 1):
            left = pieces[i - 1].value(bp[i])
            right = pieces[i].value(bp[i])
            if abs(left - right) > _CONT_TOL * scale and bp[i] not in jumps:
                raise FluxsatError(
                    f"discontinuity at interior breakpoint {bp[i]} without a jump marker"
                )
        # implicit jumps against 0 at the support edges
        first = pieces[0].value(bp[0])
        if not self.symmetric and abs(first) > _CONT_TOL * scale and bp[0] not in jumps:
            jumps[bp[0]] = JumpMarker(bp[0], 0.0, first)
        last = pieces[-1].value(bp[-1])
        if abs(last) > _CONT_TOL * scale and bp[-1] not in jumps:
            jumps[bp[-1]] = JumpMarker(bp[-1], last, 0.0)

        if min(min(p.value(bp[i]), p.value(bp[i + 1])) for i, p in enumerate(pieces)) < -_CONT_TOL * scale:
            raise FluxsatError("profile takes negative values")

        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "pieces", pieces)
        object.__setattr__(self, "jumps", tuple(jumps[x] for x in sorted(jumps)))

    @property
    def support_edge(self) -> float:
        return self.breakpoints[-1]

    def _jump_at(self, x: float):
        for j in self.jumps:
            if x == j.x:
                return j
        return None


def profile_eval(profile: PiecewiseProfile, x: float) -> float:
    """Pointwise value; at a jump breakpoint returns the mean of the traces.

    The trace-mean convention is the precise-representative choice for BV
    functions; it never affects integrals.
    """
    xx = float(x)
    if profile.symmetric:
        xx = abs(xx)
    bp = profile.breakpoints
    if xx < bp[0] or xx > bp[-1]:
        return 0.0
    for j in profile.jumps:
        if xx == j.x:
            return 0.5 * (j.left + j.right)
    # bisect into the covering piece; interior breakpoints are continuous here
    i = int(np.searchsorted(bp, xx, side="right")) - 1
    i = min(max(i, 0), len(profile.pieces) - 1)
    return float(profile.pieces[i].value(xx))


def _piece_integral(a: float, b: float, x0: float, x1: float, dim: int) -> float:
    """Exact integral of (a*x + b) * x^(dim-1) over [x0, x1]."""
    n = dim
    return a * (x1 ** (n + 1) - x0 ** (n + 1)) / (n + 1) + b * (x1**n - x0**n) / n


def profile_mass(profile: PiecewiseProfile, params: Params) -> float:
    """Closed-form integral of the profile (no quadrature error).

    Line geometry integrates dx; symmetric profiles are treated as radial with
    the exact surface measure of the unit sphere (which reduces to the factor
    2 in one dimension).
    """
    bp = profile.breakpoints
    if profile.symmetric:
        w = sphere_surface_measure(params.dim)
        total = sum(
            _piece_integral(p.a, p.b, bp[i], bp[i + 1], params.dim)
            for i, p in enumerate(profile.pieces)
        )
        return w * total
    if params.dim != 1:
        raise FluxsatError("radial mass requires a symmetric profile")
    return sum(
        _piece_integral(p.a, p.b, bp[i], bp[i + 1], 1) for i, p in enumerate(profile.pieces)
    )


def _profile_primitive(profile: PiecewiseProfile, x: np.ndarray) -> np.ndarray:
    """Antiderivative of the (possibly mirrored) profile, for exact cell averages."""
    bp = profile.breakpoints

    def prim_half(y):
        if y <= bp[0]:
            return 0.0
        acc = 0.0
        for i, p in enumerate(profile.pieces):
            lo, hi = bp[i], bp[i + 1]
            if y <= lo:
                break
            yy = min(y, hi)
            acc += p.a * (yy**2 - lo**2) / 2 + p.b * (yy - lo)
        return acc

    def prim(y):
        if profile.symmetric:
            return math.copysign(prim_half(abs(y)), y)
        return prim_half(y)

    return np.array([prim(float(v)) for v in np.atleast_1d(x)])


@dataclass(frozen=True)
class GridField:
    """Uniform-grid cell averages; geometry either a 1D line or radial shells.

    Radial fields live on [0, n*h] with x_min = 0; ``dim`` is the spatial
    dimension carried by the radial weight r^(N-1).
    """

    x_min: float
    h: float
    values: np.ndarray
    geometry: str = "line"  # "line" | "radial"
    dim: int = 1

    def __post_init__(self):
        if self.h <= 0:
            raise FluxsatError("cell width must be positive")
        if self.geometry not in ("line", "radial"):
            raise FluxsatError(f"unknown geometry {self.geometry!r}")
        if self.geometry == "radial" and self.x_min != 0.0:
            raise FluxsatError("radial fields must start at r = 0")
        if self.geometry == "line" and self.dim != 1:
            raise FluxsatError("line geometry is one-dimensional")
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise FluxsatError("values must be a nonempty 1D array")
        if np.min(v) < 0:
            raise FluxsatError("field values must be nonnegative")
        if not np.all(np.isfinite(v)):
            raise FluxsatError("field values must be finite")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.n) + 0.5) * self.h

    @property
    def faces(self) -> np.ndarray:
        return self.x_min + np.arange(self.n + 1) * self.h

    def cell_volumes(self) -> np.ndarray:
        """Volume weight of each cell (h on a line, shell volume / sphere measure radially)."""
        if self.geometry == "line":
            return np.full(self.n, self.h)
        f = self.faces
        return (f[1:] ** self.dim - f[:-1] ** self.dim) / self.dim

    def with_values(self, values: np.ndarray) -> "GridField":
        return GridField(self.x_min, self.h, values, self.geometry, self.dim)

    def same_grid(self, other: "GridField") -> bool:
        return (
            self.n == other.n
            and self.geometry == other.geometry
            and self.dim == other.dim
            and abs(self.x_min - other.x_min) <= 1e-14 * max(1.0, abs(self.x_min))
            and abs(self.h - other.h) <= 1e-14 * self.h
        )


def sample_profile(
    profile: PiecewiseProfile,
    x_min: float,
    h: float,
    n: int,
    geometry: str = "line",
    dim: int = 1,
) -> GridField:
    """Exact cell averages of a piecewise profile on a uniform grid.

    Radial sampling averages against the shell weight r^(N-1) so that the
    discrete mass of the sample equals the closed-form profile mass exactly.
    """
    faces = x_min + np.arange(n + 1) * h
    if geometry == "line":
        prim = _profile_primitive(profile, faces)
        vals = np.diff(prim) / h
    else:
        if not profile.symmetric:
            raise FluxsatError("radial sampling requires a symmetric profile")
        bp = profile.breakpoints
        vols = (faces[1:] ** dim - faces[:-1] ** dim) / dim
        vals = np.zeros(n)
        for i in range(n):
            lo_f, hi_f = faces[i], faces[i + 1]
            acc = 0.0
            for k, p in enumerate(profile.pieces):
                lo = max(lo_f, bp[k])
                hi = min(hi_f, bp[k + 1])
                if hi > lo:
                    acc += _piece_integral(p.a, p.b, lo, hi, dim)
            vals[i] = acc / vols[i]
    return GridField(x_min, h, np.clip(vals, 0.0, None), geometry, dim)


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    mass: float
    support_radius: float
    shock_positions: tuple = ()
    plateau_height: float | None = None
    min_value: float = 0.0
    max_value: float = 0.0

    def __post_init__(self):
        if self.support_radius < 0 or self.mass < 0:
            raise FluxsatError("support radius and mass must be nonnegative")


@dataclass(frozen=True)
class Trajectory:
    """Time-stamped states (grid fields or profiles) plus per-time diagnostics."""

    times: tuple
    states: tuple
    records: tuple = ()
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        t = tuple(float(x) for x in self.times)
        if len(t) != len(self.states) or not t:
            raise FluxsatError("one state per time required")
        if any(t2 <= t1 for t1, t2 in zip(t, t[1:])):
            raise FluxsatError("times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "records", tuple(self.records))

    def __len__(self):
        return len(self.times)


# ---------------------------------------------------------------------------
# serialization

_FMT = "%.17g"


def profile_to_json(profile: PiecewiseProfile) -> str:
    doc = {
        "breakpoints": list(profile.breakpoints),
        "pieces": [{"kind": p.kind, "a": p.a, "b": p.b} for p in profile.pieces],
        "symmetric": profile.symmetric,
        "jumps": [{"x": j.x, "left": j.left, "right": j.right} for j in profile.jumps],
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def profile_from_json(text: str) -> PiecewiseProfile:
    doc = json.loads(text)
    return PiecewiseProfile(
        breakpoints=tuple(doc["breakpoints"]),
        pieces=tuple(Piece(p["kind"], p["a"], p["b"]) for p in doc["pieces"]),
        symmetric=bool(doc.get("symmetric", False)),
        jumps=tuple(JumpMarker(j["x"], j["left"], j["right"]) for j in doc.get("jumps", ())),
    )


def field_to_csv(fieldv: GridField) -> str:
    lines = ["x,u"]
    for x, u in zip(fieldv.centers, fieldv.values):
        lines.append(f"{_FMT % x},{_FMT % u}")
    return "\n".join(lines) + "\n"


def field_from_csv(text: str, geometry: str = "line", dim: int = 1) -> GridField:
    rows = [r for r in text.strip().splitlines() if r.strip()]
    if rows[0].strip() != "x,u":
        raise FluxsatError("field CSV must start with header 'x,u'")
    data = np.array([[float(c) for c in r.split(",")] for r in rows[1:]])
    x, u = data[:, 0], data[:, 1]
    if len(x) < 2:
        raise GridMismatch("need at least two cells")
    h = x[1] - x[0]
    if np.max(np.abs(np.diff(x) - h)) > 1e-12 * abs(h):
        raise GridMismatch("cells are not uniform")
    return GridField(float(x[0] - h / 2), float(h), u, geometry, dim)

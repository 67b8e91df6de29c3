"""Command-line interface: exact, simulate, track, convergence,
compare-burgers, and verify subcommands.

Configuration is a single JSON document; unknown keys are hard errors, since
silently ignored typos are the classic failure mode of scientific configs.
Exit codes: 0 success, 1 verification failure, 2 config error, 3 solver
failure.  All floating-point output uses 17 significant digits so files
round-trip exactly, and reruns with the same config and seed are
byte-identical.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

import numpy as np

from . import acceptance
from . import diagnostics as dg
from .errors import ConfigError, FluxsatError
from .exact import (
    SelfSimilarSpec,
    WaitingTimeSpec,
    burgers_example_eval,
    burgers_shock_position,
    example82_eval,
    example82_initial_profile,
    example82_solve,
    self_similar_eval,
    self_similar_profile,
    wt_construct,
    wt_eval,
    wt_initial_profile,
)
from .fvm import FluxConfig, SchemeConfig, run_scenario
from .model import GridField, Params, PiecewiseProfile, field_to_csv, profile_eval, profile_from_json
from .numerics import Tolerances
from .tracker import tracker_evolve, tracker_init

_FMT = "%.17g"

def _grid_times(t_end, dt):
    return [round(dt * k, 12) for k in range(1, int(round(t_end / dt)) + 1)]


# "output_times" drive the stepping (the implicit step equals the output
# interval) and the diagnostics rows; full-field CSVs are written at "times"
PRESETS = {
    "self_similar": {
        "m": 2.0, "dim": 1, "x_min": -4.0, "x_max": 4.0, "cells": 4096,
        "flux": {"variant": "smoothed_sign", "delta": 1e-3},
        "stepper": "implicit", "boundary": "free",
        "t_end": 1.0, "output_times": _grid_times(1.0, 1.0 / 512.0),
        "initial": "self_similar", "times": [0.0, 0.5, 1.0],
        "sample_x": [-4.0, 4.0, 801],
    },
    "waiting_time": {
        "m": 2.0, "dim": 1, "x_min": -3.0, "x_max": 3.0, "cells": 3072,
        "flux": {"variant": "smoothed_sign", "delta": 1e-3},
        "stepper": "implicit", "boundary": "neumann",
        "t_end": 1.0, "output_times": _grid_times(1.0, 2e-3),
        "initial": "waiting_time", "times": [0.0, 0.25, 0.5, 1.0],
        "D0": 1.0, "C0": 1.0, "rho0": 1.0, "R": 2.0,
        "sample_x": [-3.0, 3.0, 601],
    },
    "example82": {
        "m": 2.0, "dim": 1, "x_min": -10.0, "x_max": 10.0, "cells": 2560,
        "flux": {"variant": "smoothed_sign", "delta": 1e-3},
        "stepper": "implicit", "boundary": "neumann",
        "t_end": 4.0, "output_times": _grid_times(4.0, 4e-3),
        "initial": "example82", "times": [0.5, 1.0, 2.0, 3.5],
        "sample_x": [-10.0, 10.0, 1001],
    },
    "burgers_compare": {
        "times": [0.25, 0.5, 1.0, 2.0, 3.0, 3.5],
        "sample_x": [-10.0, 14.0, 1201],
    },
    "barrier_sandwich": {
        "m": 2.0, "dim": 1, "x_min": -1.0, "x_max": 3.0, "cells": 2048,
        "flux": {"variant": "smoothed_sign", "delta": 1e-3},
        "stepper": "implicit", "boundary": "neumann",
        "t_end": 0.6, "output_times": _grid_times(0.6, 1e-3),
        "initial": "barrier", "times": [0.0, 0.3, 0.6],
        "sample_x": [-1.0, 3.0, 801],
    },
    "riemann": {
        "m": 2.0, "dim": 1, "x_min": -14.0, "x_max": 1.5, "cells": 7936,
        "flux": {"variant": "smoothed_sign", "delta": 1e-3},
        "stepper": "implicit", "boundary": "neumann",
        "t_end": 0.2, "output_times": _grid_times(0.2, 1e-3),
        "initial": "riemann", "times": [0.0, 0.1, 0.2],
        "sample_x": [-2.0, 1.5, 701],
    },
}

_ALLOWED_KEYS = {
    "m", "dim", "geometry", "x_min", "x_max", "cells", "flux", "stepper",
    "cfl_h", "cfl_p", "boundary", "t_end", "output_times", "initial",
    "times", "sample_x", "D0", "C0", "rho0", "R", "profile",
}
_ALLOWED_FLUX_KEYS = {"variant", "delta", "rho"}


def _fail_config(msg):
    raise ConfigError(msg)


def _load_config(args, default_preset=None) -> dict:
    cfg = {}
    preset = args.preset
    if preset is None and args.config is None and default_preset is not None:
        preset = default_preset
    if preset is not None:
        if preset not in PRESETS:
            _fail_config(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        cfg.update(json.loads(json.dumps(PRESETS[preset])))
        cfg["preset"] = preset
    if args.config is not None:
        try:
            with open(args.config) as fh:
                user = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            _fail_config(f"cannot read config {args.config}: {exc}")
        if not isinstance(user, dict):
            _fail_config("config document must be a JSON object")
        for key in user:
            if key not in _ALLOWED_KEYS:
                _fail_config(f"unknown config key {key!r}")
        if "flux" in user:
            for key in user["flux"]:
                if key not in _ALLOWED_FLUX_KEYS:
                    _fail_config(f"unknown flux key {key!r}")
        cfg.update(user)
    if getattr(args, "times", None):
        try:
            cfg["times"] = [float(v) for v in args.times.split(",")]
        except ValueError:
            _fail_config(f"cannot parse --times {args.times!r}")
    if not cfg:
        _fail_config("no preset or config given")
    return cfg


def _write_atomic(path: str, text: str):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path) or ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _params(cfg) -> Params:
    return Params(float(cfg.get("m", 2.0)), int(cfg.get("dim", 1)))


def _sample_grid(cfg):
    lo, hi, n = cfg.get("sample_x", [-10.0, 10.0, 1001])
    return np.linspace(float(lo), float(hi), int(n))


def _initial_profile(cfg, params) -> PiecewiseProfile:
    name = cfg.get("initial")
    if isinstance(name, dict) or "profile" in cfg:
        return profile_from_json(json.dumps(cfg.get("profile", name)))
    if name == "self_similar":
        return self_similar_profile(SelfSimilarSpec(), params, 0.0)
    if name == "example82":
        return example82_initial_profile()
    if name == "waiting_time":
        spec = WaitingTimeSpec(cfg.get("D0", 1.0), cfg.get("C0", 1.0),
                               cfg.get("rho0", 1.0), cfg.get("R", 2.0))
        return wt_initial_profile(spec, params)
    _fail_config(f"no piecewise-profile datum named {name!r}")


def _initial_field(cfg, params) -> GridField:
    x_min, x_max = float(cfg["x_min"]), float(cfg["x_max"])
    cells = int(cfg["cells"])
    h = (x_max - x_min) / cells
    name = cfg.get("initial")
    if name == "riemann":
        xc = x_min + (np.arange(cells) + 0.5) * h
        return GridField(x_min, h, np.where(xc < 0.0, 2.0, 0.0))
    if name == "barrier":
        faces = x_min + np.arange(cells + 1) * h
        edge = h / 2.0

        def prim(y):
            z = y - edge
            return np.where(z <= 0, 0.0, np.where(z <= 1, z * z / 2.0, 0.5 + (z - 1.0)))

        return GridField(x_min, h, (prim(faces[1:]) - prim(faces[:-1])) / h)
    profile = _initial_profile(cfg, params)
    geometry = "radial" if params.dim > 1 else "line"
    from .model import sample_profile

    return sample_profile(profile, x_min if geometry == "line" else 0.0, h, cells,
                          geometry, params.dim)


def _exact_evaluator(cfg, params):
    name = cfg.get("initial", cfg.get("preset"))
    if name in ("self_similar", None):
        spec = SelfSimilarSpec()
        return lambda t, x: self_similar_eval(spec, params, t, x)
    if name == "example82":
        sol = example82_solve(Tolerances())
        return lambda t, x: example82_eval(sol, t, x)
    if name == "waiting_time":
        spec = WaitingTimeSpec(cfg.get("D0", 1.0), cfg.get("C0", 1.0),
                               cfg.get("rho0", 1.0), cfg.get("R", 2.0))
        sol = wt_construct(spec, params, Tolerances())
        return lambda t, x: wt_eval(sol, t, x)
    _fail_config(f"no exact solution family named {name!r}")


def _txu_csv(times, xs, evaluator) -> str:
    lines = ["t,x,u"]
    for t in times:
        for x in xs:
            lines.append(f"{_FMT % t},{_FMT % x},{_FMT % evaluator(t, x)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# subcommands


def cmd_exact(args) -> int:
    cfg = _load_config(args)
    params = _params(cfg)
    evaluator = _exact_evaluator(cfg, params)
    xs = _sample_grid(cfg)
    times = cfg.get("times", [0.0, 1.0])
    name = cfg.get("preset", cfg.get("initial", "exact"))
    _write_atomic(os.path.join(args.out, f"exact_{name}.csv"), _txu_csv(times, xs, evaluator))
    return 0


def _scheme_and_flux(cfg):
    fx = cfg.get("flux", {"variant": "smoothed_sign", "delta": 1e-3})
    flux = FluxConfig(fx["variant"], delta=fx.get("delta"), rho=fx.get("rho"))
    scheme = SchemeConfig(
        stepper=cfg.get("stepper", "implicit"),
        cfl_hyperbolic=float(cfg.get("cfl_h", 0.5)),
        cfl_parabolic=float(cfg.get("cfl_p", 0.5)),
        boundary=cfg.get("boundary", "neumann"),
    )
    return flux, scheme


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    params = _params(cfg)
    flux, scheme = _scheme_and_flux(cfg)
    field = _initial_field(cfg, params)
    traj = run_scenario(field, params, flux, scheme, float(cfg["t_end"]),
                        [float(t) for t in cfg["output_times"]])
    snapshots = [float(t) for t in cfg.get("times", traj.times)]
    ts = np.asarray(traj.times)
    for idx, t in enumerate(snapshots):
        k = int(np.argmin(np.abs(ts - t)))
        _write_atomic(os.path.join(args.out, f"u_{idx:04d}.csv"), field_to_csv(traj.states[k]))
    lines = ["t,mass,support_radius,min,max"]
    for rec in traj.records:
        lines.append(",".join(_FMT % v for v in
                              (rec.t, rec.mass, rec.support_radius, rec.min_value, rec.max_value)))
    _write_atomic(os.path.join(args.out, "diagnostics.csv"), "\n".join(lines) + "\n")
    umax = max(float(np.max(s.values)) for s in traj.states)
    grad_thr = 0.25 * umax / field.h
    _write_atomic(os.path.join(args.out, "shocks.csv"),
                  dg.shock_report_csv(traj, grad_thr))
    return 0


def cmd_track(args) -> int:
    cfg = _load_config(args)
    params = _params(cfg)
    if params.m != 2.0 or params.dim != 1:
        _fail_config("the tracker runs the m=2, one-dimensional case only")
    profile = _initial_profile(cfg, params)
    state = tracker_init(profile)
    traj, events = tracker_evolve(state, float(cfg["t_end"]), Tolerances(),
                                  output_times=[float(t) for t in cfg["output_times"]])
    xs = _sample_grid(cfg)
    lines = ["t,x,u"]
    for t, prof in zip(traj.times, traj.states):
        for x in xs:
            lines.append(f"{_FMT % t},{_FMT % x},{_FMT % profile_eval(prof, x)}")
    _write_atomic(os.path.join(args.out, "trajectory.csv"), "\n".join(lines) + "\n")
    doc = [{"kind": e.kind, "time": e.time, "location": e.location} for e in events]
    _write_atomic(os.path.join(args.out, "events.json"), json.dumps(doc, indent=2) + "\n")
    return 0


def cmd_convergence(args) -> int:
    cfg = _load_config(args, default_preset="self_similar")
    params = _params(cfg)
    spec = SelfSimilarSpec()
    levels = [(1.0 / 128.0, 4e-3), (1.0 / 256.0, 2e-3), (1.0 / 512.0, 1e-3)]
    report_levels = []
    errors = []
    for h, delta in levels:
        cells = int(round(8.0 / h))
        outs = np.arange(1, int(round(1.0 / h)) + 1) * h
        traj = run_scenario(self_similar_profile(spec, params, 0.0), params,
                            FluxConfig("smoothed_sign", delta=delta),
                            SchemeConfig("implicit", boundary="free"),
                            1.0, outs, grid=(-4.0, 4.0, cells))
        l1, linf = dg.error_norms(
            traj.states[-1], lambda t, x: self_similar_eval(spec, params, t, x), 1.0
        )
        errors.append(l1 / 2.0)
        report_levels.append({"h": h, "delta": delta, "L1": l1 / 2.0, "Linf": linf})
    order = dg.convergence_order(errors, [lv[0] for lv in levels])
    report = {"levels": report_levels, "order": order}
    _write_atomic(os.path.join(args.out, "convergence.json"),
                  json.dumps(report, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_compare_burgers(args) -> int:
    cfg = _load_config(args, default_preset="burgers_compare")
    sol = example82_solve(Tolerances())
    xs = _sample_grid(cfg)
    times = cfg.get("times", PRESETS["burgers_compare"]["times"])
    lines = ["t,x,u,v"]
    for t in times:
        for x in xs:
            u = example82_eval(sol, t, x)
            v = burgers_example_eval(t, x)
            lines.append(f"{_FMT % t},{_FMT % x},{_FMT % u},{_FMT % v}")
    _write_atomic(os.path.join(args.out, "profiles.csv"), "\n".join(lines) + "\n")

    report = {
        "u_bulk_shock_lifetime": {"from": 0.5, "until": sol.t_star},
        "v_bulk_shock_lifetime": {"from": 0.5, "until": 11.0 / 4.0},
        "per_time": [],
    }
    for t in times:
        u0 = example82_eval(sol, t, 0.0)
        v0 = burgers_example_eval(t, 0.0)
        entry = {
            "t": t,
            "u_plateau": u0,
            "v_plateau": v0,
            "u_shock": None,
            "v_shock": None,
        }
        if 0.5 <= t < sol.t_star:
            entry["u_shock"] = sol.r(t - 0.5)
        if t >= 0.5:
            entry["v_shock"] = burgers_shock_position(t)
        diff = np.array([abs(example82_eval(sol, t, x) - burgers_example_eval(t, x)) for x in xs])
        agree = diff <= 1e-12
        entry["agreement_fraction"] = float(np.mean(agree))
        entry["max_divergence"] = float(np.max(diff))
        where = xs[~agree]
        entry["divergence_span"] = (
            [float(where.min()), float(where.max())] if where.size else None
        )
        report["per_time"].append(entry)
    _write_atomic(os.path.join(args.out, "divergence.json"),
                  json.dumps(report, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_verify(args) -> int:
    results = acceptance.run_all(seed=args.seed)
    width = max(len(r.name) for r in results)
    print(f"{'':4s} {'criterion':{width}s}  result  measured | expected")
    all_pass = True
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        all_pass &= r.passed
        print(f"[{r.index:2d}] {r.name:{width}s}  {status}  ({r.runtime:5.1f}s)  "
              f"{r.measured} | {r.expected}")
    print(f"==> {'all criteria passed' if all_pass else 'VERIFICATION FAILED'}")
    if args.out:
        doc = [
            {"index": r.index, "name": r.name, "passed": r.passed,
             "measured": r.measured, "expected": r.expected}
            for r in results
        ]
        _write_atomic(os.path.join(args.out, "verify.json"),
                      json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return 0 if all_pass else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fluxsat",
        description="flux-saturated diffusion laboratory: exact families, "
                    "finite-volume solver, front tracker, verification",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in [
        ("exact", cmd_exact),
        ("simulate", cmd_simulate),
        ("track", cmd_track),
        ("convergence", cmd_convergence),
        ("compare-burgers", cmd_compare_burgers),
        ("verify", cmd_verify),
    ]:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="JSON config path")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--preset", default=None, help=f"one of {sorted(PRESETS)}")
        p.add_argument("--times", default=None, help="comma-separated sample times")
        p.add_argument("--seed", type=int, default=acceptance.DEFAULT_SEED)
        p.set_defaults(fn=fn)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FluxsatError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

import json
import os

import pytest

from fluxsat.cli import main


def _run(argv):
    return main(argv)


def test_exact_example82_contains_plateau(tmp_path):
    out = str(tmp_path)
    assert _run(["exact", "--preset", "example82", "--out", out, "--times", "0.5"]) == 0
    text = open(os.path.join(out, "exact_example82.csv")).read()
    assert text.splitlines()[0] == "t,x,u"
    # u(1/2, 0) = 4/3
    row = [r for r in text.splitlines() if r.startswith("0.5,0,")]
    assert row and abs(float(row[0].split(",")[2]) - 4.0 / 3.0) < 1e-12


def test_exact_self_similar_plateau(tmp_path):
    out = str(tmp_path)
    assert _run(["exact", "--preset", "self_similar", "--out", out, "--times", "0"]) == 0
    rows = open(os.path.join(out, "exact_self_similar.csv")).read().splitlines()[1:]
    inner = [float(r.split(",")[2]) for r in rows if abs(float(r.split(",")[1])) < 1.0]
    assert all(abs(v - 2.0**-0.5) < 1e-12 for v in inner)


def test_unknown_preset_exits_2(tmp_path, capsys):
    assert _run(["exact", "--preset", "nope", "--out", str(tmp_path)]) == 2


def test_unknown_config_key_exits_2(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"m": 2.0, "bogus_key": 1}))
    assert _run(["simulate", "--config", str(cfg), "--out", str(tmp_path)]) == 2


def test_track_example82_events(tmp_path):
    out = str(tmp_path)
    assert _run(["track", "--preset", "example82", "--out", out]) == 0
    events = json.load(open(os.path.join(out, "events.json")))
    kinds = [e["kind"] for e in events]
    assert "JumpClosure" in kinds
    t_star = [e["time"] for e in events if e["kind"] == "JumpClosure"][0]
    assert 0.5 < t_star < 3.5
    assert os.path.exists(os.path.join(out, "trajectory.csv"))


def test_compare_burgers_report(tmp_path):
    out = str(tmp_path)
    assert _run(["compare-burgers", "--out", out, "--times", "3.5"]) == 0
    rep = json.load(open(os.path.join(out, "divergence.json")))
    entry = rep["per_time"][0]
    assert entry["u_plateau"] == pytest.approx(7.0 / 9.0, abs=1e-12)
    assert entry["v_plateau"] == 2.0
    assert rep["v_bulk_shock_lifetime"]["until"] == 2.75


def test_simulate_deterministic_rerun(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "m": 2.0, "dim": 1, "x_min": -2.0, "x_max": 2.0, "cells": 256,
        "flux": {"variant": "smoothed_sign", "delta": 1e-3},
        "stepper": "implicit", "boundary": "free",
        "t_end": 0.1, "output_times": [0.02 * k for k in range(1, 6)],
        "initial": "self_similar", "times": [0.1],
    }))
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert _run(["simulate", "--config", str(cfg), "--out", str(out1)]) == 0
    assert _run(["simulate", "--config", str(cfg), "--out", str(out2)]) == 0
    for name in ("u_0000.csv", "diagnostics.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_simulate_riemann_small(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "m": 2.0, "dim": 1, "x_min": -6.0, "x_max": 1.0, "cells": 448,
        "flux": {"variant": "smoothed_sign", "delta": 1e-3},
        "stepper": "implicit", "boundary": "neumann",
        "t_end": 0.1, "output_times": [0.01 * k for k in range(1, 11)],
        "initial": "riemann", "times": [0.1],
    }))
    out = tmp_path / "o"
    assert _run(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
    diag = (out / "diagnostics.csv").read_text().splitlines()
    assert diag[0] == "t,mass,support_radius,min,max"
    first = [float(v) for v in diag[1].split(",")]
    last = [float(v) for v in diag[-1].split(",")]
    assert last[1] == pytest.approx(first[1], rel=1e-12)  # Neumann mass conserved


def test_solver_failure_exits_3(tmp_path):
    # a single huge backward-Euler step on a steep datum makes Newton stall
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "m": 2.0, "dim": 1, "x_min": -2.0, "x_max": 2.0, "cells": 1024,
        "flux": {"variant": "smoothed_sign", "delta": 1e-3},
        "stepper": "implicit", "boundary": "neumann",
        "t_end": 2.0, "output_times": [2.0],
        "initial": "riemann", "times": [2.0],
    }))
    assert _run(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 3


def test_simulate_shock_report(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "m": 2.0, "dim": 1, "x_min": -8.0, "x_max": 1.0, "cells": 576,
        "flux": {"variant": "smoothed_sign", "delta": 1e-3},
        "stepper": "implicit", "boundary": "neumann",
        "t_end": 0.2, "output_times": [0.002 * k for k in range(1, 101)],
        "initial": "riemann", "times": [0.2],
    }))
    out = tmp_path / "o"
    assert _run(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
    rows = (out / "shocks.csv").read_text().splitlines()
    assert rows[0] == "t,mass,support_radius,shock_pos,shock_speed"
    speeds = {float(r.split(",")[4]) for r in rows[1:] if r.split(",")[4]}
    assert len(speeds) == 1
    assert abs(speeds.pop() - 2.0) < 0.15  # short plateau: mild drain deficit


def test_convergence_report_order(tmp_path):
    out = str(tmp_path)
    assert _run(["convergence", "--out", out]) == 0
    rep = json.load(open(os.path.join(out, "convergence.json")))
    assert rep["order"] >= 0.7
    l1s = [lv["L1"] for lv in rep["levels"]]
    assert l1s[2] < l1s[1] < l1s[0]


def test_compare_burgers_early_agreement(tmp_path):
    # at t = 1/4 the two solutions differ only up to a neighbourhood of the
    # plateau edge (x ~ sqrt(5)); beyond it they agree pointwise
    out = str(tmp_path)
    assert _run(["compare-burgers", "--out", out, "--times", "0.25"]) == 0
    rep = json.load(open(os.path.join(out, "divergence.json")))
    entry = rep["per_time"][0]
    lo, hi = entry["divergence_span"]
    assert hi == pytest.approx(5**0.5, abs=0.05)
    assert entry["max_divergence"] > 0.4  # plateau heights differ by 2 - 1.53
    assert 0 < entry["agreement_fraction"] < 1

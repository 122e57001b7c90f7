"""Run artifacts: CSV and JSON emission with a stable schema.

All floats are written with 17 significant digits so artifacts round-trip
exactly and identical runs produce byte-identical files.  Column orders are
fixed (documented in the README) and relied on by the plotting front end.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .constraint import VnhcSpec, constraint_error, momentum_completion
from .mechanics import wrap_angle
from .models import (critical_level, nominal_energy, pendulum_inertia,
                     potential_coefficient)

__all__ = [
    "fmt",
    "sample_times",
    "trajectory_rows_reduced",
    "trajectory_rows_full",
    "write_csv",
    "write_trajectory",
    "write_crossings",
    "write_switches",
    "write_summary",
    "write_verify",
]

TRAJECTORY_COLUMNS = ("t", "q_u", "q_a", "p_u", "p_a", "E", "e", "e_dot")
CROSSING_COLUMNS = ("t", "section", "q_u", "p_u", "norm", "E")
SWITCH_COLUMNS = ("t", "trigger", "value", "decision")
VERIFY_COLUMNS = ("chart", "r", "gain", "gain_integral", "first_order_shift",
                  "numeric_shift", "residual", "status")


def fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def write_csv(path, columns, rows) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def sample_times(t0: float, t1: float, dt: float) -> np.ndarray:
    n = max(1, int(math.floor((t1 - t0) / dt + 1e-9)))
    ts = t0 + dt * np.arange(n + 1)
    ts[-1] = min(ts[-1], t1)
    if ts[-1] < t1 - 1e-12:
        ts = np.append(ts, t1)
    return ts


def trajectory_rows_reduced(traj, params, spec: VnhcSpec, dt: float):
    """Sample a reduced trajectory into the trajectory.csv schema.

    The leg follows the constraint exactly in reduced runs, so q_a and p_a
    are reconstructed from (q_u, p_u) and e = e_dot = 0.
    """
    for t in sample_times(traj.t0, traj.t1, dt):
        q_u, p_u = traj.sample(t)
        q_a = spec.f(p_u)
        p_a = momentum_completion(params, spec, (q_u, p_u))
        E = nominal_energy(params, (q_u, p_u))
        yield (t, float(wrap_angle(q_u)), float(wrap_angle(q_a)), p_u, p_a,
               E, 0.0, 0.0)


def trajectory_rows_full(traj, params, spec: VnhcSpec, dt: float):
    for t in sample_times(traj.t0, traj.t1, dt):
        q_u, q_a, p_u, p_a = traj.sample(t)
        err = constraint_error(params, spec, [q_u, q_a, p_u, p_a])
        E = nominal_energy(params, (q_u, p_u))
        yield (t, float(wrap_angle(q_u)), float(wrap_angle(q_a)), p_u, p_a,
               E, err.e, err.e_dot)


def write_trajectory(path, rows) -> None:
    write_csv(path, TRAJECTORY_COLUMNS, rows)


def write_crossings(path, crossings) -> None:
    write_csv(path, CROSSING_COLUMNS,
              ((c.t, c.section, c.q_u, c.p_u, c.norm, c.energy)
               for c in crossings))


def write_switches(path, switches) -> None:
    write_csv(path, SWITCH_COLUMNS,
              ((s.t, s.trigger, s.value, s.decision) for s in switches))


def model_block(params) -> dict:
    """Level-set coefficients consumed by the plotting front end."""
    return {
        "name": type(params).__name__,
        "pendulum_inertia": pendulum_inertia(params),
        "potential_coefficient": potential_coefficient(params),
        "critical_level": critical_level(params),
    }


def write_summary(path, summary: dict) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_verify(path, rows) -> None:
    write_csv(path, VERIFY_COLUMNS, rows)

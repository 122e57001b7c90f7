"""Level-set classification, section crossings and energy-trend verdicts.

Motions of the constrained acrobot are judged through two transversal
sections of the reduced phase plane: turning points (p_u = 0, q_u > 0) for
rocking motions below the critical level, and bottom passages (q_u = 0) for
revolutions above it.  A motion gains (loses) energy when the Euclidean
norms of its consecutive section crossings increase (decrease)
monotonically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .integrator import EventSpec, Trajectory, scan_events
from .mechanics import wrap_angle
from .models import critical_level, nominal_energy

__all__ = [
    "CrossingRecord",
    "EnergyVerdict",
    "classify",
    "section_events",
    "extract_crossings",
    "verdict",
]

LEVEL_TOL = 1e-9
MONOTONE_SLACK = 1e-9  # absorbs event-location error in norm comparisons


@dataclass(frozen=True)
class CrossingRecord:
    """One section crossing of a reduced trajectory."""

    t: float
    q_u: float        # wrapped to (-pi, pi]
    p_u: float
    section: str      # P_o | P_r | q_axis | p_axis | pi_line
    norm: float
    energy: float


@dataclass(frozen=True)
class EnergyVerdict:
    kind: str                 # oscillation | rotation
    trend: str                # gaining | losing | non-monotone
    exit_time: float | None
    exit_level: float | None
    crossing_count: int


def classify(params, s) -> str:
    """Place a reduced state relative to the critical level R_bar."""
    E = nominal_energy(params, s)
    R = critical_level(params)
    if E < R - LEVEL_TOL:
        return "oscillation_region"
    if E > R + LEVEL_TOL:
        return "rotation_region"
    return "boundary"


def section_events(terminal_top: bool = False) -> list[EventSpec]:
    """Guards for turning points, bottom passages, and top passages.

    Works on unwrapped reduced states: sin(q_u) vanishes at both the bottom
    (cos > 0) and the top (cos < 0) of the circle; p_u vanishes at turning
    points.
    """
    return [
        EventSpec(guard=lambda t, y: y[1], direction="any", name="q_axis"),
        EventSpec(guard=lambda t, y: math.sin(y[0]), direction="any",
                  condition=lambda t, y: math.cos(y[0]) > 0.0, name="p_axis"),
        EventSpec(guard=lambda t, y: math.sin(y[0]), direction="any",
                  condition=lambda t, y: math.cos(y[0]) < 0.0, name="pi_line",
                  terminal=terminal_top),
    ]


def extract_crossings(traj: Trajectory, params) -> list[CrossingRecord]:
    """Locate all section crossings of a stored reduced trajectory.

    Turning points inside the rocking region (q_u > 0, E < R_bar) are tagged
    P_o; bottom passages above the critical level are tagged P_r; other hits
    keep their axis tag.  Norms use wrapped q_u.
    """
    R = critical_level(params)
    records = []
    for hit in scan_events(traj, section_events()):
        q_w = float(wrap_angle(hit.state[0]))
        p_u = float(hit.state[1])
        E = nominal_energy(params, (q_w, p_u))
        section = hit.name
        if section == "q_axis" and q_w > 0.0 and E < R - LEVEL_TOL:
            section = "P_o"
        elif section == "p_axis" and E > R + LEVEL_TOL:
            section = "P_r"
        records.append(CrossingRecord(t=hit.t, q_u=q_w, p_u=p_u, section=section,
                                      norm=math.hypot(q_w, p_u), energy=E))
    records.sort(key=lambda r: r.t)
    return records


def _trend(norms) -> str:
    diffs = [b - a for a, b in zip(norms, norms[1:])]
    up = all(d > -MONOTONE_SLACK for d in diffs)
    down = all(d < MONOTONE_SLACK for d in diffs)
    if up and not down:
        return "gaining"
    if down and not up:
        return "losing"
    return "non-monotone"  # includes constant sequences (conservative case)


def verdict(crossings, R1: float | None, R2: float | None, params,
            kind: str | None = None) -> EnergyVerdict:
    """Energy trend of a crossing sequence, with exit against [R1, R2].

    ``kind`` selects which section to judge ('oscillation' uses P_o,
    'rotation' uses P_r); by default the better-populated section wins.
    The exit time is the first crossing at which the rigid-pendulum energy
    reaches R2 (gaining) or R1 (losing).
    """
    pool = {"oscillation": [c for c in crossings if c.section == "P_o"],
            "rotation": [c for c in crossings if c.section == "P_r"]}
    if kind is None:
        kind = max(pool, key=lambda k: len(pool[k]))
    seq = pool[kind]
    if len(seq) < 3:
        raise ValueError("insufficient crossings")
    trend = _trend([c.norm for c in seq])
    exit_time = exit_level = None
    if trend == "gaining" and R2 is not None:
        for c in seq:
            if c.energy >= R2 - LEVEL_TOL:
                exit_time, exit_level = c.t, c.energy
                break
    elif trend == "losing" and R1 is not None:
        for c in seq:
            if c.energy <= R1 + LEVEL_TOL:
                exit_time, exit_level = c.t, c.energy
                break
    return EnergyVerdict(kind=kind, trend=trend, exit_time=exit_time,
                         exit_level=exit_level, crossing_count=len(seq))

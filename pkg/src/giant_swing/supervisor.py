"""Hysteresis supervisors for oscillation and rotation regulation.

The supervisor re-decides at designated trigger crossings only:

* rotation regulation: every bottom passage (q_u = 0), judged on |p_u|;
* oscillation regulation: every turning point (p_u = 0) or top passage
  (|q_u| = pi), judged on |q_u|.

The three-way rule is inject below the hysteresis band, dissipate above it,
and extend the leg (zero coupling) inside it; boundary ties resolve to
extend, which rules out measure-zero chattering.  In reduced-dynamics runs
the leg is re-aimed instantaneously at a switch; in full-dynamics runs the
enforcing controller retargets and the transient is part of the run.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constraint import VnhcSpec, manifold_state
from .integrator import (EventSpec, IntegratorConfig, Trajectory,
                         concat_trajectories, integrate)
from .kernels import full_field, reduced_field
from .mechanics import wrap_angle
from .models import boundary_momentum

__all__ = [
    "RegulationConfig",
    "SwitchRecord",
    "SupervisorState",
    "RegulatedRun",
    "rotation_decide",
    "oscillation_decide",
    "run_regulated",
]


@dataclass(frozen=True)
class RegulationConfig:
    """Supervisor settings.

    mode      : 'oscillation' (target peak angle, rad) or 'rotation'
                (target bottom momentum).
    target    : desired peak |q_u| or bottom |p_u|.
    hysteresis: band half-width as a fraction of the target.
    gain_magnitude: coupling magnitude used when injecting/dissipating.
    """

    mode: str
    target: float
    hysteresis: float
    gain_magnitude: float = 10.0

    def __post_init__(self):
        if self.mode not in ("oscillation", "rotation"):
            raise ValueError("mode must be 'oscillation' or 'rotation'")
        if self.gain_magnitude <= 0:
            raise ValueError("gain_magnitude must be positive")
        if self.mode == "oscillation":
            if not 0.0 < self.target < math.pi:
                raise ValueError("oscillation target must lie in ]0, pi[")
            if not 0.0 <= self.hysteresis <= math.pi / self.target - 1.0:
                raise ValueError("hysteresis must lie in [0, pi/target - 1]")
        else:
            if self.target <= 0.0 or not 0.0 <= self.hysteresis <= 1.0:
                raise ValueError("rotation target must be positive, "
                                 "hysteresis in [0, 1]")

    def validate_for(self, params):
        """Model-dependent feasibility: the band must sit above the critical
        bottom momentum, else 'extend' could park below a revolution."""
        if self.mode == "rotation":
            floor = boundary_momentum(params)
            if not (1.0 - self.hysteresis) * self.target > floor:
                raise ValueError(
                    f"(1 - hysteresis) * target must exceed the critical "
                    f"bottom momentum {floor:.6g}")


@dataclass(frozen=True)
class SwitchRecord:
    t: float
    trigger: str     # q_axis | p_axis | pi_line
    value: float     # |q_u| or |p_u| at the trigger
    decision: str    # inject | dissipate | extend


@dataclass
class SupervisorState:
    active: str = "extend"
    switch_log: list = field(default_factory=list)


@dataclass
class RegulatedRun:
    trajectory: Trajectory
    supervisor: SupervisorState
    segments: list  # (decision, Trajectory) per constant-coupling stretch


def rotation_decide(cfg: RegulationConfig, p_u: float) -> str:
    """Three-way rule on |p_u| at a bottom passage."""
    v = abs(p_u)
    if v < (1.0 - cfg.hysteresis) * cfg.target:
        return "inject"
    if v > (1.0 + cfg.hysteresis) * cfg.target:
        return "dissipate"
    return "extend"


def oscillation_decide(cfg: RegulationConfig, q_u: float) -> str:
    """Three-way rule on |q_u| at a turning point or top passage."""
    v = abs(q_u)
    if v < (1.0 - cfg.hysteresis) * cfg.target:
        return "inject"
    if v > (1.0 + cfg.hysteresis) * cfg.target:
        return "dissipate"
    return "extend"


def _trigger_events(mode: str, pu_index: int) -> list[EventSpec]:
    if mode == "rotation":
        return [EventSpec(guard=lambda t, y: math.sin(y[0]), direction="any",
                          condition=lambda t, y: math.cos(y[0]) > 0.0,
                          terminal=True, name="p_axis")]
    return [
        EventSpec(guard=lambda t, y: y[pu_index], direction="any", terminal=True,
                  name="q_axis"),
        EventSpec(guard=lambda t, y: math.sin(y[0]), direction="any",
                  condition=lambda t, y: math.cos(y[0]) < 0.0,
                  terminal=True, name="pi_line"),
    ]


def _spec_for(decision: str, cfg: RegulationConfig, template: VnhcSpec) -> VnhcSpec:
    gain = {"inject": cfg.gain_magnitude,
            "dissipate": -cfg.gain_magnitude,
            "extend": 0.0}[decision]
    return VnhcSpec(amplitude=template.amplitude, gain=gain,
                    kp=template.kp, kd=template.kd)


def run_regulated(params, cfg: RegulationConfig, x0, duration: float,
                  template: VnhcSpec | None = None, dynamics: str = "reduced",
                  integrator: IntegratorConfig | None = None) -> RegulatedRun:
    """Integrate under the supervisor, re-deciding at each trigger crossing.

    ``x0`` is a reduced state (q_u, p_u); full-dynamics runs start on the
    constraint manifold of the initial decision.  The initial decision is
    taken at t = 0 from the trigger quantity itself.
    """
    cfg.validate_for(params)
    if dynamics not in ("reduced", "full"):
        raise ValueError("dynamics must be 'reduced' or 'full'")
    template = template or VnhcSpec()
    icfg = integrator or IntegratorConfig()
    decide = rotation_decide if cfg.mode == "rotation" else oscillation_decide
    events = _trigger_events(cfg.mode, 2 if dynamics == "full" else 1)

    q_u, p_u = float(x0[0]), float(x0[1])
    value0 = abs(p_u) if cfg.mode == "rotation" else abs(wrap_angle(q_u))
    sup = SupervisorState()
    sup.active = decide(cfg, value0)
    sup.switch_log.append(SwitchRecord(t=0.0, trigger="initial", value=value0,
                                       decision=sup.active))
    # full-dynamics runs start on the initial constraint manifold and then
    # carry the 4-D state continuously across switches (retargeting takes
    # transient time); reduced runs re-aim the leg instantaneously
    if dynamics == "full":
        y = list(manifold_state(params, _spec_for(sup.active, cfg, template),
                                (q_u, p_u)).as_vector())
        pu_index = 2
    else:
        y = [q_u, p_u]
        pu_index = 1
    segments = []
    t = 0.0
    while t < duration - 1e-12:
        spec = _spec_for(sup.active, cfg, template)
        fld = (reduced_field if dynamics == "reduced" else full_field)(params, spec)
        traj, hits = integrate(fld, y, icfg, events=events, t0=t,
                               duration=duration - t)
        segments.append((sup.active, traj))
        if not hits:
            break
        hit = hits[0]
        t = hit.t
        y = [float(v) for v in hit.state]
        value = (abs(y[pu_index]) if cfg.mode == "rotation"
                 else abs(float(wrap_angle(y[0]))))
        sup.active = decide(cfg, value)
        sup.switch_log.append(SwitchRecord(t=t, trigger=hit.name, value=value,
                                           decision=sup.active))

    reduced_parts = []
    for decision, traj in segments:
        if dynamics == "reduced":
            reduced_parts.append(traj)
        else:
            # project the stored 4-D nodes onto (q_u, p_u) for analysis
            reduced_parts.append(Trajectory(traj.ts, traj.ys[:, [0, 2]],
                                            traj.fs[:, [0, 2]],
                                            truncated=traj.truncated))
    joined = concat_trajectories(reduced_parts)
    return RegulatedRun(trajectory=joined, supervisor=sup, segments=segments)

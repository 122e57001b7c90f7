"""Adaptive Runge-Kutta integration with dense output and event detection.

The stepper is a Dormand-Prince 5(4) pair; trajectories store every accepted
node together with its derivative, and values between nodes come from cubic
Hermite interpolation.  Events are guard-function zero crossings located by
bisection on the dense output.

Two step engines exist: a compiled one (``_fastkernel``) for the closed-form
acrobot fields and a pure-Python twin for everything else.  The compiled
engine is preferred automatically whenever the field carries a kernel id;
set the environment variable GIANT_SWING_NO_EXT=1 to force pure Python.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _pykernel

try:  # compiled kernels are optional; the Python twin covers everything
    from . import _fastkernel
except ImportError:  # pragma: no cover - depends on build environment
    _fastkernel = None

HAVE_FAST = _fastkernel is not None and os.environ.get("GIANT_SWING_NO_EXT") != "1"

GUARD_TOL = 1e-10
CHUNK_BUDGET = 1024

__all__ = [
    "IntegratorConfig",
    "EventSpec",
    "EventHit",
    "Trajectory",
    "IntegrationError",
    "integrate",
    "scan_events",
    "concat_trajectories",
    "compiled_available",
]


def compiled_available() -> bool:
    return HAVE_FAST


class IntegrationError(RuntimeError):
    """Numerical failure inside the integrator (step-size underflow)."""


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances and caps for one integration."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = math.inf
    max_time: float = math.inf

    def __post_init__(self):
        for name, v in (("rel_tol", self.rel_tol), ("abs_tol", self.abs_tol)):
            if not 1e-14 <= v <= 1e-3:
                raise ValueError(f"{name} must lie in [1e-14, 1e-3]")
        if not self.max_step > 0:
            raise ValueError("max_step must be positive")


@dataclass(frozen=True)
class EventSpec:
    """Zero crossing of ``guard(t, y)`` along a trajectory.

    direction : 'rising' (- to +), 'falling' (+ to -) or 'any'.
    terminal  : stop the integration at the located crossing.
    condition : optional predicate; crossings where it is False are ignored.
    """

    guard: Callable[[float, np.ndarray], float]
    direction: str = "any"
    terminal: bool = False
    condition: Callable[[float, np.ndarray], bool] | None = None
    name: str = ""

    def __post_init__(self):
        if self.direction not in ("rising", "falling", "any"):
            raise ValueError("direction must be rising, falling or any")


@dataclass(frozen=True)
class EventHit:
    t: float
    state: np.ndarray
    index: int
    name: str


class Trajectory:
    """Dense-output trajectory: accepted nodes plus Hermite interpolation."""

    def __init__(self, ts, ys, fs, truncated: bool = False):
        self.ts = np.asarray(ts, dtype=float)
        self.ys = np.asarray(ys, dtype=float)
        self.fs = np.asarray(fs, dtype=float)
        self.truncated = truncated

    @property
    def t0(self) -> float:
        return float(self.ts[0])

    @property
    def t1(self) -> float:
        return float(self.ts[-1])

    @property
    def final_state(self) -> np.ndarray:
        return self.ys[-1].copy()

    def __len__(self) -> int:
        return len(self.ts)

    def sample(self, t):
        """Cubic Hermite interpolation at scalar or array times."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        tq = np.atleast_1d(t)
        idx = np.clip(np.searchsorted(self.ts, tq, side="right") - 1, 0, len(self.ts) - 2)
        t0 = self.ts[idx]
        t1 = self.ts[idx + 1]
        h = t1 - t0
        y0, y1 = self.ys[idx], self.ys[idx + 1]
        f0, f1 = self.fs[idx], self.fs[idx + 1]
        out = np.empty_like(y0)
        zero = h <= 0.0  # duplicated junction nodes from concatenation
        hs = np.where(zero, 1.0, h)
        s = np.clip((tq - t0) / hs, 0.0, 1.0)
        s2, s3 = s * s, s * s * s
        h00 = 2 * s3 - 3 * s2 + 1
        h10 = s3 - 2 * s2 + s
        h01 = -2 * s3 + 3 * s2
        h11 = s3 - s2
        out = (h00[:, None] * y0 + (h10 * hs)[:, None] * f0
               + h01[:, None] * y1 + (h11 * hs)[:, None] * f1)
        out[zero] = y0[zero]
        return out[0] if scalar else out

    def __call__(self, t):
        return self.sample(t)


def concat_trajectories(parts: Sequence[Trajectory]) -> Trajectory:
    """Join abutting trajectories, keeping duplicate junction nodes.

    The duplicated node carries the follow-on segment's derivative, so
    interpolation on either side of a junction uses the right vector field.
    """
    parts = [p for p in parts if len(p)]
    if not parts:
        raise ValueError("nothing to concatenate")
    ts = [parts[0].ts]
    ys = [parts[0].ys]
    fs = [parts[0].fs]
    for p in parts[1:]:
        ts.append(p.ts)
        ys.append(p.ys)
        fs.append(p.fs)
    return Trajectory(np.concatenate(ts), np.concatenate(ys), np.concatenate(fs),
                      truncated=parts[-1].truncated)


# ---------------------------------------------------------------------------
# event location on dense output
# ---------------------------------------------------------------------------

def _hermite_point(t0, h, y0, y1, f0, f1, t):
    s = (t - t0) / h
    s2, s3 = s * s, s * s * s
    return ((2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * f0
            + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * h * f1)


def _bisect_crossing(spec, t0, h, y0, y1, f0, f1, g_lo, g_hi):
    """Bisection keeping [lo, hi] a sign-change bracket; returns the hi side.

    Returning the crossed side guarantees a restart from the event point does
    not re-fire the same guard.
    """
    lo, hi = t0, t0 + h
    for _ in range(80):
        if hi - lo <= 1e-15 * max(1.0, abs(hi)):
            break
        mid = 0.5 * (lo + hi)
        gm = spec.guard(mid, _hermite_point(t0, h, y0, y1, f0, f1, mid))
        if gm == 0.0:
            lo = mid  # keep hi strictly on the crossed side
        elif (gm > 0) == (g_hi > 0):
            hi = mid
            if abs(gm) < GUARD_TOL:
                break
        else:
            lo = mid
    return hi, _hermite_point(t0, h, y0, y1, f0, f1, hi)


def _direction_ok(spec, g0, g1) -> bool:
    if spec.direction == "rising":
        return g0 < 0 < g1 or (g0 < 0 and g1 == 0.0)
    if spec.direction == "falling":
        return g0 > 0 > g1 or (g0 > 0 and g1 == 0.0)
    return (g0 < 0 <= g1) or (g0 > 0 >= g1)


def scan_events(traj: Trajectory, events: Sequence[EventSpec],
                t_start: float | None = None) -> list[EventHit]:
    """Locate all guard crossings of ``events`` along a stored trajectory.

    Crossings that start exactly on a guard zero (first node) are skipped, so
    restarting from an event point does not duplicate it.
    """
    hits: list[EventHit] = []
    if not events or len(traj) < 2:
        return hits
    ts, ys, fs = traj.ts, traj.ys, traj.fs
    g_prev = [ev.guard(ts[0], ys[0]) for ev in events]
    for i in range(len(ts) - 1):
        g_curr = [ev.guard(ts[i + 1], ys[i + 1]) for ev in events]
        h = ts[i + 1] - ts[i]
        if h > 0.0:
            for j, ev in enumerate(events):
                g0, g1 = g_prev[j], g_curr[j]
                if g0 == 0.0 or not _direction_ok(ev, g0, g1):
                    continue
                if g1 == 0.0:
                    te, ye = ts[i + 1], ys[i + 1]
                else:
                    te, ye = _bisect_crossing(ev, ts[i], h, ys[i], ys[i + 1],
                                              fs[i], fs[i + 1], g0, g1)
                if t_start is not None and te <= t_start:
                    continue
                if ev.condition is not None and not ev.condition(te, ye):
                    continue
                hits.append(EventHit(t=float(te), state=np.asarray(ye, float),
                                     index=j, name=ev.name))
        g_prev = g_curr
    hits.sort(key=lambda hit: hit.t)
    return hits


# ---------------------------------------------------------------------------
# engines
# ---------------------------------------------------------------------------

def _select_engine(field):
    kind = getattr(field, "kernel_kind", None)
    if kind is not None and HAVE_FAST:
        params = np.asarray(field.kernel_params, dtype=float)

        def run(t, y, f, h, t_end, rtol, atol, max_step, budget):
            return _fastkernel.run_chunk(int(kind), params, t, np.asarray(y, float),
                                         np.asarray(f, float), h, t_end, rtol, atol,
                                         max_step, budget)

        return run

    def run(t, y, f, h, t_end, rtol, atol, max_step, budget):
        return _pykernel.run_chunk(field, t, y, f, h, t_end, rtol, atol,
                                   max_step, budget)

    return run


def integrate(field, x0, config: IntegratorConfig,
              events: Sequence[EventSpec] = (), t0: float = 0.0,
              duration: float | None = None) -> tuple[Trajectory, list[EventHit]]:
    """Integrate ``field`` from ``x0`` with event detection.

    The horizon is ``duration`` (or ``config.max_time``).  Integration stops
    early at the first terminal event; if terminal events were requested but
    none fired within the horizon, the returned trajectory is flagged
    ``truncated``.  Events are reported in time order, located to a guard
    residual below 1e-10 on the dense output.
    """
    horizon = config.max_time if duration is None else duration
    if not math.isfinite(horizon):
        raise ValueError("a finite duration (or config.max_time) is required")
    t_end = t0 + horizon
    y0 = [float(v) for v in np.atleast_1d(np.asarray(x0, dtype=float))]
    f0 = list(field(t0, y0))
    engine = _select_engine(field)
    h = _pykernel.initial_step(field, t0, y0, f0, t_end, config.rel_tol,
                               config.abs_tol, config.max_step)

    parts_t: list[np.ndarray] = []
    parts_y: list[np.ndarray] = []
    parts_f: list[np.ndarray] = []
    all_hits: list[EventHit] = []
    any_terminal = any(ev.terminal for ev in events)
    t, y, f = t0, y0, f0
    terminated = False
    while True:
        ts, ys, fs, h, status = engine(t, y, f, h, t_end, config.rel_tol,
                                       config.abs_tol, config.max_step, CHUNK_BUDGET)
        if status == _pykernel.STATUS_UNDERFLOW:
            raise IntegrationError(
                f"stiffness or singularity encountered at t={ts[-1]:.6g}")
        chunk = Trajectory(ts, ys, fs)
        hits = scan_events(chunk, events, t_start=t0 if t == t0 else None)
        cut = None
        for hit in hits:
            all_hits.append(hit)
            if events[hit.index].terminal:
                cut = hit
                break
        if cut is not None:
            keep = ts < cut.t
            ts = np.append(ts[keep], cut.t)
            ys = np.vstack([ys[keep], cut.state])
            fe = np.asarray(field(cut.t, list(cut.state)), dtype=float)
            fs = np.vstack([fs[keep], fe])
            parts_t.append(ts)
            parts_y.append(ys)
            parts_f.append(fs)
            terminated = True
            break
        parts_t.append(ts)
        parts_y.append(ys)
        parts_f.append(fs)
        if status == _pykernel.STATUS_DONE:
            break
        # continue from chunk end (drop the duplicated first node later)
        t = float(ts[-1])
        y = [float(v) for v in ys[-1]]
        f = [float(v) for v in fs[-1]]

    ts = np.concatenate([parts_t[0]] + [p[1:] for p in parts_t[1:]])
    ys = np.concatenate([parts_y[0]] + [p[1:] for p in parts_y[1:]])
    fs = np.concatenate([parts_f[0]] + [p[1:] for p in parts_f[1:]])
    truncated = any_terminal and not terminated
    traj = Trajectory(ts, ys, fs, truncated=truncated)
    return traj, all_hits

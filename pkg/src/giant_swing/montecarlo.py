"""Seeded Monte-Carlo campaign over an energy sublevel set.

Initial conditions are drawn uniformly in the (q_u, p_u) plane and accepted
when their rigid-pendulum energy stays below the reference level (rejection
sampling).  Each run gets an independent Philox stream spawned from the
campaign seed, so results are reproducible bit for bit regardless of worker
count or execution order; aggregation is an ordered reduce by run index.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .constraint import VnhcSpec
from .integrator import (EventSpec, IntegratorConfig, compiled_available,
                         integrate)
from .kernels import reduced_field
from .models import nominal_energy, pendulum_inertia

__all__ = ["McRun", "sample_initial", "run_one", "run_campaign"]


@dataclass(frozen=True)
class McRun:
    index: int
    q_u0: float
    p_u0: float
    energy0: float
    onset_time: float | None   # first top passage; None if never rotated
    final_energy: float


def _angle_reach(params, level: float) -> float:
    """Largest |q_u| inside {E <= level}: the bounding box of the set."""
    from .models import potential_coefficient
    w = 1.0 - level / potential_coefficient(params)
    return math.pi if w <= -1.0 else math.acos(min(1.0, w))


def sample_initial(params, level: float, rng: np.random.Generator,
                   q_max: float) -> tuple[float, float]:
    """Uniform rejection sample from {E(q_u, p_u) <= level}."""
    p_max = math.sqrt(2.0 * pendulum_inertia(params) * level)
    while True:
        q_u = rng.uniform(-q_max, q_max)
        p_u = rng.uniform(-p_max, p_max)
        if nominal_energy(params, (q_u, p_u)) <= level:
            return q_u, p_u


def run_one(args) -> McRun:
    """One campaign member; top-level so process pools can pickle it."""
    (index, params, spec, level, q_max, seed_seq, duration, rel_tol,
     abs_tol) = args
    rng = np.random.Generator(np.random.Philox(seed_seq))
    q_u0, p_u0 = sample_initial(params, level, rng, q_max)
    fld = reduced_field(params, spec)
    top = EventSpec(guard=lambda t, y: math.sin(y[0]), direction="any",
                    condition=lambda t, y: math.cos(y[0]) < 0.0,
                    terminal=True, name="pi_line")
    cfg = IntegratorConfig(rel_tol=rel_tol, abs_tol=abs_tol)
    traj, hits = integrate(fld, [q_u0, p_u0], cfg, events=[top],
                           duration=duration)
    onset = hits[0].t if hits else None
    yf = traj.final_state
    return McRun(index=index, q_u0=q_u0, p_u0=p_u0,
                 energy0=nominal_energy(params, (q_u0, p_u0)),
                 onset_time=onset,
                 final_energy=nominal_energy(params, (yf[0], yf[1])))


def run_campaign(params, spec: VnhcSpec, level_state, samples: int, seed: int,
                 duration: float = 120.0, threads: int = 1,
                 rel_tol: float = 1e-9, abs_tol: float = 1e-11) -> list[McRun]:
    """Run ``samples`` seeded members; deterministic under a fixed seed."""
    level = nominal_energy(params, level_state)
    q_max = _angle_reach(params, level)
    children = np.random.SeedSequence(seed).spawn(samples)
    jobs = [(i, params, spec, level, q_max, children[i], duration,
             rel_tol, abs_tol) for i in range(samples)]
    if threads <= 1:
        return [run_one(j) for j in jobs]
    # compiled kernels release the GIL, so threads scale; the pure-Python
    # fallback needs processes
    pool_cls = ThreadPoolExecutor if compiled_available() else ProcessPoolExecutor
    with pool_cls(max_workers=threads) as pool:
        return list(pool.map(run_one, jobs))

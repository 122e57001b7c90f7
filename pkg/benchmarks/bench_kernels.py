#!/usr/bin/env python3
"""Timing comparison of the compiled and pure-Python integrator kernels.

Runs the standard workloads (planar constrained dynamics and the full
constrained 4-D loop, both models) through the same Dormand-Prince stepper
with each engine and prints a table.  The compiled engine is what the
Monte-Carlo and acceptance runtimes assume.
"""
import math
import time

from giant_swing import IntegratorConfig, SimplifiedParams, TESTBED_PARAMS, VnhcSpec
from giant_swing import manifold_state
from giant_swing.integrator import compiled_available, integrate
from giant_swing.kernels import full_field, reduced_field


class _PlainWrapper:
    """Hides kernel metadata so the integrator uses the Python engine."""

    def __init__(self, fld):
        self._fld = fld

    def __call__(self, t, y):
        return self._fld(t, y)


def workloads():
    simp, dist = SimplifiedParams(), TESTBED_PARAMS
    spec = VnhcSpec(amplitude=1.0, gain=10.0)
    lift = lambda m: list(manifold_state(m, spec, (math.pi / 32, 0.0)).as_vector())
    return [
        ("reduced / point-mass, 30 s", reduced_field(simp, spec),
         [math.pi / 32, 0.0], 30.0),
        ("reduced / testbed, 30 s", reduced_field(dist, spec),
         [math.pi / 32, 0.0], 30.0),
        ("full loop / point-mass, 10 s", full_field(simp, spec),
         lift(simp), 10.0),
        ("full loop / testbed, 10 s", full_field(dist, spec),
         lift(dist), 10.0),
    ]


def run(fld, x0, T, repeats=3):
    cfg = IntegratorConfig(rel_tol=1e-10, abs_tol=1e-12)
    best = math.inf
    nodes = 0
    for _ in range(repeats):
        t0 = time.perf_counter()
        traj, _ = integrate(fld, x0, cfg, duration=T)
        best = min(best, time.perf_counter() - t0)
        nodes = len(traj)
    return best, nodes


def main():
    if not compiled_available():
        print("compiled kernels unavailable; timing the Python engine only")
    print(f"{'workload':<32} {'steps':>7} {'compiled':>10} {'python':>10} {'speedup':>8}")
    for name, fld, x0, T in workloads():
        tc, nodes = run(fld, x0, T) if compiled_available() else (math.nan, 0)
        tp, nodes_p = run(_PlainWrapper(fld), x0, T, repeats=1)
        nodes = nodes or nodes_p
        speed = tp / tc if compiled_available() else math.nan
        print(f"{name:<32} {nodes:>7} {tc * 1e3:>8.1f}ms {tp * 1e3:>8.1f}ms "
              f"{speed:>7.1f}x")


if __name__ == "__main__":
    main()

"""Command-line front end.

    giant-swing simulate        one constrained run, CSV + JSON artifacts
    giant-swing montecarlo      seeded campaign over an energy sublevel set
    giant-swing regulate        supervisor run with switch log
    giant-swing verify-theorems first-order return-map table over r grids
    giant-swing energy          leg-extended energy coefficients and the
                                published-value consistency report

Exit codes: 0 success, 2 configuration error, 3 numeric failure.
"""
from __future__ import annotations

import math
import sys
import time
from pathlib import Path

import click
import numpy as np

from . import artifacts
from .config import ConfigError, ScenarioConfig, load_config
from .constraint import ConstraintSingular, VnhcSpec, manifold_state
from .energy import extract_crossings, section_events, verdict
from .integrator import (IntegrationError, Trajectory, compiled_available,
                         integrate)
from .kernels import full_field, reduced_field
from .models import SimplifiedParams, critical_level, energy_report, nominal_energy
from .montecarlo import run_campaign
from .supervisor import run_regulated
from .transforms import (ChartDomainError, QuadratureError, gain_constant,
                         numeric_return_map, osc_gain_integral,
                         poincare_first_order, rotation_gain_integral)

EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _common(fn):
    fn = click.option("--config", "config_path", required=True,
                      type=click.Path(), help="Scenario file (INI).")(fn)
    fn = click.option("--out", "out_dir", default="out", type=click.Path(),
                      help="Output directory (created if missing).")(fn)
    fn = click.option("--seed", type=int, default=None,
                      help="Override the scenario seed.")(fn)
    fn = click.option("--threads", type=int, default=1,
                      help="Worker count for Monte-Carlo campaigns.")(fn)
    return fn


def _load(config_path, seed) -> ScenarioConfig:
    cfg = load_config(config_path)
    if seed is not None:
        cfg.seed = seed
    return cfg


def _outdir(out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _guarded(fn):
    """Map failures to the documented exit codes."""

    def wrapper(*args, **kwargs):
        try:
            fn(*args, **kwargs)
        except ConfigError as exc:
            click.echo(f"config error: {exc}", err=True)
            sys.exit(EXIT_CONFIG)
        except (IntegrationError, QuadratureError, ChartDomainError,
                ConstraintSingular) as exc:
            click.echo(f"numeric failure: {exc}", err=True)
            sys.exit(EXIT_NUMERIC)

    wrapper.__name__ = fn.__name__
    return wrapper


@click.group()
def main():
    """Acrobot energy regulation via momentum-coupled leg constraints."""


def _run_summary(cfg, traj, crossings, switch_count, wall) -> dict:
    model = cfg.model
    R = critical_level(model)
    onset = next((c.t for c in crossings if c.section == "pi_line"), None)
    try:
        v = verdict(crossings, None, None, model)
        vdict = {"kind": v.kind, "trend": v.trend, "exit_time": v.exit_time,
                 "exit_level": v.exit_level, "crossings": v.crossing_count}
    except ValueError:
        vdict = None
    yf = traj.final_state
    return {
        "verdict": vdict,
        "rotation_onset_time": onset,
        "final_energy": nominal_energy(model, (yf[0], yf[1])),
        "critical_level": R,
        "switch_count": switch_count,
        "wall_time": wall,
        "engine": "compiled" if compiled_available() else "python",
        "model": artifacts.model_block(model),
    }


@main.command()
@_common
@_guarded
def simulate(config_path, out_dir, seed, threads):
    """Integrate one constrained run and emit trajectory artifacts."""
    cfg = _load(config_path, seed)
    out = _outdir(out_dir)
    t0 = time.perf_counter()
    if cfg.mode == "full":
        fld = full_field(cfg.model, cfg.spec)
        y0 = (list(cfg.initial_full) if cfg.initial_full is not None
              else list(manifold_state(cfg.model, cfg.spec, cfg.initial).as_vector()))
        traj4, _ = integrate(fld, y0, cfg.integrator, duration=cfg.duration)
        traj = Trajectory(traj4.ts, traj4.ys[:, [0, 2]], traj4.fs[:, [0, 2]])
        rows = artifacts.trajectory_rows_full(traj4, cfg.model, cfg.spec,
                                              cfg.output_dt)
    else:
        fld = reduced_field(cfg.model, cfg.spec)
        traj, _ = integrate(fld, list(cfg.initial), cfg.integrator,
                            duration=cfg.duration)
        rows = artifacts.trajectory_rows_reduced(traj, cfg.model, cfg.spec,
                                                 cfg.output_dt)
    artifacts.write_trajectory(out / "trajectory.csv", rows)
    crossings = extract_crossings(traj, cfg.model)
    artifacts.write_crossings(out / "crossings.csv", crossings)
    wall = time.perf_counter() - t0
    summary = _run_summary(cfg, traj, crossings, 0, wall)
    artifacts.write_summary(out / "summary.json", summary)
    v = summary["verdict"]
    click.echo(f"simulate: {cfg.mode} run of {cfg.duration} s, "
               f"verdict {v['trend'] if v else 'n/a'}, "
               f"final E {summary['final_energy']:.6g} J -> {out}")


@main.command()
@_common
@_guarded
def montecarlo(config_path, out_dir, seed, threads):
    """Seeded campaign: time to first revolution over a sublevel set."""
    cfg = _load(config_path, seed)
    if cfg.seed is None:
        raise ConfigError("[montecarlo] seed is required (or pass --seed)")
    out = _outdir(out_dir)
    t0 = time.perf_counter()
    runs = run_campaign(cfg.model, cfg.spec, cfg.initial, cfg.samples,
                        cfg.seed, duration=cfg.mc_duration, threads=threads)
    wall = time.perf_counter() - t0
    artifacts.write_csv(
        out / "runs.csv",
        ("index", "q_u0", "p_u0", "E0", "onset_time", "final_energy"),
        ((r.index, r.q_u0, r.p_u0, r.energy0,
          "" if r.onset_time is None else r.onset_time, r.final_energy)
         for r in runs))
    onsets = [r.onset_time for r in runs if r.onset_time is not None]
    summary = {
        "samples": cfg.samples,
        "seed": cfg.seed,
        "rotated": len(onsets),
        "rotated_fraction": len(onsets) / cfg.samples,
        "onset_min": min(onsets) if onsets else None,
        "onset_max": max(onsets) if onsets else None,
        "onset_mean": float(np.mean(onsets)) if onsets else None,
        "level": nominal_energy(cfg.model, cfg.initial),
        "wall_time": wall,
        "engine": "compiled" if compiled_available() else "python",
        "model": artifacts.model_block(cfg.model),
    }
    artifacts.write_summary(out / "summary.json", summary)
    click.echo(f"montecarlo: {len(onsets)}/{cfg.samples} rotated, "
               f"onsets [{summary['onset_min']}, {summary['onset_max']}] s -> {out}")


@main.command()
@_common
@_guarded
def regulate(config_path, out_dir, seed, threads):
    """Run the hysteresis supervisor and emit the switch log."""
    cfg = _load(config_path, seed)
    if cfg.regulation is None:
        raise ConfigError("missing [regulate] section")
    out = _outdir(out_dir)
    t0 = time.perf_counter()
    try:
        run = run_regulated(cfg.model, cfg.regulation, cfg.initial,
                            cfg.duration, template=cfg.spec,
                            dynamics=cfg.regulation_dynamics,
                            integrator=cfg.integrator)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    wall = time.perf_counter() - t0
    artifacts.write_switches(out / "switches.csv", run.supervisor.switch_log)
    crossings = extract_crossings(run.trajectory, cfg.model)
    artifacts.write_crossings(out / "crossings.csv", crossings)

    def rows():
        for decision, seg in run.segments:
            spec = cfg.spec
            gain = {"inject": cfg.regulation.gain_magnitude,
                    "dissipate": -cfg.regulation.gain_magnitude,
                    "extend": 0.0}[decision]
            seg_spec = VnhcSpec(amplitude=spec.amplitude, gain=gain,
                                kp=spec.kp, kd=spec.kd)
            if cfg.regulation_dynamics == "full":
                yield from artifacts.trajectory_rows_full(
                    seg, cfg.model, seg_spec, cfg.output_dt)
            else:
                yield from artifacts.trajectory_rows_reduced(
                    seg, cfg.model, seg_spec, cfg.output_dt)

    artifacts.write_trajectory(out / "trajectory.csv", rows())
    summary = _run_summary(cfg, run.trajectory, crossings,
                           len(run.supervisor.switch_log) - 1, wall)
    decisions = [s.decision for s in run.supervisor.switch_log]
    summary["regulation"] = {
        "mode": cfg.regulation.mode,
        "target": cfg.regulation.target,
        "hysteresis": cfg.regulation.hysteresis,
        "final_decisions": decisions[-5:],
        "captured": len(decisions) >= 5 and all(d == "extend" for d in decisions[-5:]),
    }
    artifacts.write_summary(out / "summary.json", summary)
    click.echo(f"regulate: {cfg.regulation.mode} target {cfg.regulation.target}, "
               f"{summary['switch_count']} triggers, "
               f"captured={summary['regulation']['captured']} -> {out}")


@main.command("verify-theorems")
@_common
@_guarded
def verify_theorems(config_path, out_dir, seed, threads):
    """Tabulate gain integrals and return-map shifts over the r grids."""
    cfg = _load(config_path, seed)
    if not isinstance(cfg.model, SimplifiedParams):
        raise ConfigError("verify-theorems requires the simplified model")
    if not cfg.osc_r and not cfg.rot_r:
        raise ConfigError("[verify] needs osc_r and/or rot_r grids")
    gains = cfg.gains or (1e-3, 2e-3)
    out = _outdir(out_dir)
    rows = []

    def add_rows(chart, r):
        for gain in gains:
            spec = VnhcSpec(amplitude=cfg.spec.amplitude, gain=gain,
                            kp=cfg.spec.kp, kd=cfg.spec.kd)
            try:
                if chart == "osc":
                    integral = osc_gain_integral(cfg.model, r)
                    shift = gain * gain_constant(cfg.model, spec) * integral
                else:
                    integral = rotation_gain_integral(cfg.model, spec, r)
                    shift = gain * integral
                numeric = numeric_return_map(cfg.model, spec, r, chart) - r
                rows.append((chart, r, gain, integral, shift, numeric,
                             numeric - shift, "ok"))
            except (QuadratureError, ChartDomainError, RuntimeError) as exc:
                rows.append((chart, r, gain, "", "", "", "", f"error: {exc}"))

    for r in cfg.osc_r:
        add_rows("osc", r)
    for r in cfg.rot_r:
        add_rows("rot", r)
    artifacts.write_verify(out / "verify.csv", rows)
    n_err = sum(1 for row in rows if row[-1] != "ok")
    click.echo(f"verify-theorems: {len(rows)} rows ({n_err} flagged) -> {out}")


@main.command()
@_common
@_guarded
def energy(config_path, out_dir, seed, threads):
    """Report the leg-extended energy coefficients for the scenario model."""
    cfg = _load(config_path, seed)
    out = _outdir(out_dir)
    rep = energy_report(cfg.model)
    rep["model_block"] = artifacts.model_block(cfg.model)
    artifacts.write_summary(out / "summary.json", rep)
    click.echo(f"kinetic coefficient (computed): {rep['kinetic_coefficient']:.6f}")
    click.echo(f"potential coefficient: {rep['potential_coefficient']:.6f}")
    click.echo(f"critical level: {rep['critical_level']:.6f} J")
    click.echo(f"boundary momentum (computed): {rep['boundary_momentum']:.6f}")
    if "published_kinetic_coefficient" in rep:
        click.echo(
            f"published kinetic coefficient: {rep['published_kinetic_coefficient']} "
            f"(implies boundary momentum "
            f"{rep['boundary_momentum_from_published_coefficient']:.6f})")
        click.echo(
            f"published boundary momentum ~{rep['published_boundary_momentum']}: "
            f"consistent with computed={rep['computed_matches_published_boundary']}, "
            f"with published={rep['published_matches_published_boundary']}")
    click.echo(f"artifacts -> {out}")


if __name__ == "__main__":
    main()

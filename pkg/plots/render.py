#!/usr/bin/env python3
"""Render phase-portrait figures from giant-swing CSV/JSON artifacts.

Reads only the documented artifact contract (trajectory.csv, crossings.csv,
switches.csv, runs.csv, verify.csv, summary.json) -- no access to library
internals -- and writes deterministic SVG: rendering the same inputs twice
produces byte-identical files.

    render.py --kind orbit           --in <run dir>    --out orbit.svg
    render.py --kind regulation      --in <run dir>    --out regulation.svg
    render.py --kind montecarlo_hist --in <run dir>    --out hist.svg
    render.py --kind verify_curves   --in <verify dir> --out verify.svg
"""
import argparse
import csv
import json
import math
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "giant-swing"

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

KINDS = ("orbit", "regulation", "montecarlo_hist", "verify_curves")


class ArtifactError(SystemExit):
    def __init__(self, message):
        super().__init__(f"render.py: {message}")


def read_rows(path: Path) -> list[dict]:
    if not path.exists():
        raise ArtifactError(f"missing input file {path}")
    with path.open() as fh:
        rows = list(csv.DictReader(fh))
    return rows


def read_summary(indir: Path) -> dict:
    path = indir / "summary.json"
    if not path.exists():
        raise ArtifactError(f"missing input file {path}")
    return json.loads(path.read_text())


def boundary_curve(model: dict):
    """Critical level set in the (q_u, p_u) plane from summary metadata."""
    Ip = model["pendulum_inertia"]
    A = model["potential_coefficient"]
    R = model["critical_level"]
    q = np.linspace(-math.pi, math.pi, 721)
    gap = 2.0 * Ip * (R - A * (1.0 - np.cos(q)))
    p = np.sqrt(np.clip(gap, 0.0, None))
    return q, p


def level_curve(model: dict, level: float):
    Ip = model["pendulum_inertia"]
    A = model["potential_coefficient"]
    q = np.linspace(-math.pi, math.pi, 721)
    gap = 2.0 * Ip * (level - A * (1.0 - np.cos(q)))
    p = np.where(gap >= 0.0, np.sqrt(np.clip(gap, 0.0, None)), np.nan)
    return q, p


def split_at_wraps(q, p):
    """Break the polyline where the wrapped angle jumps across the seam."""
    q = np.asarray(q)
    p = np.asarray(p)
    jumps = np.where(np.abs(np.diff(q)) > math.pi)[0]
    start = 0
    for j in jumps:
        yield q[start:j + 1], p[start:j + 1]
        start = j + 1
    yield q[start:], p[start:]


def load_trajectory(indir: Path):
    rows = read_rows(indir / "trajectory.csv")
    if not rows:
        raise ArtifactError(f"{indir / 'trajectory.csv'} has no data rows")
    t = np.array([float(r["t"]) for r in rows])
    q = np.array([float(r["q_u"]) for r in rows])
    p = np.array([float(r["p_u"]) for r in rows])
    return t, q, p


def new_axes(title):
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    ax.set_xlabel("torso angle q_u (rad)")
    ax.set_ylabel("torso momentum p_u")
    ax.set_title(title)
    return fig, ax


def draw_orbit(ax, indir: Path, summary: dict):
    t, q, p = load_trajectory(indir)
    for qs, ps in split_at_wraps(q, p):
        ax.plot(qs, ps, color="tab:blue", lw=0.8)
    qb, pb = boundary_curve(summary["model"])
    ax.plot(qb, pb, "k-", lw=1.2, label="critical level")
    ax.plot(qb, -pb, "k-", lw=1.2)
    crossings = read_rows(indir / "crossings.csv")
    for section, color in (("P_o", "k"), ("P_r", "k"), ("pi_line", "r")):
        pts = [(float(r["q_u"]), float(r["p_u"])) for r in crossings
               if r["section"] == section]
        if pts:
            xs, ys = zip(*pts)
            ax.plot(xs, ys, linestyle="none", marker="*", color=color,
                    markersize=6, label=section)
    ax.legend(loc="upper right", fontsize=7)


def cmd_orbit(indir: Path, out: Path):
    summary = read_summary(indir)
    fig, ax = new_axes("constrained orbit")
    draw_orbit(ax, indir, summary)
    return fig


def cmd_regulation(indir: Path, out: Path):
    summary = read_summary(indir)
    reg = summary.get("regulation")
    if reg is None:
        raise ArtifactError("summary.json carries no regulation block")
    fig, ax = new_axes(f"regulated {reg['mode']} "
                       f"(target {reg['target']:.3g})")
    draw_orbit(ax, indir, summary)
    model = summary["model"]
    A = model["potential_coefficient"]
    Ip = model["pendulum_inertia"]
    tgt, delta = reg["target"], reg["hysteresis"]
    if reg["mode"] == "oscillation":
        levels = [A * (1.0 - math.cos(v * tgt)) for v in (1.0 - delta, 1.0 + delta)]
        solid = A * (1.0 - math.cos(tgt))
    else:
        levels = [(v * tgt) ** 2 / (2.0 * Ip) for v in (1.0 - delta, 1.0 + delta)]
        solid = tgt ** 2 / (2.0 * Ip)
    q, p = level_curve(model, solid)
    ax.plot(q, p, "k-", lw=1.0)
    ax.plot(q, -p, "k-", lw=1.0)
    for lv in levels:
        q, p = level_curve(model, lv)
        ax.plot(q, p, "k--", lw=0.7)
        ax.plot(q, -p, "k--", lw=0.7)
    # mark supervisor triggers on the orbit by nearest trajectory sample
    t, qt, pt = load_trajectory(indir)
    switches = read_rows(indir / "switches.csv")
    for r in switches:
        if r["trigger"] == "initial":
            continue
        i = int(np.argmin(np.abs(t - float(r["t"]))))
        ax.plot([qt[i]], [pt[i]], "k*", markersize=6)
    return fig


def cmd_montecarlo_hist(indir: Path, out: Path):
    rows = read_rows(indir / "runs.csv")
    if not rows:
        raise ArtifactError(f"{indir / 'runs.csv'} has no data rows")
    onsets = [float(r["onset_time"]) for r in rows if r["onset_time"] != ""]
    misses = len(rows) - len(onsets)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if onsets:
        lo = math.floor(min(onsets))
        hi = math.ceil(max(onsets)) + 1
        ax.hist(onsets, bins=np.arange(lo, hi + 1), color="tab:blue",
                edgecolor="black")
    ax.set_xlabel("time to first revolution (s)")
    ax.set_ylabel("runs")
    title = f"revolution onset times ({len(onsets)}/{len(rows)} rotated)"
    if misses:
        title += f", {misses} never rotated"
    ax.set_title(title)
    return fig


def cmd_verify_curves(indir: Path, out: Path):
    rows = read_rows(indir / "verify.csv")
    ok = [r for r in rows if r["status"] == "ok"]
    if not ok:
        raise ArtifactError(f"{indir / 'verify.csv'} has no usable rows")
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 4.0))
    for chart, color in (("osc", "tab:blue"), ("rot", "tab:orange")):
        sub = sorted({float(r["r"]): float(r["gain_integral"])
                      for r in ok if r["chart"] == chart}.items())
        if sub:
            ax1.plot(*zip(*sub), marker="o", ms=3, color=color, label=chart)
    ax1.axhline(0.0, color="k", lw=0.6)
    ax1.set_xlabel("chart radius r")
    ax1.set_ylabel("radial drift integral")
    ax1.legend(fontsize=8)
    pred = [float(r["first_order_shift"]) for r in ok]
    num = [float(r["numeric_shift"]) for r in ok]
    lim = max(abs(v) for v in pred + num) or 1.0
    ax2.plot([-lim, lim], [-lim, lim], "k-", lw=0.6)
    ax2.plot(pred, num, linestyle="none", marker="o", ms=3, color="tab:green")
    ax2.set_xlabel("first-order radius shift")
    ax2.set_ylabel("measured radius shift")
    fig.suptitle("return-map verification")
    return fig


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--in", dest="indir", required=True, type=Path)
    parser.add_argument("--out", required=True, type=Path)
    args = parser.parse_args(argv)

    handler = {
        "orbit": cmd_orbit,
        "regulation": cmd_regulation,
        "montecarlo_hist": cmd_montecarlo_hist,
        "verify_curves": cmd_verify_curves,
    }[args.kind]
    fig = handler(args.indir, args.out)  # raises before touching the output
    args.out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(args.out, format="svg", metadata={"Date": None})
    plt.close(fig)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()

"""Secondary-component tests: rendering from CLI artifacts alone.

Artifacts are produced through the public command-line interface; the
renderer never imports giant_swing.
"""
import subprocess
import sys
from pathlib import Path

import pytest

HERE = Path(__file__).resolve().parent
ROOT = HERE.parent
RENDER = HERE / "render.py"
CONFIGS = ROOT / "configs"


def cli(*args):
    res = subprocess.run([sys.executable, "-m", "giant_swing.cli", *args],
                         capture_output=True, text=True)
    assert res.returncode == 0, res.stderr + res.stdout
    return res


def render(*args):
    return subprocess.run([sys.executable, str(RENDER), *args],
                          capture_output=True, text=True)


@pytest.fixture(scope="module")
def artifacts(tmp_path_factory):
    """One injection run, one regulated run, a tiny campaign, a verify table."""
    base = tmp_path_factory.mktemp("artifacts")
    scen = base / "scenario.ini"
    scen.write_text("""
[model]
kind = distributed
[constraint]
amplitude = 1.0
gain = 10.0
[initial]
q_u = 0.09817477042468103
p_u = 0.0
[run]
duration = 26.0
rel_tol = 1e-9
abs_tol = 1e-11
output_dt = 0.02
""")
    cli("simulate", "--config", str(scen), "--out", str(base / "orbit"))

    reg = base / "regulate.ini"
    reg.write_text("""
[model]
kind = distributed
[initial]
q_u = 1.5707963267948966
p_u = 0.0
[run]
duration = 30.0
rel_tol = 1e-9
abs_tol = 1e-11
output_dt = 0.02
[regulate]
mode = rotation
target = 0.19
hysteresis = 0.02
gain_magnitude = 10.0
""")
    cli("regulate", "--config", str(reg), "--out", str(base / "reg"))

    mc = base / "mc.ini"
    mc.write_text("""
[model]
kind = distributed
[constraint]
gain = 10.0
[initial]
q_u = 0.09817477042468103
[montecarlo]
samples = 4
duration = 45.0
seed = 11
""")
    cli("montecarlo", "--config", str(mc), "--out", str(base / "mc"))

    ver = base / "verify.ini"
    ver.write_text("""
[model]
kind = simplified
[verify]
osc_r = 0.5,1.0,1.5
rot_r = 27.0
gains = 0.001
""")
    cli("verify-theorems", "--config", str(ver), "--out", str(base / "verify"))
    return base


@pytest.mark.parametrize("kind,sub", [
    ("orbit", "orbit"),
    ("regulation", "reg"),
    ("montecarlo_hist", "mc"),
    ("verify_curves", "verify"),
])
def test_render_byte_stable(artifacts, tmp_path, kind, sub):
    outs = []
    for name in ("one.svg", "two.svg"):
        out = tmp_path / name
        res = render("--kind", kind, "--in", str(artifacts / sub),
                     "--out", str(out))
        assert res.returncode == 0, res.stderr
        assert out.exists()
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    assert b"<svg" in outs[0]


def test_orbit_has_boundary_and_markers(artifacts, tmp_path):
    out = tmp_path / "orbit.svg"
    render("--kind", "orbit", "--in", str(artifacts / "orbit"),
           "--out", str(out))
    svg = out.read_text()
    assert "critical level" in svg          # boundary overlay legend
    assert "P_o" in svg                     # crossing markers present


def test_empty_trajectory_clean_error(artifacts, tmp_path):
    broken = tmp_path / "broken"
    broken.mkdir()
    (broken / "trajectory.csv").write_text("t,q_u,q_a,p_u,p_a,E,e,e_dot\n")
    (broken / "crossings.csv").write_text("t,section,q_u,p_u,norm,E\n")
    (broken / "summary.json").write_text(
        (artifacts / "orbit" / "summary.json").read_text())
    out = tmp_path / "nope.svg"
    res = render("--kind", "orbit", "--in", str(broken), "--out", str(out))
    assert res.returncode != 0
    assert "no data rows" in res.stderr
    assert not out.exists()


def test_missing_inputs_clean_error(artifacts, tmp_path):
    res = render("--kind", "montecarlo_hist", "--in", str(tmp_path),
                 "--out", str(tmp_path / "x.svg"))
    assert res.returncode != 0
    assert "missing input file" in res.stderr
    assert not (tmp_path / "x.svg").exists()

import math

import numpy as np
import pytest

from giant_swing import IntegratorConfig, VnhcSpec, boundary_momentum
from giant_swing.mechanics import wrap_angle
from giant_swing.supervisor import (RegulationConfig, oscillation_decide,
                                    rotation_decide, run_regulated)


def tail_extends(run, n=5):
    decisions = [s.decision for s in run.supervisor.switch_log]
    return len(decisions) >= n and all(d == "extend" for d in decisions[-n:])


def last_trigger_values(run, n=5):
    return [s.value for s in run.supervisor.switch_log[-n:]]


class TestDecisionRules:
    def test_rotation_table(self):
        cfg = RegulationConfig(mode="rotation", target=0.19, hysteresis=0.02)
        assert rotation_decide(cfg, 0.10) == "inject"
        assert rotation_decide(cfg, 0.23) == "dissipate"
        assert rotation_decide(cfg, 0.19) == "extend"
        assert rotation_decide(cfg, -0.19) == "extend"  # judged on magnitude

    def test_rotation_band_edges_extend(self):
        cfg = RegulationConfig(mode="rotation", target=0.19, hysteresis=0.02)
        assert rotation_decide(cfg, 0.19 * 0.98) == "extend"
        assert rotation_decide(cfg, 0.19 * 1.02) == "extend"

    def test_oscillation_table(self):
        cfg = RegulationConfig(mode="oscillation", target=math.pi / 2,
                               hysteresis=0.05)
        assert oscillation_decide(cfg, math.pi / 32) == "inject"
        assert oscillation_decide(cfg, math.pi) == "dissipate"
        assert oscillation_decide(cfg, math.pi / 2) == "extend"

    def test_decisions_are_pure(self):
        cfg = RegulationConfig(mode="oscillation", target=1.0, hysteresis=0.1)
        for v in np.linspace(0.0, math.pi, 50):
            assert oscillation_decide(cfg, v) == oscillation_decide(cfg, v)

    def test_zero_hysteresis_tie_extends(self):
        cfg = RegulationConfig(mode="oscillation", target=1.0, hysteresis=0.0)
        assert oscillation_decide(cfg, 1.0) == "extend"


class TestConfigValidation:
    def test_oscillation_bounds(self):
        with pytest.raises(ValueError):
            RegulationConfig(mode="oscillation", target=3.5, hysteresis=0.05)
        with pytest.raises(ValueError):
            RegulationConfig(mode="oscillation", target=math.pi / 2,
                             hysteresis=1.5)  # pi/target - 1 = 1.0

    def test_rotation_band_above_boundary(self, distributed):
        cfg = RegulationConfig(mode="rotation", target=0.15, hysteresis=0.02)
        with pytest.raises(ValueError, match="critical bottom momentum"):
            cfg.validate_for(distributed)
        ok = RegulationConfig(mode="rotation", target=0.19, hysteresis=0.02)
        ok.validate_for(distributed)  # 0.98 * 0.19 > 0.1815


class TestRegulatedRuns:
    def test_oscillation_capture_from_below(self, distributed):
        cfg = RegulationConfig(mode="oscillation", target=math.pi / 2,
                               hysteresis=0.05)
        run = run_regulated(distributed, cfg, (math.pi / 32, 0.0), 60.0)
        assert tail_extends(run)
        band = (0.95 * math.pi / 2, 1.05 * math.pi / 2)
        for v in last_trigger_values(run, 3):
            assert band[0] <= v <= band[1]

    def test_oscillation_capture_from_rotation(self, distributed):
        cfg = RegulationConfig(mode="oscillation", target=math.pi / 2,
                               hysteresis=0.05)
        run = run_regulated(distributed, cfg, (0.0, 0.19), 80.0)
        # the first trigger on a revolution is the top passage, and the
        # hysteresis bound makes its decision dissipate
        first = run.supervisor.switch_log[1]
        assert first.trigger == "pi_line"
        assert first.value == pytest.approx(math.pi, abs=1e-6)
        assert first.decision == "dissipate"
        assert tail_extends(run)

    def test_rotation_capture_from_below(self, distributed):
        cfg = RegulationConfig(mode="rotation", target=0.19, hysteresis=0.02)
        run = run_regulated(distributed, cfg, (math.pi / 2, 0.0), 60.0)
        assert tail_extends(run)
        band = (0.98 * 0.19, 1.02 * 0.19)
        for v in last_trigger_values(run, 3):
            assert band[0] <= v <= band[1]

    def test_rotation_capture_from_above(self, distributed):
        cfg = RegulationConfig(mode="rotation", target=0.19, hysteresis=0.02)
        run = run_regulated(distributed, cfg, (0.0, 0.23), 60.0)
        assert run.supervisor.switch_log[0].decision == "dissipate"
        assert tail_extends(run)

    def test_band_start_stays_in_band(self, distributed):
        # begin on a conservative orbit inside the band: extend throughout
        cfg = RegulationConfig(mode="rotation", target=0.19, hysteresis=0.02)
        run = run_regulated(distributed, cfg, (0.0, 0.19), 30.0)
        decisions = {s.decision for s in run.supervisor.switch_log}
        assert decisions == {"extend"}

    def test_no_chattering_after_capture(self, distributed):
        cfg = RegulationConfig(mode="oscillation", target=math.pi / 2,
                               hysteresis=0.05)
        run = run_regulated(distributed, cfg, (math.pi / 32, 0.0), 60.0)
        ds = [s.decision for s in run.supervisor.switch_log]
        first_extend = ds.index("extend")
        tail = ds[first_extend:]
        assert "inject" not in tail and "dissipate" not in tail

    def test_full_dynamics_capture(self, distributed):
        cfg = RegulationConfig(mode="oscillation", target=math.pi / 2,
                               hysteresis=0.05)
        run = run_regulated(distributed, cfg, (math.pi / 32, 0.0), 60.0,
                            template=VnhcSpec(kp=100.0, kd=20.0),
                            dynamics="full",
                            integrator=IntegratorConfig(rel_tol=1e-8,
                                                        abs_tol=1e-10))
        assert tail_extends(run)

    def test_switch_log_times_increase(self, distributed):
        cfg = RegulationConfig(mode="rotation", target=0.19, hysteresis=0.02)
        run = run_regulated(distributed, cfg, (math.pi / 2, 0.0), 40.0)
        ts = [s.t for s in run.supervisor.switch_log]
        assert all(b > a for a, b in zip(ts, ts[1:]))

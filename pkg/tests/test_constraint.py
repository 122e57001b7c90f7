import math

import numpy as np
import numpy.testing as npt
import pytest

from giant_swing import (FullState, IntegratorConfig, SimplifiedParams,
                         VnhcSpec, constraint_value, decoupling_scalar,
                         enforcement_torque, manifold_state,
                         momentum_completion, reduced_vector_field,
                         regularity_check)
from giant_swing.constraint import (constraint_error,
                                    momentum_completion_generic,
                                    reduced_vector_field_generic)
from giant_swing.integrator import integrate
from giant_swing.kernels import full_field, reduced_field
from giant_swing.mechanics import full_vector_field
from giant_swing.models import build_system, nominal_energy


class TestConstraintValue:
    def test_zero_momentum(self):
        assert constraint_value(VnhcSpec(gain=10.0), 0.0) == 0.0

    def test_zero_gain_everywhere(self, rng):
        spec = VnhcSpec(gain=0.0)
        for p in rng.uniform(-50, 50, 20):
            assert constraint_value(spec, p) == 0.0

    def test_quarter_pi(self):
        spec = VnhcSpec(amplitude=1.0, gain=10.0)
        assert constraint_value(spec, 0.1) == pytest.approx(math.pi / 4, rel=1e-12)

    def test_bounded_and_odd(self, rng):
        spec = VnhcSpec(amplitude=1.2, gain=3.0)
        for p in rng.uniform(-100, 100, 50):
            v = constraint_value(spec, p)
            assert abs(v) < 1.2 * math.pi / 2
            assert v == pytest.approx(-constraint_value(spec, -p), rel=1e-14)


class TestDecouplingScalar:
    def test_leg_straight(self, simplified):
        spec = VnhcSpec(gain=10.0)
        x = FullState(q=[0.3, 0.0], p=[0.2, 0.1])
        assert decoupling_scalar(simplified, spec, x) == pytest.approx(5.0, rel=1e-12)

    def test_leg_square(self, simplified):
        spec = VnhcSpec(gain=10.0)
        x = FullState(q=[0.3, math.pi / 2], p=[0.2, 0.1])
        assert decoupling_scalar(simplified, spec, x) == pytest.approx(1.5, rel=1e-12)

    @pytest.mark.parametrize("gain", [-10.0, 0.0, 10.0])
    def test_positive_over_grid(self, any_model, gain):
        spec = VnhcSpec(amplitude=1.0, gain=gain)
        rep = regularity_check(any_model, spec)
        assert rep.passed
        assert rep.min_value > 0.0

    def test_simplified_min_at_pi(self, simplified):
        rep = regularity_check(simplified, VnhcSpec(gain=10.0))
        # (3 + 2 c_a)/(2 - c_a^2) is minimized where the leg folds back
        assert abs(abs(rep.argmin_qa) - math.pi) < 0.02
        assert rep.min_value == pytest.approx(1.0, rel=1e-3)

    def test_constructed_singularity_fails(self, simplified):
        class FoldedConstraint:
            """df/dq_u chosen to zero the decoupling scalar exactly."""

            def df_dqu(self, q_u, p_u):
                return -(3.0 + 2.0 * math.cos(0.0)) / (1.0 + math.cos(0.0))

            def df_dpu(self, p_u):
                return 0.0

        x = FullState(q=[0.3, 0.0], p=[0.2, 0.1])
        H = decoupling_scalar(simplified, FoldedConstraint(), x)
        assert abs(H) < 1e-12
        rep = regularity_check(simplified, FoldedConstraint())
        assert not rep.passed


class TestRelativeDegree:
    def test_edot_has_no_torque_term(self, any_model):
        # e_dot assembled through the constraint differential never reads the
        # torque-driven component; the difference is exactly zero
        spec = VnhcSpec(amplitude=1.0, gain=10.0)
        sys = build_system(any_model)
        x = FullState(q=[0.4, 0.2], p=[0.05, 0.02])
        for tau in (0.0, 5.0):
            f = full_vector_field(sys, x, [tau])
            e_dot = f[1] - spec.df_dpu(x.p[0]) * f[2]
            if tau == 0.0:
                base = e_dot
        assert abs(e_dot - base) < 1e-12

    def test_eddot_torque_slope_equals_decoupling(self, any_model):
        spec = VnhcSpec(amplitude=1.0, gain=10.0)
        sys = build_system(any_model)
        x = FullState(q=[0.4, 0.2], p=[0.05, 0.02])
        d = 1e-7

        def eddot(tau):
            f = full_vector_field(sys, x, [tau])
            xp = FullState.from_vector(x.as_vector() + d * f)
            xm = FullState.from_vector(x.as_vector() - d * f)
            ep = constraint_error(any_model, spec, xp, system=sys)
            em = constraint_error(any_model, spec, xm, system=sys)
            return (ep.e_dot - em.e_dot) / (2 * d)

        slope = (eddot(1.0) - eddot(0.0)) / 1.0
        H = decoupling_scalar(any_model, spec, x, system=sys)
        assert slope == pytest.approx(H, rel=1e-6, abs=1e-6)


class TestEnforcementTorque:
    def test_on_manifold_error_stays_zero(self, any_model):
        spec = VnhcSpec(amplitude=1.0, gain=10.0)
        x = manifold_state(any_model, spec, (0.3, 0.05))
        tau = enforcement_torque(any_model, spec, x)
        # resulting e-ddot along the closed loop vanishes; the drift has large
        # higher derivatives, so Richardson-extrapolate the measurement
        sys = build_system(any_model)
        f = full_vector_field(sys, x, [tau])

        def eddot(d):
            ep = constraint_error(any_model, spec,
                                  FullState.from_vector(x.as_vector() + d * f))
            em = constraint_error(any_model, spec,
                                  FullState.from_vector(x.as_vector() - d * f))
            assert abs(ep.e) < 1e-6 and abs(em.e) < 1e-6
            return (ep.e_dot - em.e_dot) / (2 * d)

        richardson = (4 * eddot(1e-6) - eddot(2e-6)) / 3
        assert abs(richardson) < 1e-6

    def test_rest_with_zero_gain(self, any_model):
        spec = VnhcSpec(amplitude=1.0, gain=0.0)
        x = FullState(q=[0.0, 0.0], p=[0.0, 0.0])
        assert enforcement_torque(any_model, spec, x) == pytest.approx(0.0, abs=1e-12)

    def test_error_decay_is_critically_damped(self, simplified):
        # start with e(0) = 0.1, e_dot(0) = 0 and compare e(t) against the
        # linear solution e0 (1 + 10 t) exp(-10 t) of e'' = -100 e - 20 e'
        spec = VnhcSpec(amplitude=1.0, gain=10.0, kp=100.0, kd=20.0)
        sys = build_system(simplified)
        q_u, p_u = 0.4, 0.0
        q_a = spec.f(p_u) + 0.1
        # pick p_a so that e_dot = (Minv p)_a + f' dV/dq_u vanishes
        Mi = sys.inertia_inverse([q_u, q_a])
        dV = sys.potential_gradient([q_u, q_a])[0]
        p_a = (-spec.df_dpu(p_u) * dV - Mi[1, 0] * p_u) / Mi[1, 1]
        x0 = [q_u, q_a, p_u, p_a]
        err0 = constraint_error(simplified, spec, x0)
        assert err0.e == pytest.approx(0.1, abs=1e-12)
        assert err0.e_dot == pytest.approx(0.0, abs=1e-12)
        fld = full_field(simplified, spec)
        cfg = IntegratorConfig(rel_tol=1e-10, abs_tol=1e-12)
        traj, _ = integrate(fld, x0, cfg, duration=1.0)
        worst = 0.0
        for t in np.linspace(0.0, 1.0, 101):
            y = traj.sample(t)
            e = constraint_error(simplified, spec, y).e
            e_lin = 0.1 * (1 + 10 * t) * math.exp(-10 * t)
            worst = max(worst, abs(e - e_lin))
        assert worst < 0.02 * 0.1


class TestMomentumCompletion:
    def test_origin(self, any_model):
        spec = VnhcSpec(amplitude=1.0, gain=10.0)
        assert momentum_completion(any_model, spec, (0.0, 0.0)) == pytest.approx(0.0, abs=1e-15)

    def test_zero_gain_matches_rigid_body(self, any_model):
        # with the leg locked, p_a = m12(0) q_u_dot = m12(0)/m11(0) p_u
        spec = VnhcSpec(amplitude=1.0, gain=0.0)
        sys = build_system(any_model)
        M = sys.inertia([0.0, 0.0])
        for p_u in (-0.3, 0.1, 2.0):
            expected = M[0, 1] / M[0, 0] * p_u
            assert momentum_completion(any_model, spec, (0.7, p_u)) == \
                pytest.approx(expected, rel=1e-12)

    def test_simplified_zero_gain_fraction(self, simplified):
        spec = VnhcSpec(amplitude=1.0, gain=0.0)
        assert momentum_completion(simplified, spec, (0.7, 1.0)) == \
            pytest.approx(2.0 / 5.0, rel=1e-12)

    @pytest.mark.parametrize("params", [SimplifiedParams(),
                                        SimplifiedParams(m=0.7, l=1.3, g=9.81)])
    def test_closed_form_equals_generic(self, params, rng):
        spec = VnhcSpec(amplitude=1.0, gain=10.0)
        for _ in range(1000):
            s = (rng.uniform(-math.pi, math.pi), rng.uniform(-5, 5))
            a = momentum_completion(params, spec, s)
            b = momentum_completion_generic(params, spec, s)
            assert a == pytest.approx(b, rel=1e-9, abs=1e-9)


class TestReducedField:
    def test_equilibrium(self, any_model):
        spec = VnhcSpec(amplitude=1.0, gain=10.0)
        npt.assert_allclose(reduced_vector_field(any_model, spec, (0.0, 0.0)),
                            0.0, atol=1e-15)

    def test_closed_form_equals_generic(self, rng):
        params = SimplifiedParams(m=0.9, l=1.1, g=9.81)
        spec = VnhcSpec(amplitude=0.8, gain=-7.0)
        for _ in range(1000):
            s = (rng.uniform(-math.pi, math.pi), rng.uniform(-8, 8))
            a = reduced_vector_field(params, spec, s)
            b = reduced_vector_field_generic(params, spec, s)
            npt.assert_allclose(a, b, rtol=1e-9, atol=1e-9)

    def test_kernel_matches_generic(self, any_model, rng):
        spec = VnhcSpec(amplitude=1.0, gain=10.0)
        fld = reduced_field(any_model, spec)
        for _ in range(200):
            s = (rng.uniform(-math.pi, math.pi), rng.uniform(-2, 2))
            npt.assert_allclose(fld(0.0, list(s)),
                                reduced_vector_field_generic(any_model, spec, s),
                                rtol=1e-9, atol=1e-12)

    @pytest.mark.parametrize("gain", [10.0, -10.0])
    def test_odd_symmetry(self, any_model, gain, rng):
        spec = VnhcSpec(amplitude=1.0, gain=gain)
        for _ in range(100):
            s = (rng.uniform(-math.pi, math.pi), rng.uniform(-3, 3))
            f1 = reduced_vector_field(any_model, spec, s)
            f2 = reduced_vector_field(any_model, spec, (-s[0], -s[1]))
            npt.assert_allclose(f2, -f1, rtol=1e-12, atol=1e-14)

    def test_full_closed_loop_matches_reduced(self, any_model):
        # start exactly on the constraint manifold; the projected 4-D closed
        # loop must track the planar dynamics
        spec = VnhcSpec(amplitude=1.0, gain=10.0)
        x0 = (math.pi / 32, 0.0)
        ffld = full_field(any_model, spec)
        rfld = reduced_field(any_model, spec)
        cfg = IntegratorConfig(rel_tol=1e-10, abs_tol=1e-12)
        tight = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14)
        y0 = list(manifold_state(any_model, spec, x0).as_vector())
        traj4, _ = integrate(ffld, y0, cfg, duration=10.0)
        traj2, _ = integrate(rfld, list(x0), tight, duration=10.0)
        ts = np.linspace(0.0, 10.0, 801)
        full_qp = traj4.sample(ts)[:, [0, 2]]
        red_qp = traj2.sample(ts)
        assert np.max(np.abs(full_qp - red_qp)) < 1e-4

    def test_manifold_invariance_30s(self, simplified):
        spec = VnhcSpec(amplitude=1.0, gain=10.0)
        ffld = full_field(simplified, spec)
        cfg = IntegratorConfig(rel_tol=1e-10, abs_tol=1e-12)
        y0 = list(manifold_state(simplified, spec, (math.pi / 8, 0.0)).as_vector())
        traj, _ = integrate(ffld, y0, cfg, duration=30.0)
        worst = 0.0
        for y in traj.ys[::5]:
            err = constraint_error(simplified, spec, y)
            worst = max(worst, abs(err.e), abs(err.e_dot))
        assert worst < 1e-5

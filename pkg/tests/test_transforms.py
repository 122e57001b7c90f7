import math

import numpy as np
import numpy.testing as npt
import pytest

from giant_swing import IntegratorConfig, SimplifiedParams, VnhcSpec
from giant_swing.integrator import integrate
from giant_swing.kernels import reduced_field
from giant_swing.models import critical_level
from giant_swing.transforms import (ChartDomainError, from_polar_osc,
                                    from_polar_rot, f_theta_osc, f_theta_rot,
                                    gain_constant, integrand_a, integrand_b,
                                    numeric_return_map, osc_gain_integral,
                                    poincare_first_order,
                                    rotation_gain_integral, to_polar_osc,
                                    to_polar_rot)

TWO_PI = 2 * math.pi


def angdiff(a, b):
    return (a - b + math.pi) % TWO_PI - math.pi


class TestOscillationChart:
    def test_positive_axis_fixed(self, simplified):
        for q in (0.3, 1.2, 2.9):
            ps = to_polar_osc(simplified, (q, 0.0))
            assert ps.r == pytest.approx(q, rel=1e-12)
            assert ps.theta == pytest.approx(0.0, abs=1e-12)

    def test_theta_pi_maps_to_negative_axis(self, simplified):
        q, p = from_polar_osc(simplified, 1.1, math.pi)
        assert q == pytest.approx(-1.1, rel=1e-12)
        assert abs(p) < 1e-12  # exactly zero up to the rounding of pi itself

    def test_round_trip(self, simplified, rng):
        worst = 0.0
        for _ in range(1000):
            r = rng.uniform(0.05, math.pi - 0.05)
            th = rng.uniform(0.0, TWO_PI)
            q, p = from_polar_osc(simplified, r, th)
            ps = to_polar_osc(simplified, (q, p))
            worst = max(worst, abs(ps.r - r), abs(angdiff(ps.theta, th)))
        assert worst < 1e-9

    def test_domain_errors(self, simplified):
        with pytest.raises(ChartDomainError):
            to_polar_osc(simplified, (0.0, 100.0))  # above the critical level
        with pytest.raises(ChartDomainError):
            from_polar_osc(simplified, 3.5, 0.0)

    def test_level_sets_are_circles(self, simplified):
        # conservative orbits keep r constant while theta sweeps
        fld = reduced_field(simplified, VnhcSpec(gain=0.0))
        cfg = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14)
        traj, _ = integrate(fld, [1.3, 0.0], cfg, duration=10.0)
        rs = [to_polar_osc(simplified, y).r for y in traj.ys]
        assert max(rs) - min(rs) < 1e-6


class TestRotationChart:
    def test_axis_point(self, simplified):
        ps = to_polar_rot(simplified, (0.0, 26.0), "+")
        assert ps.r == pytest.approx(26.0, rel=1e-14)
        assert ps.theta == pytest.approx(0.0, abs=1e-14)

    def test_wrong_branch(self, simplified):
        with pytest.raises(ChartDomainError):
            to_polar_rot(simplified, (0.0, 26.0), "-")

    def test_round_trip(self, simplified, rng):
        floor = math.sqrt(60 * 9.81)
        worst = 0.0
        for _ in range(1000):
            r = rng.uniform(floor + 0.2, 40.0)
            th = rng.uniform(0.0, TWO_PI)
            br = "+" if rng.uniform() > 0.5 else "-"
            q, p = from_polar_rot(simplified, r, th, br)
            ps = to_polar_rot(simplified, (q, p), br)
            worst = max(worst, abs(ps.r - r), abs(angdiff(ps.theta, th)))
        assert worst < 1e-9

    def test_level_sets_are_circles(self, simplified):
        fld = reduced_field(simplified, VnhcSpec(gain=0.0))
        cfg = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14)
        p0 = math.sqrt(10 * 1.4 * critical_level(simplified))
        traj, _ = integrate(fld, [0.0, p0], cfg, duration=6.0)
        rs = [to_polar_rot(simplified, (y[0], y[1]), "+").r for y in traj.ys]
        assert max(rs) - min(rs) < 1e-6


class TestAngularSpeeds:
    def test_osc_limit_value(self, simplified):
        g, l = 9.81, 1.0
        for r in (0.5, 1.5, 2.8):
            lim = math.sqrt(6 * g * math.sin(r) / (10 * l * r))
            assert f_theta_osc(simplified, r, 0.0) == pytest.approx(lim, rel=1e-12)
            assert f_theta_osc(simplified, r, math.pi) == pytest.approx(lim, rel=1e-12)

    def test_osc_continuity_at_singularity(self, simplified):
        for r in (0.5, 1.5, 2.8):
            lim = f_theta_osc(simplified, r, 0.0)
            assert abs(f_theta_osc(simplified, r, 1e-6) - lim) < 1e-5

    def test_osc_positive_on_grid(self, simplified):
        for r in np.linspace(0.05, math.pi - 0.05, 100):
            for th in np.linspace(0.0, TWO_PI, 100, endpoint=False):
                assert f_theta_osc(simplified, r, th) > 0.0

    def test_rot_closed_form(self, simplified):
        assert f_theta_rot(simplified, 30.0, 0.0) == pytest.approx(6.0, rel=1e-14)
        floor = math.sqrt(60 * 9.81)
        small = f_theta_rot(simplified, floor + 1e-6, math.pi)
        assert 0.0 < small < 0.01

    def test_rot_positive_on_grid(self, simplified):
        floor = math.sqrt(60 * 9.81)
        for r in np.linspace(floor + 0.5, 40.0, 40):
            for th in np.linspace(0.0, TWO_PI, 60, endpoint=False):
                assert f_theta_rot(simplified, r, th) > 0.0

    def test_osc_speed_matches_flow(self, simplified, rng):
        # push the conservative reduced field through the chart numerically
        fld = reduced_field(simplified, VnhcSpec(gain=0.0))
        d = 1e-6
        for _ in range(50):
            r = rng.uniform(0.3, 2.8)
            th = rng.uniform(0.15, TWO_PI - 0.15)
            if abs(th - math.pi) < 0.15:
                continue
            q, p = from_polar_osc(simplified, r, th)
            f = fld(0.0, [q, p])
            thq = [to_polar_osc(simplified, (q + s * d, p)).theta for s in (1, -1)]
            thp = [to_polar_osc(simplified, (q, p + s * d)).theta for s in (1, -1)]
            th_dot = (angdiff(thq[0], thq[1]) * f[0]
                      + angdiff(thp[0], thp[1]) * f[1]) / (2 * d)
            assert th_dot == pytest.approx(f_theta_osc(simplified, r, th),
                                           rel=1e-5, abs=1e-6)

    def test_radius_frozen_under_conservative_flow(self, simplified, rng):
        # analytic radial partials: r is a function of the energy only
        fld = reduced_field(simplified, VnhcSpec(gain=0.0))
        pq = 30 * 9.81
        for _ in range(100):
            r = rng.uniform(0.3, 2.9)
            th = rng.uniform(0.0, TWO_PI)
            q, p = from_polar_osc(simplified, r, th)
            f = fld(0.0, [q, p])
            w = math.cos(q) - p * p / pq
            denom = math.sqrt(max(1e-300, 1.0 - w * w))
            dr_dq = math.sin(q) / denom
            dr_dp = (2 * p / pq) / denom
            assert abs(dr_dq * f[0] + dr_dp * f[1]) < 1e-8


class TestDriftIntegrands:
    def test_a_finite_near_endpoints(self, simplified):
        for r in (0.5, 1.5, 2.8):
            assert abs(integrand_a(simplified, r, 1e-6)
                       - integrand_a(simplified, r, 1e-7)) < 1e-4
            lim = 3 * math.sqrt(2 * r * math.sin(r))
            assert integrand_a(simplified, r, 1e-8) == pytest.approx(lim, rel=1e-4)

    def test_a_integral_positive_on_grid(self, simplified):
        for r in np.arange(0.1, 3.15, 0.1):
            assert osc_gain_integral(simplified, float(r)) > 0.0

    def test_b_closed_form_at_quarter(self, simplified):
        spec = VnhcSpec(amplitude=1.0, gain=0.01)
        g = 9.81
        C = g  # m = l = 1
        for r in (26.0, 30.0):
            expected = 5 * C * (18 * C) / (r * math.sqrt(r * r - 30 * g))
            assert integrand_b(simplified, spec, r, math.pi / 2) == \
                pytest.approx(expected, rel=1e-12)

    def test_S_positive_on_band(self, simplified):
        spec = VnhcSpec(amplitude=1.0, gain=0.01)
        R = critical_level(simplified)
        r1 = math.sqrt(10 * 1.1 * R)
        r2 = math.sqrt(10 * 1.6 * R)
        vals = [rotation_gain_integral(simplified, spec, r)
                for r in np.linspace(r1, r2, 9)]
        assert min(vals) > 0.0

    def test_S_refuses_near_boundary(self, simplified):
        spec = VnhcSpec(amplitude=1.0, gain=0.01)
        floor = math.sqrt(60 * 9.81)
        with pytest.raises(ChartDomainError):
            rotation_gain_integral(simplified, spec, floor + 1e-5)

    @pytest.mark.parametrize("point", [(1.0, 0.7), (1.5, 2.2), (2.4, 4.0),
                                       (0.6, 5.5), (2.0, 1.3)])
    def test_gain_derivative_oracle_osc(self, simplified, point):
        # independent route: finite difference of the constrained flow in the
        # coupling, pushed through the chart; must match the closed form L*a
        r, th = point
        d = 1e-6

        def ratio(gain):
            fld = reduced_field(simplified, VnhcSpec(amplitude=1.0, gain=gain))
            q, p = from_polar_osc(simplified, r, th)
            f = fld(0.0, [q, p])
            rq = [to_polar_osc(simplified, (q + s * d, p)).r for s in (1, -1)]
            rp = [to_polar_osc(simplified, (q, p + s * d)).r for s in (1, -1)]
            thq = [to_polar_osc(simplified, (q + s * d, p)).theta for s in (1, -1)]
            thp = [to_polar_osc(simplified, (q, p + s * d)).theta for s in (1, -1)]
            r_dot = ((rq[0] - rq[1]) * f[0] + (rp[0] - rp[1]) * f[1]) / (2 * d)
            th_dot = (angdiff(thq[0], thq[1]) * f[0]
                      + angdiff(thp[0], thp[1]) * f[1]) / (2 * d)
            return r_dot / th_dot

        h = 1e-6
        fd = (ratio(h) - ratio(-h)) / (2 * h)
        spec = VnhcSpec(amplitude=1.0, gain=h)
        L = gain_constant(simplified, spec)
        assert fd == pytest.approx(L * integrand_a(simplified, r, th), abs=1e-4)

    @pytest.mark.parametrize("point", [(27.0, 0.8), (30.0, 2.0), (28.0, 4.5)])
    def test_gain_derivative_oracle_rot(self, simplified, point):
        r, th = point
        d = 1e-6

        def ratio(gain):
            fld = reduced_field(simplified, VnhcSpec(amplitude=1.0, gain=gain))
            q, p = from_polar_rot(simplified, r, th, "+")
            f = fld(0.0, [q, p])
            # rotation chart: theta = q_u, r = sqrt(p^2 + 30 g (1 - cos q))
            pq = 30 * 9.81
            rr = math.sqrt(p * p + pq * (1 - math.cos(q)))
            r_dot = (pq * math.sin(q) * f[0] / (2 * rr)) + p * f[1] / rr
            return r_dot / f[0]

        h = 1e-6
        fd = (ratio(h) - ratio(-h)) / (2 * h)
        spec = VnhcSpec(amplitude=1.0, gain=h)
        assert fd == pytest.approx(integrand_b(simplified, spec, r, th),
                                   rel=2e-4, abs=1e-4)


class TestReturnMaps:
    def test_identity_at_zero_gain(self, simplified):
        spec = VnhcSpec(amplitude=1.0, gain=0.0)
        assert poincare_first_order(simplified, spec, 1.0, "osc") == 1.0
        r = numeric_return_map(simplified, spec, 1.0, "osc")
        assert r == pytest.approx(1.0, abs=1e-8)

    def test_sign_flip_antisymmetry(self, simplified):
        up = poincare_first_order(simplified, VnhcSpec(gain=1e-3), 1.0, "osc") - 1.0
        dn = poincare_first_order(simplified, VnhcSpec(gain=-1e-3), 1.0, "osc") - 1.0
        assert up == pytest.approx(-dn, rel=1e-12)

    def test_second_order_remainder_osc(self, simplified):
        # halving the coupling shrinks the first-order residual ~4x
        resid = {}
        for gain in (2e-3, 1e-3):
            spec = VnhcSpec(amplitude=1.0, gain=gain)
            pred = poincare_first_order(simplified, spec, 1.0, "osc")
            num = numeric_return_map(simplified, spec, 1.0, "osc")
            resid[gain] = num - pred
        ratio = resid[2e-3] / resid[1e-3]
        assert 3.5 < ratio < 4.5

    def test_numeric_map_monotone_gain_band(self, simplified):
        # P(r) > r across the tested band for a small positive coupling
        spec = VnhcSpec(amplitude=1.0, gain=1e-2)
        gammas = []
        for r in np.linspace(0.6, 2.4, 5):
            shift = numeric_return_map(simplified, spec, float(r), "osc") - r
            gammas.append(shift)
        assert min(gammas) > 0.0

    def test_rotation_first_order_accuracy(self, simplified):
        spec = VnhcSpec(amplitude=1.0, gain=1e-3)
        r0 = 28.0
        pred = poincare_first_order(simplified, spec, r0, "rot")
        num = numeric_return_map(simplified, spec, r0, "rot")
        assert num - r0 == pytest.approx(pred - r0, rel=2e-3)

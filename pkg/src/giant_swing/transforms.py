"""Polar action-angle-like charts and the first-order return-map theory.

Two charts cover the phase plane of the leg-extended pendulum (point-mass
model): an oscillation chart on the rocking region (radial coordinate in
]0, pi[, measured in radians) and a pair of rotation charts on the two
revolution half-planes (radial coordinate in momentum units).  Level sets of
the rigid-pendulum energy map to circles of constant radius in both charts.

With the constraint active at small coupling ``gain``, the radius drifts by

    P(r) - r = gain * (gain-constant * integral of a(r, th))     (rocking)
    P(r) - r = gain * S(r)                                       (revolving)

per angular revolution, up to an O(gain^2) remainder.  The integrands ``a``
and ``b`` have removable endpoint singularities that the quadratures avoid
with tiny endpoint offsets.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .constraint import VnhcSpec
from .integrator import EventSpec, IntegratorConfig, integrate
from .kernels import reduced_field
from .models import SimplifiedParams, _as_qp

__all__ = [
    "PolarState",
    "ChartDomainError",
    "QuadratureError",
    "to_polar_osc",
    "from_polar_osc",
    "to_polar_rot",
    "from_polar_rot",
    "f_theta_osc",
    "f_theta_rot",
    "integrand_a",
    "integrand_b",
    "gain_constant",
    "osc_gain_integral",
    "rotation_gain_integral",
    "poincare_first_order",
    "numeric_return_map",
]

ENDPOINT_OFFSET = 1e-10
ROTATION_MARGIN = 1e-4


class ChartDomainError(ValueError):
    """State or radius outside the chart's domain."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach its tolerance."""

    def __init__(self, message: str, estimate: float):
        super().__init__(f"{message} (achieved estimate {estimate!r})")
        self.estimate = estimate


@dataclass(frozen=True)
class PolarState:
    """Point (r, theta) in one of the charts ('osc', 'rot+', 'rot-')."""

    r: float
    theta: float
    chart: str

    def __post_init__(self):
        if self.chart not in ("osc", "rot+", "rot-"):
            raise ValueError("chart must be 'osc', 'rot+' or 'rot-'")


def _require_simplified(params):
    if not isinstance(params, SimplifiedParams):
        raise TypeError("polar charts are defined for the point-mass model only")


def _p2(params: SimplifiedParams) -> float:
    """Momentum scale squared: 30 m^2 g l^3 (so E = R maps to circles)."""
    return 30.0 * params.m ** 2 * params.g * params.l ** 3


def _sign(x: float) -> float:
    # sign(0) = 0: the affected factor vanishes on the p_u = 0 axis anyway
    return math.copysign(1.0, x) if x != 0.0 else 0.0


def _cos_gap(r: float, theta: float) -> float:
    """cos(r cos theta) - cos(r), evaluated cancellation-free.

    Product form 2 sin(r cos^2(th/2)) sin(r sin^2(th/2)) stays accurate near
    the removable singularities at theta in {0, pi}.
    """
    ch = math.cos(0.5 * theta)
    sh = math.sin(0.5 * theta)
    return 2.0 * math.sin(r * ch * ch) * math.sin(r * sh * sh)


# ---------------------------------------------------------------------------
# oscillation chart
# ---------------------------------------------------------------------------

def to_polar_osc(params, s) -> PolarState:
    """Map a rocking-region state (q_u, p_u) to (r, theta)."""
    _require_simplified(params)
    q_u, p_u = _as_qp(s)
    w = math.cos(q_u) - p_u * p_u / _p2(params)
    if w <= -1.0 or (q_u == 0.0 and p_u == 0.0):
        raise ChartDomainError("not in oscillation chart")
    r = math.acos(w)
    arg = 1.0 - q_u * q_u / (r * r)
    theta = math.atan2(-_sign(p_u) * math.sqrt(max(0.0, arg)), q_u / r)
    return PolarState(r=r, theta=theta % (2.0 * math.pi), chart="osc")


def from_polar_osc(params, r: float, theta: float) -> tuple[float, float]:
    """Inverse oscillation chart: (r, theta) -> (q_u, p_u)."""
    _require_simplified(params)
    if not 0.0 < r < math.pi:
        raise ChartDomainError("radius outside ]0, pi[")
    q_u = r * math.cos(theta)
    gap = _cos_gap(r, theta)
    p_u = -_sign(math.sin(theta)) * math.sqrt(_p2(params) * max(0.0, gap))
    return q_u, p_u


# ---------------------------------------------------------------------------
# rotation charts
# ---------------------------------------------------------------------------

def to_polar_rot(params, s, branch: str) -> PolarState:
    """Map a revolving state to (r, theta); branch '+' needs p_u > 0."""
    _require_simplified(params)
    if branch not in ("+", "-"):
        raise ValueError("branch must be '+' or '-'")
    q_u, p_u = _as_qp(s)
    if (branch == "+") != (p_u > 0.0) or p_u == 0.0:
        raise ChartDomainError(f"state not in the p_u {branch} half-plane")
    r = math.sqrt(p_u * p_u + _p2(params) * (1.0 - math.cos(q_u)))
    if r * r <= 2.0 * _p2(params):
        raise ChartDomainError("below the rotation chart radius")
    theta = q_u if branch == "+" else -q_u
    return PolarState(r=r, theta=theta % (2.0 * math.pi), chart="rot" + branch)


def from_polar_rot(params, r: float, theta: float, branch: str) -> tuple[float, float]:
    """Inverse rotation chart: (r, theta) -> (q_u, p_u)."""
    _require_simplified(params)
    if branch not in ("+", "-"):
        raise ValueError("branch must be '+' or '-'")
    gap = r * r - _p2(params) * (1.0 - math.cos(theta))
    if gap < 0.0:
        raise ChartDomainError("radius outside the rotation chart at this angle")
    sgn = 1.0 if branch == "+" else -1.0
    return sgn * theta, sgn * math.sqrt(gap)


# ---------------------------------------------------------------------------
# unperturbed angular speeds
# ---------------------------------------------------------------------------

def f_theta_osc(params, r: float, theta: float) -> float:
    """Angular speed of the leg-extended flow in the oscillation chart.

    The closed form has removable singularities at theta in {0, pi}, where
    the limit sqrt(6 g sin(r) / (10 l r)) is returned instead.
    """
    _require_simplified(params)
    if not 0.0 < r < math.pi:
        raise ChartDomainError("radius outside ]0, pi[")
    g, l = params.g, params.l
    st = math.sin(theta)
    num = _cos_gap(r, theta)
    if st == 0.0 or num <= 0.0:
        return math.sqrt(6.0 * g * math.sin(r) / (10.0 * l * r))
    return math.sqrt(6.0 * g / (5.0 * l)) * math.sqrt(num / (r * r * st * st))


def f_theta_rot(params, r: float, theta: float) -> float:
    """Angular speed of the leg-extended flow in the rotation charts."""
    _require_simplified(params)
    gap = r * r - _p2(params) * (1.0 - math.cos(theta))
    if gap < 0.0:
        raise ChartDomainError("radius outside the rotation chart at this angle")
    return math.sqrt(gap) / (5.0 * params.m * params.l ** 2)


# ---------------------------------------------------------------------------
# first-order radial drift integrands
# ---------------------------------------------------------------------------

def integrand_a(params, r: float, theta: float) -> float:
    """Adimensional radial-drift integrand on the oscillation chart.

    a = r |sin th| (5 cos r cos(r cos th) - 8 cos(r cos th)^2 + 3)
        / (sin r sqrt(cos(r cos th) - cos r)),

    a 0/0 form at theta in {0, pi} with finite limit 3 sqrt(2 r sin r).
    """
    _require_simplified(params)
    if not 0.0 < r < math.pi:
        raise ChartDomainError("radius outside ]0, pi[")
    sr, cr = math.sin(r), math.cos(r)
    crc = math.cos(r * math.cos(theta))
    gap = _cos_gap(r, theta)
    st = abs(math.sin(theta))
    if gap <= 0.0 or st == 0.0:
        return 3.0 * math.sqrt(2.0 * r * sr)
    return r * st * (5.0 * cr * crc - 8.0 * crc * crc + 3.0) / (sr * math.sqrt(gap))


def integrand_b(params, spec: VnhcSpec, r: float, theta: float) -> float:
    """Radial-drift integrand on the rotation charts (dimension of momentum).

    b = 5 C ((C / amplitude)(18 sin^2 th + 30 cos th (1 - cos th)) - cos th r^2)
        / (|r| sqrt(r^2 - 30 m^2 g l^3 (1 - cos th))),  C = m^2 g l^3 amplitude.
    """
    _require_simplified(params)
    Cq = _p2(params) / 30.0  # m^2 g l^3
    C = Cq * spec.amplitude
    st, ct = math.sin(theta), math.cos(theta)
    gap = r * r - _p2(params) * (1.0 - ct)
    if gap <= 0.0:
        raise ChartDomainError("radius outside the rotation chart at this angle")
    num = (C / spec.amplitude) * (18.0 * st * st + 30.0 * ct * (1.0 - ct)) - ct * r * r
    return 5.0 * C * num / (abs(r) * math.sqrt(gap))


def gain_constant(params, spec: VnhcSpec) -> float:
    """Scale factor between gain and radial drift on the oscillation chart:
    amplitude * sqrt(30 m^2 g l^3) / 15."""
    _require_simplified(params)
    return spec.amplitude * math.sqrt(_p2(params)) / 15.0


def _checked_quad(fun, lo, hi, epsabs, what):
    val, err = quad(fun, lo, hi, epsabs=epsabs, epsrel=1e-10, limit=400)
    if not math.isfinite(val) or err > max(epsabs, 1e-8 * abs(val), 1e-12):
        raise QuadratureError(f"quadrature for {what} did not converge", val)
    return val


def osc_gain_integral(params, r: float) -> float:
    """Integral of a(r, .) over one angular revolution.

    Integrated on (0, pi) and (pi, 2 pi) separately with endpoint offsets
    1e-10; the integrand is bounded there (removable singularities).
    """
    _require_simplified(params)
    d = ENDPOINT_OFFSET
    fun = lambda th: integrand_a(params, r, th)
    v1 = _checked_quad(fun, d, math.pi - d, 1e-10, "osc gain integral")
    v2 = _checked_quad(fun, math.pi + d, 2.0 * math.pi - d, 1e-10, "osc gain integral")
    return v1 + v2


def rotation_gain_integral(params, spec: VnhcSpec, r: float) -> float:
    """S(r): integral of b(r, .) over one revolution (abs tolerance 1e-8)."""
    _require_simplified(params)
    floor = math.sqrt(2.0 * _p2(params))
    if r - floor < ROTATION_MARGIN:
        raise ChartDomainError(
            f"radius within {ROTATION_MARGIN} of the chart boundary {floor:.6g}")
    fun = lambda th: integrand_b(params, spec, r, th)
    return _checked_quad(fun, 0.0, 2.0 * math.pi, 1e-8, "rotation gain integral")


# ---------------------------------------------------------------------------
# return maps
# ---------------------------------------------------------------------------

def poincare_first_order(params, spec: VnhcSpec, r0: float, chart: str) -> float:
    """First-order prediction of the radius after one angular revolution."""
    _require_simplified(params)
    if chart == "osc":
        shift = gain_constant(params, spec) * osc_gain_integral(params, r0)
    elif chart in ("rot", "rot+", "rot-"):
        shift = rotation_gain_integral(params, spec, r0)
    else:
        raise ValueError("chart must be 'osc' or 'rot'")
    return r0 + spec.gain * shift


def numeric_return_map(params, spec: VnhcSpec, r0: float, chart: str,
                       rel_tol: float = 1e-12, abs_tol: float = 1e-14) -> float:
    """Radius after one angular revolution of the constrained dynamics.

    Integrates the reduced dynamics from theta = 0 and reads the radius at
    the first return of the angular coordinate, using the chart transforms.
    """
    _require_simplified(params)
    fld = reduced_field(params, spec)
    cfg = IntegratorConfig(rel_tol=rel_tol, abs_tol=abs_tol)
    if chart == "osc":
        q0, p0 = from_polar_osc(params, r0, 0.0)
        # one revolution = second p_u = 0 crossing; the first is the far
        # turning point (theta = pi, q_u < 0)
        ev = EventSpec(guard=lambda t, y: y[1], direction="any",
                       condition=lambda t, y: y[0] > 0.0, terminal=True,
                       name="return")
        traj, hits = integrate(fld, [q0, p0], cfg, events=[ev], duration=60.0)
        if not hits:
            raise RuntimeError("return map: no section return within horizon")
        return to_polar_osc(params, hits[0].state).r
    if chart in ("rot", "rot+", "rot-"):
        branch = "-" if chart == "rot-" else "+"
        q0, p0 = from_polar_rot(params, r0, 0.0, branch)
        sgn = 1.0 if branch == "+" else -1.0
        ev = EventSpec(guard=lambda t, y: sgn * y[0] - 2.0 * math.pi,
                       direction="rising", terminal=True, name="return")
        traj, hits = integrate(fld, [q0, p0], cfg, events=[ev], duration=60.0)
        if not hits:
            raise RuntimeError("return map: no revolution within horizon")
        q1, p1 = hits[0].state
        return math.sqrt(p1 * p1 + _p2(params) * (1.0 - math.cos(q1)))
    raise ValueError("chart must be 'osc' or 'rot'")

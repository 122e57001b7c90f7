"""Field descriptors binding acrobot models to the integrator kernels.

A field object is a plain callable ``field(t, y) -> derivative`` plus the
metadata (``kernel_kind``, ``kernel_params``) that lets the integrator
dispatch to the compiled stepper.  Calling the object always evaluates the
pure-Python twin, which is also the reference the compiled code is tested
against.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _pykernel
from .constraint import VnhcSpec
from .models import DistributedParams, SimplifiedParams

__all__ = ["KernelField", "reduced_field", "full_field"]


@dataclass(frozen=True)
class KernelField:
    kernel_kind: int
    kernel_params: tuple
    dim: int

    def __call__(self, t, y):
        return _pykernel.eval_field(self.kernel_kind, self.kernel_params, t, y)


def _model_params(params) -> tuple[int, tuple]:
    if isinstance(params, SimplifiedParams):
        return _pykernel.REDUCED_SIMPLIFIED, (params.m, params.l, params.g)
    if isinstance(params, DistributedParams):
        return _pykernel.REDUCED_DISTRIBUTED, (
            params.m_u, params.m_a, params.l_u, params.l_cu, params.l_ca,
            params.J_u, params.J_a, params.g)
    raise TypeError(f"unknown model parameters: {type(params).__name__}")


def reduced_field(params, spec: VnhcSpec) -> KernelField:
    """Planar constrained dynamics (q_u, p_u) with the leg slaved to p_u."""
    kind, base = _model_params(params)
    return KernelField(kernel_kind=kind,
                       kernel_params=base + (spec.amplitude, spec.gain),
                       dim=2)


def full_field(params, spec: VnhcSpec, enforce: bool = True) -> KernelField:
    """Full dynamics (q_u, q_a, p_u, p_a); hip torque enforces the constraint.

    With ``enforce=False`` the torque is zero (free Hamiltonian flow).
    """
    kind, base = _model_params(params)
    kind += _pykernel.FULL_SIMPLIFIED - _pykernel.REDUCED_SIMPLIFIED
    return KernelField(
        kernel_kind=kind,
        kernel_params=base + (spec.amplitude, spec.gain, spec.kp, spec.kd,
                              1.0 if enforce else 0.0),
        dim=4)

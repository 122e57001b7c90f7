"""Generic machinery for simply-actuated Hamiltonian systems.

A mechanical system is described by an inertia matrix ``M(q)``, a potential
``V(q)`` and a constant input matrix ``B``, with Hamiltonian

    H(q, p) = p' M^{-1}(q) p / 2 + V(q).

This module provides the full Hamiltonian vector field, input normalization,
the canonical transform into simply-actuated coordinates (input matrix
``[0; I_k]``), and finite-difference Poisson brackets used to verify that
transforms are canonical.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

TWO_PI = 2.0 * math.pi

__all__ = [
    "MechanicalSystem",
    "FullState",
    "wrap_angle",
    "normalize_input_matrix",
    "simply_actuated_transform",
    "full_vector_field",
    "total_energy",
    "poisson_bracket",
]


def wrap_angle(x):
    """Wrap an angle (scalar or array) to the interval (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(x), TWO_PI)


def _fd_gradient(f: Callable, q: np.ndarray, step: float) -> np.ndarray:
    """Central finite differences of a scalar or matrix-valued function."""
    q = np.asarray(q, dtype=float)
    cols = []
    for i in range(q.size):
        e = np.zeros_like(q)
        e[i] = step
        cols.append((np.asarray(f(q + e)) - np.asarray(f(q - e))) / (2.0 * step))
    return np.stack(cols, axis=0)


@dataclass(frozen=True)
class FullState:
    """Full phase-space state (q, p) of an n-DOF system."""

    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", np.atleast_1d(np.asarray(self.q, dtype=float)))
        object.__setattr__(self, "p", np.atleast_1d(np.asarray(self.p, dtype=float)))
        if self.q.shape != self.p.shape:
            raise ValueError("q and p must have the same length")
        if not (np.all(np.isfinite(self.q)) and np.all(np.isfinite(self.p))):
            raise ValueError("state entries must be finite")

    @classmethod
    def from_vector(cls, y) -> "FullState":
        y = np.asarray(y, dtype=float)
        n = y.size // 2
        return cls(y[:n], y[n:])

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.q, self.p])

    def wrapped(self, periods) -> "FullState":
        """Wrap angular coordinates (period 2*pi) to (-pi, pi]."""
        q = self.q.copy()
        for i, T in enumerate(periods):
            if math.isfinite(T):
                q[i] = wrap_angle(q[i])
        return FullState(q, self.p)


@dataclass(frozen=True)
class MechanicalSystem:
    """Immutable description of a mechanical system with constant input matrix.

    ``inertia_inverse_gradient`` follows the stacked-partials convention: it
    returns an (n, n, n) array whose slice ``[i]`` is the partial derivative
    of ``M^{-1}`` with respect to ``q_i``.  Missing gradient callables are
    filled with central finite-difference fallbacks (step 1e-7).
    """

    n: int
    k: int
    inertia: Callable[[np.ndarray], np.ndarray]
    potential: Callable[[np.ndarray], float]
    input_matrix: np.ndarray
    periods: tuple = ()
    potential_gradient: Callable[[np.ndarray], np.ndarray] | None = None
    inertia_inverse: Callable[[np.ndarray], np.ndarray] | None = None
    inertia_inverse_gradient: Callable[[np.ndarray], np.ndarray] | None = None
    fd_step: float = 1e-7

    def __post_init__(self):
        B = np.atleast_2d(np.asarray(self.input_matrix, dtype=float))
        if B.shape == (1, self.n) and self.k == 1:
            B = B.T
        object.__setattr__(self, "input_matrix", B)
        if B.shape != (self.n, self.k):
            raise ValueError(f"input matrix must be {self.n}x{self.k}")
        if not 0 < self.k < self.n + 1:
            raise ValueError("need 0 < k <= n")
        if np.linalg.matrix_rank(B) < self.k:
            raise ValueError("input matrix not full rank")
        if not self.periods:
            object.__setattr__(self, "periods", (TWO_PI,) * self.n)
        if self.inertia_inverse is None:
            M = self.inertia
            object.__setattr__(self, "inertia_inverse", lambda q: np.linalg.inv(M(q)))
        if self.potential_gradient is None:
            V, h = self.potential, self.fd_step
            object.__setattr__(
                self, "potential_gradient", lambda q: _fd_gradient(V, q, h)
            )
        if self.inertia_inverse_gradient is None:
            Mi, h = self.inertia_inverse, self.fd_step
            object.__setattr__(
                self, "inertia_inverse_gradient", lambda q: _fd_gradient(Mi, q, h)
            )


def normalize_input_matrix(B) -> tuple[np.ndarray, np.ndarray]:
    """Return (T_hat, B_hat) with B_hat = B @ T_hat left semi-orthogonal.

    Uses the singular value decomposition B = U S Vh and T_hat = V diag(1/s),
    so that B_hat = U and B_hat' B_hat = I.  Signs are normalized so that the
    dominant entry of each column of B_hat is positive, which makes the
    factorization deterministic (and leaves an already-orthonormal B fixed).
    """
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if B.shape[0] < B.shape[1]:
        raise ValueError("expected a tall n x k input matrix")
    U, s, Vh = np.linalg.svd(B, full_matrices=False)
    if np.any(s < 1e-12 * s[0] if s.size else True):
        raise ValueError("input matrix not full rank")
    signs = np.sign(U[np.argmax(np.abs(U), axis=0), np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    U = U * signs
    V = Vh.T * signs
    T_hat = V @ np.diag(1.0 / s)
    return T_hat, U


def simply_actuated_transform(sys: MechanicalSystem, B_perp) -> MechanicalSystem:
    """Canonical transform (q, p) -> ((BB')^{-T} q, BB p) with BB = [B_perp; B'].

    Requires a left semi-orthogonal input matrix and a full-rank left
    annihilator ``B_perp`` of it.  The returned system has input matrix
    ``[0; I_k]`` and Hamiltonian H(BB' q~, BB^{-1} p~).
    """
    B = sys.input_matrix
    if not np.allclose(B.T @ B, np.eye(sys.k), atol=1e-10):
        raise ValueError("input matrix must be left semi-orthogonal; "
                         "normalize it first")
    B_perp = np.atleast_2d(np.asarray(B_perp, dtype=float))
    if B_perp.shape != (sys.n - sys.k, sys.n):
        raise ValueError(f"annihilator must be {sys.n - sys.k}x{sys.n}")
    if not np.allclose(B_perp @ B, 0.0, atol=1e-12):
        raise ValueError("not an annihilator")
    BB = np.vstack([B_perp, B.T])
    BB_inv = np.linalg.inv(BB)
    BB_T = BB.T  # maps new coordinates back: q = BB' q~

    inertia_inv_old = sys.inertia_inverse
    dMi_old = sys.inertia_inverse_gradient
    V_old, dV_old = sys.potential, sys.potential_gradient

    def inertia_inv(qt):
        return BB_inv.T @ inertia_inv_old(BB_T @ qt) @ BB_inv

    def inertia(qt):
        return np.linalg.inv(inertia_inv(qt))

    def potential(qt):
        return V_old(BB_T @ qt)

    def potential_grad(qt):
        return BB @ dV_old(BB_T @ qt)

    def inertia_inv_grad(qt):
        dal = dMi_old(BB_T @ qt)  # (n, n, n) in old coordinates
        # d/dq~_j = sum_m (BB')_{mj} d/dq_m, then congruence by BB^{-1}
        dnew = np.einsum("mj,mab->jab", BB_T, dal)
        return np.einsum("ca,jab,bd->jcd", BB_inv.T, dnew, BB_inv)

    return MechanicalSystem(
        n=sys.n,
        k=sys.k,
        inertia=inertia,
        potential=potential,
        input_matrix=BB @ B,
        periods=(math.inf,) * sys.n,
        potential_gradient=potential_grad,
        inertia_inverse=inertia_inv,
        inertia_inverse_gradient=inertia_inv_grad,
    )


def full_vector_field(sys: MechanicalSystem, x: FullState, tau=None) -> np.ndarray:
    """Hamiltonian vector field (q_dot, p_dot) with input forces B tau.

    p_dot_i = -p' (dM^{-1}/dq_i) p / 2 - dV/dq_i + (B tau)_i.
    """
    q, p = x.q, x.p
    Mi = sys.inertia_inverse(q)
    dMi = sys.inertia_inverse_gradient(q)
    q_dot = Mi @ p
    p_dot = -0.5 * np.einsum("iab,a,b->i", dMi, p, p) - sys.potential_gradient(q)
    if tau is not None:
        p_dot = p_dot + sys.input_matrix @ np.atleast_1d(np.asarray(tau, float))
    return np.concatenate([q_dot, p_dot])


def total_energy(sys: MechanicalSystem, x: FullState) -> float:
    """Total mechanical energy p' M^{-1}(q) p / 2 + V(q)."""
    return float(0.5 * x.p @ sys.inertia_inverse(x.q) @ x.p + sys.potential(x.q))


def poisson_bracket(f, g, x: FullState, rel_step: float = 1e-6) -> float:
    """Poisson bracket [f, g] = sum_i df/dp_i dg/dq_i - df/dq_i dg/dp_i.

    Partials are central finite differences with a relative step, so ``f``
    and ``g`` only need to be evaluable near ``x``; they take (q, p) arrays.
    """
    q, p = x.q, x.p
    n = q.size

    def partials(fun):
        dq = np.empty(n)
        dp = np.empty(n)
        for i in range(n):
            hq = rel_step * max(1.0, abs(q[i]))
            hp = rel_step * max(1.0, abs(p[i]))
            eq = np.zeros(n)
            eq[i] = hq
            ep = np.zeros(n)
            ep[i] = hp
            dq[i] = (fun(q + eq, p) - fun(q - eq, p)) / (2.0 * hq)
            dp[i] = (fun(q, p + ep) - fun(q, p - ep)) / (2.0 * hp)
        return dq, dp

    fq, fp = partials(f)
    gq, gp = partials(g)
    return float(fp @ gq - fq @ gp)

"""Pure-Python twin of the compiled integrator kernels.

Implements the same Dormand-Prince 5(4) step loop and the same closed-form
acrobot fields as ``_fastkernel``; it is selected automatically when the
extension is unavailable (or forced via GIANT_SWING_NO_EXT=1).  Keep the
arithmetic in the same order as the compiled twin so trajectories agree to
rounding.
"""
from __future__ import annotations

import math

import numpy as np

# field kinds shared with the compiled twin
REDUCED_SIMPLIFIED = 0
REDUCED_DISTRIBUTED = 1
FULL_SIMPLIFIED = 2
FULL_DISTRIBUTED = 3

STATUS_DONE = 0
STATUS_BUDGET = 1
STATUS_UNDERFLOW = 2

# Dormand-Prince 5(4), FSAL
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)

MIN_FACTOR = 0.2
MAX_FACTOR = 5.0
SAFETY = 0.9


# ---------------------------------------------------------------------------
# closed-form fields (plain floats; mirrors the .pyx twin line for line)
# ---------------------------------------------------------------------------

def _reduced_simplified(y, par, out):
    m, l, g, amp, gain = par[0], par[1], par[2], par[3], par[4]
    qu, pu = y[0], y[1]
    qa = amp * math.atan(gain * pu)
    ca = math.cos(qa)
    su = math.sin(qu)
    sua = math.sin(qu + qa)
    w = 1.0 + gain * gain * pu * pu
    out[0] = ((w * pu + m * m * g * l * l * l * amp * gain * (2.0 * su + sua) * (1.0 + ca))
              / (m * l * l * w * (3.0 + 2.0 * ca)))
    out[1] = -m * g * l * (2.0 * su + sua)


def _reduced_distributed(y, par, out):
    mu, ma, lu, lcu, lca, Ju, Ja, g, amp, gain = par[:10]
    qu, pu = y[0], y[1]
    qa = amp * math.atan(gain * pu)
    ca = math.cos(qa)
    m11 = ma * lu * lu + 2.0 * ma * lu * lca * ca + ma * lca * lca + mu * lcu * lcu + Ju + Ja
    m12 = ma * lca * lca + ma * lu * lca * ca + Ja
    m22 = ma * lca * lca + Ja
    det = m11 * m22 - m12 * m12
    dV = g * (ma * lca * math.sin(qu + qa) + (ma * lu + mu * lcu) * math.sin(qu))
    fp = amp * gain / (1.0 + gain * gain * pu * pu)
    pa = (m12 * pu - det * fp * dV) / m11
    out[0] = (m22 * pu - m12 * pa) / det
    out[1] = -dV


def _full_simplified_free(y, par, out):
    m, l, g = par[0], par[1], par[2]
    qu, qa, pu, pa = y[0], y[1], y[2], y[3]
    ml2 = m * l * l
    mgl = m * g * l
    ca, sa = math.cos(qa), math.sin(qa)
    su, sua = math.sin(qu), math.sin(qu + qa)
    det = ml2 * (2.0 - ca * ca)
    i11 = 1.0 / det
    i12 = -(1.0 + ca) / det
    i22 = (3.0 + 2.0 * ca) / det
    out[0] = i11 * pu + i12 * pa
    out[1] = i12 * pu + i22 * pa
    # dMinv/dqa = -Minv dM/dqa Minv with dM/dqa = ml2 [[-2sa, -sa], [-sa, 0]]
    a = ml2 * (-2.0 * sa) * i11 + ml2 * (-sa) * i12   # (dM Minv) row 1
    b = ml2 * (-2.0 * sa) * i12 + ml2 * (-sa) * i22
    c = ml2 * (-sa) * i11
    d = ml2 * (-sa) * i12
    g11 = -(i11 * a + i12 * c)
    g12 = -(i11 * b + i12 * d)
    g21 = -(i12 * a + i22 * c)
    g22 = -(i12 * b + i22 * d)
    quad = pu * (g11 * pu + g12 * pa) + pa * (g21 * pu + g22 * pa)
    out[2] = -mgl * (2.0 * su + sua)
    out[3] = -0.5 * quad - mgl * sua


def _full_distributed_free(y, par, out):
    mu, ma, lu, lcu, lca, Ju, Ja, g = par[:8]
    qu, qa, pu, pa = y[0], y[1], y[2], y[3]
    ca, sa = math.cos(qa), math.sin(qa)
    su, sua = math.sin(qu), math.sin(qu + qa)
    m11 = ma * lu * lu + 2.0 * ma * lu * lca * ca + ma * lca * lca + mu * lcu * lcu + Ju + Ja
    m12 = ma * lca * lca + ma * lu * lca * ca + Ja
    m22 = ma * lca * lca + Ja
    det = m11 * m22 - m12 * m12
    i11 = m22 / det
    i12 = -m12 / det
    i22 = m11 / det
    out[0] = i11 * pu + i12 * pa
    out[1] = i12 * pu + i22 * pa
    dd = ma * lu * lca * sa
    a = -2.0 * dd * i11 - dd * i12
    b = -2.0 * dd * i12 - dd * i22
    c = -dd * i11
    d = -dd * i12
    g11 = -(i11 * a + i12 * c)
    g12 = -(i11 * b + i12 * d)
    g21 = -(i12 * a + i22 * c)
    g22 = -(i12 * b + i22 * d)
    quad = pu * (g11 * pu + g12 * pa) + pa * (g21 * pu + g22 * pa)
    kua = ma * lca
    ku = ma * lu + mu * lcu
    out[2] = -g * (kua * sua + ku * su)
    out[3] = -0.5 * quad - g * kua * sua


def _edot_simplified(y, par):
    m, l, g, amp, gain = par[0], par[1], par[2], par[3], par[4]
    qu, qa, pu, pa = y[0], y[1], y[2], y[3]
    ca = math.cos(qa)
    det = m * l * l * (2.0 - ca * ca)
    qa_dot = (-(1.0 + ca) * pu + (3.0 + 2.0 * ca) * pa) / det
    dVdqu = m * g * l * (2.0 * math.sin(qu) + math.sin(qu + qa))
    fp = amp * gain / (1.0 + gain * gain * pu * pu)
    return qa_dot + fp * dVdqu


def _edot_distributed(y, par):
    mu, ma, lu, lcu, lca, Ju, Ja, g, amp, gain = par[:10]
    qu, qa, pu, pa = y[0], y[1], y[2], y[3]
    ca = math.cos(qa)
    m11 = ma * lu * lu + 2.0 * ma * lu * lca * ca + ma * lca * lca + mu * lcu * lcu + Ju + Ja
    m12 = ma * lca * lca + ma * lu * lca * ca + Ja
    m22 = ma * lca * lca + Ja
    det = m11 * m22 - m12 * m12
    qa_dot = (-m12 * pu + m11 * pa) / det
    dVdqu = g * (ma * lca * math.sin(qu + qa) + (ma * lu + mu * lcu) * math.sin(qu))
    fp = amp * gain / (1.0 + gain * gain * pu * pu)
    return qa_dot + fp * dVdqu


def _full_closed_loop(kind, y, par, out):
    if kind == FULL_SIMPLIFIED:
        _full_simplified_free(y, par, out)
        off = 3
        edot_fn = _edot_simplified
    else:
        _full_distributed_free(y, par, out)
        off = 8
        edot_fn = _edot_distributed
    amp, gain, kp, kd, enforce = par[off], par[off + 1], par[off + 2], par[off + 3], par[off + 4]
    if enforce == 0.0:
        return
    qu, qa, pu, pa = y[0], y[1], y[2], y[3]
    e = qa - amp * math.atan(gain * pu)
    edot = edot_fn(y, par)
    d = 1e-7
    yp = [y[i] + d * out[i] for i in range(4)]
    ym = [y[i] - d * out[i] for i in range(4)]
    drift = (edot_fn(yp, par) - edot_fn(ym, par)) / (2.0 * d)
    ca = math.cos(qa)
    if kind == FULL_SIMPLIFIED:
        m, l = par[0], par[1]
        H = (3.0 + 2.0 * ca) / (m * l * l * (2.0 - ca * ca))
    else:
        mu, ma, lu, lcu, lca, Ju, Ja = par[:7]
        m11 = ma * lu * lu + 2.0 * ma * lu * lca * ca + ma * lca * lca + mu * lcu * lcu + Ju + Ja
        m12 = ma * lca * lca + ma * lu * lca * ca + Ja
        m22 = ma * lca * lca + Ja
        H = m11 / (m11 * m22 - m12 * m12)
    tau = -(drift + kp * e + kd * edot) / H
    out[3] += tau


def eval_field(kind: int, params, t: float, y) -> list:
    """Evaluate a kernel field; returns the state derivative as a list."""
    if kind in (REDUCED_SIMPLIFIED, REDUCED_DISTRIBUTED):
        out = [0.0, 0.0]
        if kind == REDUCED_SIMPLIFIED:
            _reduced_simplified(y, params, out)
        else:
            _reduced_distributed(y, params, out)
        return out
    out = [0.0, 0.0, 0.0, 0.0]
    _full_closed_loop(kind, y, params, out)
    return out


# ---------------------------------------------------------------------------
# Dormand-Prince 5(4) chunk stepper
# ---------------------------------------------------------------------------

def _error_norm(err, y0, y1, rtol, atol):
    acc = 0.0
    n = len(err)
    for i in range(n):
        sc = atol + rtol * max(abs(y0[i]), abs(y1[i]))
        r = err[i] / sc
        acc += r * r
    return math.sqrt(acc / n)


def initial_step(fun, t0, y0, f0, t_end, rtol, atol, max_step):
    """Hairer-style starting step size estimate."""
    n = len(y0)
    scale = [atol + rtol * abs(y0[i]) for i in range(n)]
    d0 = math.sqrt(sum((y0[i] / scale[i]) ** 2 for i in range(n)) / n)
    d1 = math.sqrt(sum((f0[i] / scale[i]) ** 2 for i in range(n)) / n)
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h0 = min(h0, abs(t_end - t0))
    y1 = [y0[i] + h0 * f0[i] for i in range(n)]
    f1 = fun(t0 + h0, y1)
    d2 = math.sqrt(sum(((f1[i] - f0[i]) / scale[i]) ** 2 for i in range(n)) / n) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100.0 * h0, h1, max_step, abs(t_end - t0))


def run_chunk(fun, t, y, f, h, t_end, rtol, atol, max_step, budget):
    """Advance up to ``budget`` accepted steps toward ``t_end``.

    Returns (ts, ys, fs, h_next, status) where the node arrays include the
    starting point.  ``fun(t, y) -> sequence`` is the field; ``f`` must be
    its value at (t, y) (FSAL chaining across chunks).
    """
    eps = 2.220446049250313e-16
    n = len(y)
    y = list(y)
    f = list(f)
    ts = [t]
    ys = [list(y)]
    fs = [list(f)]
    k = [None] * 7
    status = STATUS_BUDGET
    steps = 0
    while True:
        if t_end - t <= 16.0 * eps * max(abs(t_end), 1.0):
            status = STATUS_DONE
            break
        if steps >= budget:
            status = STATUS_BUDGET
            break
        h = min(h, max_step, t_end - t)
        if h <= 16.0 * eps * max(abs(t), 1.0):
            status = STATUS_UNDERFLOW
            break
        k[0] = f
        for s in range(1, 6):
            a = _A[s]
            yn = list(y)
            for j in range(s):
                aj = a[j]
                if aj != 0.0:
                    kj = k[j]
                    for i in range(n):
                        yn[i] += h * aj * kj[i]
            k[s] = list(fun(t + _C[s] * h, yn))
        # 5th-order solution; its derivative is the 7th (FSAL) stage
        y1 = list(y)
        a = _A[6]
        for j in range(6):
            aj = a[j]
            if aj != 0.0:
                kj = k[j]
                for i in range(n):
                    y1[i] += h * aj * kj[i]
        k[6] = list(fun(t + h, y1))
        err = [0.0] * n
        for j in range(7):
            ej = _E[j]
            if ej != 0.0:
                kj = k[j]
                for i in range(n):
                    err[i] += h * ej * kj[i]
        enorm = _error_norm(err, y, y1, rtol, atol)
        if enorm <= 1.0:
            t = t + h
            y = y1
            f = k[6]
            ts.append(t)
            ys.append(list(y))
            fs.append(list(f))
            steps += 1
            factor = MAX_FACTOR if enorm == 0.0 else min(MAX_FACTOR, SAFETY * enorm ** -0.2)
            h = h * factor
        else:
            h = h * max(MIN_FACTOR, SAFETY * enorm ** -0.2)
    return (np.asarray(ts), np.asarray(ys), np.asarray(fs), h, status)

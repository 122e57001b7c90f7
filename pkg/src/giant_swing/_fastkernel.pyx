# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twin of ``_pykernel``: closed-form acrobot fields plus the
Dormand-Prince 5(4) chunk stepper.  Field formulas and step-control logic
mirror the pure-Python module line for line; keep the two in sync.

The step loop runs without the GIL, so Monte-Carlo campaigns can use plain
threads.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport atan, cos, fabs, fmax, fmin, sin, sqrt

cnp.import_array()

DEF MAXDIM = 4

cdef int REDUCED_SIMPLIFIED = 0
cdef int REDUCED_DISTRIBUTED = 1
cdef int FULL_SIMPLIFIED = 2
cdef int FULL_DISTRIBUTED = 3

cdef int STATUS_DONE = 0
cdef int STATUS_BUDGET = 1
cdef int STATUS_UNDERFLOW = 2

cdef double EPS = 2.220446049250313e-16
cdef double SAFETY = 0.9
cdef double MIN_FACTOR = 0.2
cdef double MAX_FACTOR = 5.0

# Dormand-Prince tableau (nodes, stage weights, error weights)
cdef double[7] C_N = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0]
cdef double[6][6] A_T = [
    [1.0 / 5.0, 0, 0, 0, 0, 0],
    [3.0 / 40.0, 9.0 / 40.0, 0, 0, 0, 0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0, 0, 0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0, 0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
]
cdef double[7] E_T = [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0,
                      -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0]


cdef void _reduced_simplified(double* y, double* par, double* out) nogil:
    cdef double m = par[0], l = par[1], g = par[2], amp = par[3], gain = par[4]
    cdef double qu = y[0], pu = y[1]
    cdef double qa = amp * atan(gain * pu)
    cdef double ca = cos(qa)
    cdef double su = sin(qu)
    cdef double sua = sin(qu + qa)
    cdef double w = 1.0 + gain * gain * pu * pu
    out[0] = ((w * pu + m * m * g * l * l * l * amp * gain * (2.0 * su + sua) * (1.0 + ca))
              / (m * l * l * w * (3.0 + 2.0 * ca)))
    out[1] = -m * g * l * (2.0 * su + sua)


cdef void _reduced_distributed(double* y, double* par, double* out) nogil:
    cdef double mu = par[0], ma = par[1], lu = par[2], lcu = par[3], lca = par[4]
    cdef double Ju = par[5], Ja = par[6], g = par[7], amp = par[8], gain = par[9]
    cdef double qu = y[0], pu = y[1]
    cdef double qa = amp * atan(gain * pu)
    cdef double ca = cos(qa)
    cdef double m11 = ma * lu * lu + 2.0 * ma * lu * lca * ca + ma * lca * lca + mu * lcu * lcu + Ju + Ja
    cdef double m12 = ma * lca * lca + ma * lu * lca * ca + Ja
    cdef double m22 = ma * lca * lca + Ja
    cdef double det = m11 * m22 - m12 * m12
    cdef double dV = g * (ma * lca * sin(qu + qa) + (ma * lu + mu * lcu) * sin(qu))
    cdef double fp = amp * gain / (1.0 + gain * gain * pu * pu)
    cdef double pa = (m12 * pu - det * fp * dV) / m11
    out[0] = (m22 * pu - m12 * pa) / det
    out[1] = -dV


cdef void _full_simplified_free(double* y, double* par, double* out) nogil:
    cdef double m = par[0], l = par[1], g = par[2]
    cdef double qu = y[0], qa = y[1], pu = y[2], pa = y[3]
    cdef double ml2 = m * l * l
    cdef double mgl = m * g * l
    cdef double ca = cos(qa), sa = sin(qa)
    cdef double su = sin(qu), sua = sin(qu + qa)
    cdef double det = ml2 * (2.0 - ca * ca)
    cdef double i11 = 1.0 / det
    cdef double i12 = -(1.0 + ca) / det
    cdef double i22 = (3.0 + 2.0 * ca) / det
    out[0] = i11 * pu + i12 * pa
    out[1] = i12 * pu + i22 * pa
    cdef double a = ml2 * (-2.0 * sa) * i11 + ml2 * (-sa) * i12
    cdef double b = ml2 * (-2.0 * sa) * i12 + ml2 * (-sa) * i22
    cdef double c = ml2 * (-sa) * i11
    cdef double d = ml2 * (-sa) * i12
    cdef double g11 = -(i11 * a + i12 * c)
    cdef double g12 = -(i11 * b + i12 * d)
    cdef double g21 = -(i12 * a + i22 * c)
    cdef double g22 = -(i12 * b + i22 * d)
    cdef double quad = pu * (g11 * pu + g12 * pa) + pa * (g21 * pu + g22 * pa)
    out[2] = -mgl * (2.0 * su + sua)
    out[3] = -0.5 * quad - mgl * sua


cdef void _full_distributed_free(double* y, double* par, double* out) nogil:
    cdef double mu = par[0], ma = par[1], lu = par[2], lcu = par[3], lca = par[4]
    cdef double Ju = par[5], Ja = par[6], g = par[7]
    cdef double qu = y[0], qa = y[1], pu = y[2], pa = y[3]
    cdef double ca = cos(qa), sa = sin(qa)
    cdef double su = sin(qu), sua = sin(qu + qa)
    cdef double m11 = ma * lu * lu + 2.0 * ma * lu * lca * ca + ma * lca * lca + mu * lcu * lcu + Ju + Ja
    cdef double m12 = ma * lca * lca + ma * lu * lca * ca + Ja
    cdef double m22 = ma * lca * lca + Ja
    cdef double det = m11 * m22 - m12 * m12
    cdef double i11 = m22 / det
    cdef double i12 = -m12 / det
    cdef double i22 = m11 / det
    out[0] = i11 * pu + i12 * pa
    out[1] = i12 * pu + i22 * pa
    cdef double dd = ma * lu * lca * sa
    cdef double a = -2.0 * dd * i11 - dd * i12
    cdef double b = -2.0 * dd * i12 - dd * i22
    cdef double c = -dd * i11
    cdef double d = -dd * i12
    cdef double g11 = -(i11 * a + i12 * c)
    cdef double g12 = -(i11 * b + i12 * d)
    cdef double g21 = -(i12 * a + i22 * c)
    cdef double g22 = -(i12 * b + i22 * d)
    cdef double quad = pu * (g11 * pu + g12 * pa) + pa * (g21 * pu + g22 * pa)
    cdef double kua = ma * lca
    cdef double ku = ma * lu + mu * lcu
    out[2] = -g * (kua * sua + ku * su)
    out[3] = -0.5 * quad - g * kua * sua


cdef double _edot_simplified(double* y, double* par) nogil:
    cdef double m = par[0], l = par[1], g = par[2], amp = par[3], gain = par[4]
    cdef double qu = y[0], qa = y[1], pu = y[2], pa = y[3]
    cdef double ca = cos(qa)
    cdef double det = m * l * l * (2.0 - ca * ca)
    cdef double qa_dot = (-(1.0 + ca) * pu + (3.0 + 2.0 * ca) * pa) / det
    cdef double dVdqu = m * g * l * (2.0 * sin(qu) + sin(qu + qa))
    cdef double fp = amp * gain / (1.0 + gain * gain * pu * pu)
    return qa_dot + fp * dVdqu


cdef double _edot_distributed(double* y, double* par) nogil:
    cdef double mu = par[0], ma = par[1], lu = par[2], lcu = par[3], lca = par[4]
    cdef double Ju = par[5], Ja = par[6], g = par[7], amp = par[8], gain = par[9]
    cdef double qu = y[0], qa = y[1], pu = y[2], pa = y[3]
    cdef double ca = cos(qa)
    cdef double m11 = ma * lu * lu + 2.0 * ma * lu * lca * ca + ma * lca * lca + mu * lcu * lcu + Ju + Ja
    cdef double m12 = ma * lca * lca + ma * lu * lca * ca + Ja
    cdef double m22 = ma * lca * lca + Ja
    cdef double det = m11 * m22 - m12 * m12
    cdef double qa_dot = (-m12 * pu + m11 * pa) / det
    cdef double dVdqu = g * (ma * lca * sin(qu + qa) + (ma * lu + mu * lcu) * sin(qu))
    cdef double fp = amp * gain / (1.0 + gain * gain * pu * pu)
    return qa_dot + fp * dVdqu


cdef void _full_closed_loop(int kind, double* y, double* par, double* out) nogil:
    cdef int off
    cdef double amp, gain, kp, kd, enforce
    cdef double e, edot, drift, ca, H, tau
    cdef double[4] yp
    cdef double[4] ym
    cdef double d = 1e-7
    cdef int i
    cdef double m, l, mu, ma, lu, lcu, lca, Ju, Ja
    cdef double m11, m12, m22
    if kind == FULL_SIMPLIFIED:
        _full_simplified_free(y, par, out)
        off = 3
    else:
        _full_distributed_free(y, par, out)
        off = 8
    amp = par[off]
    gain = par[off + 1]
    kp = par[off + 2]
    kd = par[off + 3]
    enforce = par[off + 4]
    if enforce == 0.0:
        return
    e = y[1] - amp * atan(gain * y[2])
    for i in range(4):
        yp[i] = y[i] + d * out[i]
        ym[i] = y[i] - d * out[i]
    if kind == FULL_SIMPLIFIED:
        edot = _edot_simplified(y, par)
        drift = (_edot_simplified(yp, par) - _edot_simplified(ym, par)) / (2.0 * d)
        m = par[0]
        l = par[1]
        ca = cos(y[1])
        H = (3.0 + 2.0 * ca) / (m * l * l * (2.0 - ca * ca))
    else:
        edot = _edot_distributed(y, par)
        drift = (_edot_distributed(yp, par) - _edot_distributed(ym, par)) / (2.0 * d)
        mu = par[0]
        ma = par[1]
        lu = par[2]
        lcu = par[3]
        lca = par[4]
        Ju = par[5]
        Ja = par[6]
        ca = cos(y[1])
        m11 = ma * lu * lu + 2.0 * ma * lu * lca * ca + ma * lca * lca + mu * lcu * lcu + Ju + Ja
        m12 = ma * lca * lca + ma * lu * lca * ca + Ja
        m22 = ma * lca * lca + Ja
        H = m11 / (m11 * m22 - m12 * m12)
    tau = -(drift + kp * e + kd * edot) / H
    out[3] += tau


cdef void _eval(int kind, double* par, double* y, double* out) nogil:
    if kind == REDUCED_SIMPLIFIED:
        _reduced_simplified(y, par, out)
    elif kind == REDUCED_DISTRIBUTED:
        _reduced_distributed(y, par, out)
    else:
        _full_closed_loop(kind, y, par, out)


cdef double _error_norm(double* err, double* y0, double* y1, double rtol,
                        double atol, int n) nogil:
    cdef double acc = 0.0
    cdef double sc, r
    cdef int i
    for i in range(n):
        sc = atol + rtol * fmax(fabs(y0[i]), fabs(y1[i]))
        r = err[i] / sc
        acc += r * r
    return sqrt(acc / n)


def run_chunk(int kind, double[::1] params, double t, double[::1] y0,
              double[::1] f0, double h, double t_end, double rtol, double atol,
              double max_step, int budget):
    """Advance up to ``budget`` accepted steps; see ``_pykernel.run_chunk``."""
    cdef int n = y0.shape[0]
    if n > MAXDIM:
        raise ValueError("state dimension exceeds kernel capacity")
    ts_arr = np.empty(budget + 1, dtype=np.float64)
    ys_arr = np.empty((budget + 1, n), dtype=np.float64)
    fs_arr = np.empty((budget + 1, n), dtype=np.float64)
    cdef double[::1] ts = ts_arr
    cdef double[:, ::1] ys = ys_arr
    cdef double[:, ::1] fs = fs_arr
    cdef double* par = &params[0]

    cdef double[4] y
    cdef double[4] f
    cdef double[4] yn
    cdef double[4] y1
    cdef double[4] err
    cdef double[7][4] k
    cdef int i, j, s, steps
    cdef int status = STATUS_BUDGET
    cdef double enorm, factor, aj, ej

    for i in range(n):
        y[i] = y0[i]
        f[i] = f0[i]
    ts[0] = t
    for i in range(n):
        ys[0, i] = y[i]
        fs[0, i] = f[i]
    steps = 0

    with nogil:
        while True:
            if t_end - t <= 16.0 * EPS * fmax(fabs(t_end), 1.0):
                status = STATUS_DONE
                break
            if steps >= budget:
                status = STATUS_BUDGET
                break
            h = fmin(h, fmin(max_step, t_end - t))
            if h <= 16.0 * EPS * fmax(fabs(t), 1.0):
                status = STATUS_UNDERFLOW
                break
            for i in range(n):
                k[0][i] = f[i]
            for s in range(1, 6):
                for i in range(n):
                    yn[i] = y[i]
                for j in range(s):
                    aj = A_T[s - 1][j]
                    if aj != 0.0:
                        for i in range(n):
                            yn[i] += h * aj * k[j][i]
                _eval(kind, par, yn, k[s])
            for i in range(n):
                y1[i] = y[i]
            for j in range(6):
                aj = A_T[5][j]
                if aj != 0.0:
                    for i in range(n):
                        y1[i] += h * aj * k[j][i]
            _eval(kind, par, y1, k[6])
            for i in range(n):
                err[i] = 0.0
            for j in range(7):
                ej = E_T[j]
                if ej != 0.0:
                    for i in range(n):
                        err[i] += h * ej * k[j][i]
            enorm = _error_norm(err, y, y1, rtol, atol, n)
            if enorm <= 1.0:
                t = t + h
                for i in range(n):
                    y[i] = y1[i]
                    f[i] = k[6][i]
                steps += 1
                ts[steps] = t
                for i in range(n):
                    ys[steps, i] = y[i]
                    fs[steps, i] = f[i]
                if enorm == 0.0:
                    factor = MAX_FACTOR
                else:
                    factor = fmin(MAX_FACTOR, SAFETY * enorm ** -0.2)
                h = h * factor
            else:
                h = h * fmax(MIN_FACTOR, SAFETY * enorm ** -0.2)

    return (ts_arr[:steps + 1], ys_arr[:steps + 1], fs_arr[:steps + 1], h, status)


def eval_field(int kind, double[::1] params, double t, double[::1] y):
    """Single field evaluation (used by tests to compare against the twin)."""
    cdef int n = y.shape[0]
    out_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double[4] yy
    cdef double[4] oo
    cdef int i
    for i in range(n):
        yy[i] = y[i]
        oo[i] = 0.0
    _eval(kind, &params[0], yy, oo)
    for i in range(n):
        out[i] = oo[i]
    return out_arr

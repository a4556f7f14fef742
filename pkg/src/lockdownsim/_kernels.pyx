# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled well-being kernel. Mirrors ``_kernels_py`` operation for operation."""

from libc.math cimport exp, pow, log, ceil, sqrt

import numpy as np

cdef enum:
    GL_ORDER = 32

BACKEND = "cython"
PANEL_RATIO = 16.0

cdef double _GL_X[GL_ORDER]
cdef double _GL_W[GL_ORDER]
_x, _w = np.polynomial.legendre.leggauss(GL_ORDER)
for _i in range(GL_ORDER):
    _GL_X[_i] = float(_x[_i])
    _GL_W[_i] = float(_w[_i])
GL_X = tuple(float(v) for v in _x)
GL_W = tuple(float(v) for v in _w)

cdef double _LOG_PANEL_RATIO = log(PANEL_RATIO)
cdef double _INV_PHI = (sqrt(5.0) - 1.0) / 2.0
cdef double _INV_PHI2 = (3.0 - sqrt(5.0)) / 2.0


ctypedef struct Problem:
    double c_o
    double S_o
    double T_C
    const double *seg_t
    const double *seg_loss
    Py_ssize_t n_seg
    const double *step_t
    const double *step_x
    Py_ssize_t n_steps
    double gamma
    double eta
    double rho
    double alpha
    double beta
    double c_min
    double s_floor
    double credit
    long n_eval


cdef inline double _disc(double a, double b, double rho) noexcept nogil:
    return (exp(-rho * a) - exp(-rho * b)) / rho


cdef double _gl_panel(double t0, double t1, double S0, double slope, double rho,
                      double alpha, double one_m_beta) noexcept nogil:
    cdef double half = 0.5 * (t1 - t0)
    cdef double mid = t0 + half
    cdef double acc = 0.0, t
    cdef int i
    for i in range(GL_ORDER):
        t = mid + half * _GL_X[i]
        acc += _GL_W[i] * exp(-rho * t) * pow(S0 + slope * (t - t0), one_m_beta)
    return acc * half * alpha / one_m_beta


cdef double _savings_piece(double a, double b, double Sa, double Sb, double rho,
                           double alpha, double beta, double s_floor) noexcept nogil:
    cdef double one_m_beta, v_floor, lo, hi, slope, total, tc, r, step, t0, t1, S0
    cdef int n, k
    if not b > a:
        return 0.0
    one_m_beta = 1.0 - beta
    v_floor = alpha / one_m_beta * pow(s_floor, one_m_beta)
    if Sa <= Sb:
        lo = Sa
        hi = Sb
    else:
        lo = Sb
        hi = Sa
    if hi <= s_floor:
        return v_floor * _disc(a, b, rho)
    slope = (Sb - Sa) / (b - a)
    total = 0.0
    if lo < s_floor:
        tc = a + (s_floor - Sa) / slope
        if Sa < Sb:
            total += v_floor * _disc(a, tc, rho)
            a = tc
            Sa = s_floor
        else:
            total += v_floor * _disc(tc, b, rho)
            b = tc
            Sb = s_floor
        lo = s_floor
    if hi - lo <= 1e-12 * hi:
        return total + alpha / one_m_beta * pow(0.5 * (Sa + Sb), one_m_beta) * _disc(a, b, rho)
    n = <int>ceil(log(hi / lo) / _LOG_PANEL_RATIO - 1e-12)
    if n < 1:
        n = 1
    r = pow(hi / lo, 1.0 / n)
    step = r if Sb > Sa else 1.0 / r
    t0 = a
    S0 = Sa
    for k in range(n):
        if k == n - 1:
            t1 = b
        else:
            t1 = a + (Sa * pow(step, k + 1) - Sa) / slope
        total += _gl_panel(t0, t1, S0, slope, rho, alpha, one_m_beta)
        S0 = Sa + slope * (t1 - a)
        t0 = t1
    return total


cdef inline double _u_floor(double c, double c_min, double eta) noexcept nogil:
    # CRRA utility, continued below c_min along its tangent so it stays concave
    if c >= c_min:
        return pow(c, 1.0 - eta) / (1.0 - eta)
    return pow(c_min, 1.0 - eta) / (1.0 - eta) + pow(c_min, -eta) * (c - c_min)


cdef void _terms(Problem *p, double S_f, double *W_out, double *Wo_out, double *TR_out) noexcept nogil:
    cdef double dissave = (p.S_o - S_f) / p.T_C
    cdef double one_m_eta = 1.0 - p.eta
    cdef double W = 0.0, D, T_R, c, a, b, offset, x_all, end, c_r, u_o, v_o, s_o
    cdef Py_ssize_t k, j
    for k in range(p.n_seg):
        c = p.c_o - p.seg_loss[k] + dissave
        W += _u_floor(c, p.c_min, p.eta) * _disc(p.seg_t[k], p.seg_t[k + 1], p.rho)

    a = 0.0
    offset = 0.0
    x_all = 0.0
    for j in range(p.n_steps):
        x_all += p.step_x[j]
    j = 0
    while j < p.n_steps and p.step_t[j] <= 0.0:
        offset += p.step_x[j]
        j += 1
    while True:
        if j < p.n_steps and p.step_t[j] < p.T_C:
            b = p.step_t[j]
        else:
            b = p.T_C
        W += _savings_piece(a, b, p.S_o + offset - a * dissave, p.S_o + offset - b * dissave,
                            p.rho, p.alpha, p.beta, p.s_floor)
        if b >= p.T_C:
            break
        offset += p.step_x[j]
        j += 1
        a = b

    D = p.S_o - S_f - p.credit * x_all
    T_R = D / (p.gamma * p.c_o) if D > 0 else 0.0
    if T_R > 0.0:
        end = p.T_C + T_R
        c_r = p.c_o - D / T_R
        W += pow(c_r, one_m_eta) / one_m_eta * _disc(p.T_C, end, p.rho)
        W += _savings_piece(p.T_C, end, S_f + x_all, p.S_o + (1.0 - p.credit) * x_all, p.rho,
                            p.alpha, p.beta, p.s_floor)
    else:
        end = p.T_C

    u_o = pow(p.c_o, one_m_eta) / one_m_eta
    s_o = p.S_o if p.S_o > p.s_floor else p.s_floor
    v_o = p.alpha / (1.0 - p.beta) * pow(s_o, 1.0 - p.beta)
    W_out[0] = W
    Wo_out[0] = (u_o + v_o) * _disc(0.0, end, p.rho)
    TR_out[0] = T_R


cdef inline double _f(Problem *p, double x) noexcept nogil:
    cdef double W, W_o, T_R
    p.n_eval += 1
    _terms(p, x, &W, &W_o, &T_R)
    return W - W_o


cdef void _gss(Problem *p, double lo, double hi, double tol, double *x_out, double *f_out) noexcept nogil:
    cdef double h = hi - lo, c, d, fc, fd, x
    if h <= tol:
        x = 0.5 * (lo + hi)
        x_out[0] = x
        f_out[0] = _f(p, x)
        return
    c = lo + _INV_PHI2 * h
    d = lo + _INV_PHI * h
    fc = _f(p, c)
    fd = _f(p, d)
    while h > tol:
        h *= _INV_PHI
        if fc > fd:
            hi = d
            d = c
            fd = fc
            c = lo + _INV_PHI2 * h
            fc = _f(p, c)
        else:
            lo = c
            c = d
            fc = fd
            d = lo + _INV_PHI * h
            fd = _f(p, d)
    if fc > fd:
        x_out[0] = c
        f_out[0] = fc
    else:
        x_out[0] = d
        f_out[0] = fd


cdef Problem _make(double c_o, double S_o, double T_C, const double[::1] seg_t,
                   const double[::1] seg_loss, const double[::1] step_t,
                   const double[::1] step_x, double gamma, double eta, double rho,
                   double alpha, double beta, double c_min, double s_floor, double credit):
    cdef Problem p
    if seg_t.shape[0] != seg_loss.shape[0] + 1 or step_t.shape[0] != step_x.shape[0]:
        raise ValueError("inconsistent segment or step arrays")
    if seg_loss.shape[0] < 1:
        raise ValueError("at least one crisis segment is required")
    p.c_o = c_o
    p.S_o = S_o
    p.T_C = T_C
    p.seg_t = &seg_t[0]
    p.seg_loss = &seg_loss[0]
    p.n_seg = seg_loss.shape[0]
    p.step_t = &step_t[0] if step_t.shape[0] else NULL
    p.step_x = &step_x[0] if step_x.shape[0] else NULL
    p.n_steps = step_t.shape[0]
    p.gamma = gamma
    p.eta = eta
    p.rho = rho
    p.alpha = alpha
    p.beta = beta
    p.c_min = c_min
    p.s_floor = s_floor
    p.credit = credit
    p.n_eval = 0
    return p


def _as_array(x):
    return np.ascontiguousarray(x, dtype=np.float64)


def wellbeing_terms(double S_f, double c_o, double S_o, double T_C, seg_t, seg_loss,
                    step_t, step_x, double gamma, double eta, double rho, double alpha,
                    double beta, double c_min, double s_floor, double credit):
    cdef double W, W_o, T_R
    cdef const double[::1] st = _as_array(seg_t)
    cdef const double[::1] sl = _as_array(seg_loss)
    cdef const double[::1] pt = _as_array(step_t)
    cdef const double[::1] px = _as_array(step_x)
    cdef Problem p = _make(c_o, S_o, T_C, st, sl, pt, px, gamma, eta, rho, alpha, beta,
                           c_min, s_floor, credit)
    _terms(&p, S_f, &W, &W_o, &T_R)
    return W, W_o, T_R


def objective_grid(xs, double c_o, double S_o, double T_C, seg_t, seg_loss, step_t, step_x,
                   double gamma, double eta, double rho, double alpha, double beta,
                   double c_min, double s_floor, double credit):
    """W - W_o at every point of ``xs``."""
    cdef const double[::1] st = _as_array(seg_t)
    cdef const double[::1] sl = _as_array(seg_loss)
    cdef const double[::1] pt = _as_array(step_t)
    cdef const double[::1] px = _as_array(step_x)
    cdef const double[::1] xv = _as_array(xs)
    cdef Problem p = _make(c_o, S_o, T_C, st, sl, pt, px, gamma, eta, rho, alpha, beta,
                           c_min, s_floor, credit)
    out = np.empty(xv.shape[0])
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(xv.shape[0]):
            ov[i] = _f(&p, xv[i])
    return out


def optimize(double c_o, double S_o, double T_C, seg_t, seg_loss, step_t, step_x,
             double gamma, double eta, double rho, double alpha, double beta, double c_min,
             double s_floor, double credit, double tol, int n_check):
    cdef const double[::1] st = _as_array(seg_t)
    cdef const double[::1] sl = _as_array(seg_loss)
    cdef const double[::1] pt = _as_array(step_t)
    cdef const double[::1] px = _as_array(step_x)
    cdef Problem p = _make(c_o, S_o, T_C, st, sl, pt, px, gamma, eta, rho, alpha, beta,
                           c_min, s_floor, credit)
    cdef double best_x, best_f, fx, x, thresh, g_best, W, W_o, T_R
    cdef int i, gi
    cdef bint fallback = False
    with nogil:
        if S_o <= 0.0:
            best_x = 0.0
            best_f = _f(&p, 0.0)
        else:
            _gss(&p, 0.0, S_o, tol, &best_x, &best_f)
            fx = _f(&p, S_o)
            if fx > best_f:
                best_x = S_o
                best_f = fx
            fx = _f(&p, 0.0)
            if fx > best_f:
                best_x = 0.0
                best_f = fx
        if n_check > 0 and S_o > 0.0:
            thresh = best_f + 1e-10 * (best_f if best_f > 0 else -best_f) + 1e-300
            g_best = best_f
            gi = -1
            for i in range(1, n_check):
                fx = _f(&p, S_o * i / n_check)
                if fx > g_best and fx > thresh:
                    g_best = fx
                    gi = i
            if gi >= 0:
                fallback = True
                _gss(&p, S_o * (gi - 1) / n_check, S_o * (gi + 1) / n_check, tol, &x, &fx)
                if fx > g_best:
                    best_x = x
                    best_f = fx
                else:
                    best_x = S_o * gi / n_check
                    best_f = g_best
        _terms(&p, best_x, &W, &W_o, &T_R)
    return best_x, W, W_o, T_R, p.n_eval, bool(fallback)

"""Pure-Python well-being kernel (fallback for the compiled ``_kernels``).

Both modules expose the same functions with the same positional signature::

    wellbeing_terms(S_f, c_o, S_o, T_C, seg_t, seg_loss, step_t, step_x,
                    gamma, eta, rho, alpha, beta, c_min, s_floor, credit)
        -> (W, W_o, T_R)
    optimize(c_o, S_o, T_C, seg_t, seg_loss, step_t, step_x,
             gamma, eta, rho, alpha, beta, c_min, s_floor, credit, tol, n_check)
        -> (S_f, W, W_o, T_R, n_eval, fallback)

``seg_t`` holds the crisis breakpoints (0 ... T_C), ``seg_loss`` the net
income loss on each crisis segment, ``step_t``/``step_x`` the sorted times
and amounts of lump sums paid into savings (at most T_C). ``credit`` is
the share of lump sums counted towards rebuilding the initial stock: with
0 recovery runs from S_f + x to S_o + x, with 1 from S_f + x to S_o.
"""

from __future__ import annotations

import math

import numpy as np

GL_ORDER = 32
# max ratio between savings levels at the two ends of one quadrature panel
PANEL_RATIO = 16.0
GL_X, GL_W = (tuple(float(v) for v in a) for a in np.polynomial.legendre.leggauss(GL_ORDER))
_LOG_PANEL_RATIO = math.log(PANEL_RATIO)
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0

BACKEND = "python"


def _disc(a, b, rho):
    # integral of exp(-rho t) over [a, b]
    return (math.exp(-rho * a) - math.exp(-rho * b)) / rho


def _u_floor(c, c_min, eta):
    # CRRA utility, continued below c_min along its tangent so it stays concave
    if c >= c_min:
        return c ** (1.0 - eta) / (1.0 - eta)
    return c_min ** (1.0 - eta) / (1.0 - eta) + c_min ** -eta * (c - c_min)


def _gl_panel(t0, t1, S0, slope, rho, alpha, one_m_beta):
    # integral over [t0, t1] of exp(-rho t) * alpha/(1-beta) * (S0 + slope (t - t0))^(1-beta)
    half = 0.5 * (t1 - t0)
    mid = t0 + half
    acc = 0.0
    for x, w in zip(GL_X, GL_W):
        t = mid + half * x
        acc += w * math.exp(-rho * t) * (S0 + slope * (t - t0)) ** one_m_beta
    return acc * half * alpha / one_m_beta


def _savings_piece(a, b, Sa, Sb, rho, alpha, beta, s_floor):
    """Discounted savings utility over [a, b] with S linear from Sa to Sb, floored."""
    if not b > a:
        return 0.0
    one_m_beta = 1.0 - beta
    v_floor = alpha / one_m_beta * s_floor ** one_m_beta
    lo, hi = (Sa, Sb) if Sa <= Sb else (Sb, Sa)
    if hi <= s_floor:
        return v_floor * _disc(a, b, rho)
    slope = (Sb - Sa) / (b - a)
    total = 0.0
    if lo < s_floor:
        tc = a + (s_floor - Sa) / slope
        if Sa < Sb:
            total += v_floor * _disc(a, tc, rho)
            a, Sa = tc, s_floor
        else:
            total += v_floor * _disc(tc, b, rho)
            b, Sb = tc, s_floor
        lo = s_floor
    if hi - lo <= 1e-12 * hi:
        return total + alpha / one_m_beta * (0.5 * (Sa + Sb)) ** one_m_beta * _disc(a, b, rho)
    n = max(1, math.ceil(math.log(hi / lo) / _LOG_PANEL_RATIO - 1e-12))
    r = (hi / lo) ** (1.0 / n)
    # panel edges in S, geometric from Sa towards Sb
    step = r if Sb > Sa else 1.0 / r
    t0, S0 = a, Sa
    for k in range(n):
        if k == n - 1:
            t1 = b
        else:
            t1 = a + (Sa * step ** (k + 1) - Sa) / slope
        total += _gl_panel(t0, t1, S0, slope, rho, alpha, one_m_beta)
        S0 = Sa + slope * (t1 - a)
        t0 = t1
    return total


def _floats(*arrays):
    return tuple(tuple(float(v) for v in a) for a in arrays)


def wellbeing_terms(S_f, c_o, S_o, T_C, seg_t, seg_loss, step_t, step_x,
                    gamma, eta, rho, alpha, beta, c_min, s_floor, credit):
    seg_t, seg_loss, step_t, step_x = _floats(seg_t, seg_loss, step_t, step_x)
    return _terms(float(S_f), c_o, S_o, T_C, seg_t, seg_loss, step_t, step_x,
                  gamma, eta, rho, alpha, beta, c_min, s_floor, credit)


def _terms(S_f, c_o, S_o, T_C, seg_t, seg_loss, step_t, step_x,
           gamma, eta, rho, alpha, beta, c_min, s_floor, credit):
    dissave = (S_o - S_f) / T_C
    one_m_eta = 1.0 - eta

    W = 0.0
    for k in range(len(seg_loss)):
        W += _u_floor(c_o - seg_loss[k] + dissave, c_min, eta) * _disc(seg_t[k], seg_t[k + 1], rho)

    # crisis savings, split at lump-sum arrivals
    a, offset, x_all = 0.0, 0.0, 0.0
    for j in range(len(step_t)):
        x_all += step_x[j]
    j = 0
    n_steps = len(step_t)
    while j < n_steps and step_t[j] <= 0.0:
        offset += step_x[j]
        j += 1
    while True:
        b = step_t[j] if j < n_steps and step_t[j] < T_C else T_C
        W += _savings_piece(a, b, S_o + offset - a * dissave, S_o + offset - b * dissave,
                            rho, alpha, beta, s_floor)
        if b >= T_C:
            break
        offset += step_x[j]
        j += 1
        a = b

    D = S_o - S_f - credit * x_all
    T_R = D / (gamma * c_o) if D > 0 else 0.0
    if T_R > 0.0:
        end = T_C + T_R
        c_r = c_o - D / T_R
        W += c_r ** one_m_eta / one_m_eta * _disc(T_C, end, rho)
        W += _savings_piece(T_C, end, S_f + x_all, S_o + (1.0 - credit) * x_all,
                            rho, alpha, beta, s_floor)
    else:
        end = T_C

    u_o = c_o ** one_m_eta / one_m_eta
    v_o = alpha / (1.0 - beta) * max(S_o, s_floor) ** (1.0 - beta)
    W_o = (u_o + v_o) * _disc(0.0, end, rho)
    return W, W_o, T_R


def objective_grid(xs, c_o, S_o, T_C, seg_t, seg_loss, step_t, step_x,
                   gamma, eta, rho, alpha, beta, c_min, s_floor, credit):
    """W - W_o at every point of ``xs``."""
    args = (c_o, S_o, T_C, *_floats(seg_t, seg_loss, step_t, step_x),
            gamma, eta, rho, alpha, beta, c_min, s_floor, credit)
    out = np.empty(len(xs))
    for i, x in enumerate(xs):
        W, W_o, _ = _terms(float(x), *args)
        out[i] = W - W_o
    return out


def optimize(c_o, S_o, T_C, seg_t, seg_loss, step_t, step_x,
             gamma, eta, rho, alpha, beta, c_min, s_floor, credit, tol, n_check):
    """Maximize W - W_o over S_f in [0, S_o] by golden-section search.

    Both bounds are also evaluated so corner optima are returned exactly.
    With ``n_check`` > 0 the result is compared against an evenly spaced
    grid; if a grid point is better (the objective was not unimodal) the
    search is repeated inside the bracket around that point and
    ``fallback`` is set.
    """
    args = (c_o, S_o, T_C, *_floats(seg_t, seg_loss, step_t, step_x),
            gamma, eta, rho, alpha, beta, c_min, s_floor, credit)
    n_eval = 0

    def f(x):
        nonlocal n_eval
        n_eval += 1
        W, W_o, _ = _terms(x, *args)
        return W - W_o

    def gss(lo, hi):
        h = hi - lo
        if h <= tol:
            x = 0.5 * (lo + hi)
            return x, f(x)
        c = lo + _INV_PHI2 * h
        d = lo + _INV_PHI * h
        fc, fd = f(c), f(d)
        while h > tol:
            h *= _INV_PHI
            if fc > fd:
                hi, d, fd = d, c, fc
                c = lo + _INV_PHI2 * h
                fc = f(c)
            else:
                lo, c, fc = c, d, fd
                d = lo + _INV_PHI * h
                fd = f(d)
        return (c, fc) if fc > fd else (d, fd)

    if S_o <= 0.0:
        best_x, best_f = 0.0, f(0.0)
    else:
        best_x, best_f = gss(0.0, S_o)
        for x in (S_o, 0.0):
            fx = f(x)
            if fx > best_f:
                best_x, best_f = x, fx

    fallback = False
    if n_check > 0 and S_o > 0.0:
        thresh = best_f + 1e-10 * abs(best_f) + 1e-300
        g_best, gi = best_f, -1
        for i in range(1, n_check):
            fx = f(S_o * i / n_check)
            if fx > g_best and fx > thresh:
                g_best, gi = fx, i
        if gi >= 0:
            fallback = True
            x, fx = gss(S_o * (gi - 1) / n_check, S_o * (gi + 1) / n_check)
            if fx > g_best:
                best_x, best_f = x, fx
            else:
                best_x, best_f = S_o * gi / n_check, g_best

    W, W_o, T_R = _terms(best_x, *args)
    return best_x, W, W_o, T_R, n_eval, fallback

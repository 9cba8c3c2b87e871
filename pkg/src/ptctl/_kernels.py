"""Compiled inner loops.

Stock control laws and disturbances are encoded as an integer kind plus a flat
float parameter vector so that a whole closed-loop run compiles to one numba
function. User-supplied callables never reach this module; the simulator runs
them through its pure-Python loop instead.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

# control laws: v(z) for auxiliary controllers, w(x) for terminal controllers
LAW_LINEAR = 0      # gains g:           -g . z
LAW_POLY = 1        # a, b, p, q, k, zeta
LAW_SOSM = 2        # a1, b1, a2, b2, p, q, k, Tf1, Tf2, zeta, gamma1, gamma2
LAW_BOUNDED_EXP = 3  # c
LAW_SIGN = 10       # magnitude:         -m * sign(z1)
LAW_ZERO = 11
LAW_USER = -1

DIST_ZERO = 0
DIST_SIN = 1        # amplitude, angular frequency
DIST_CONST = 2      # value
DIST_PULSE = 3      # t_d, width, height

STATUS_OK = 0
STATUS_NONFINITE = 1
STATUS_DIST_BOUND = 2


@njit(cache=True)
def sgn(s, eps):
    """sign with sign(0) = 0, or the saturation s/eps clipped to [-1, 1]."""
    if eps > 0.0:
        r = s / eps
        if r > 1.0:
            return 1.0
        if r < -1.0:
            return -1.0
        return r
    if s > 0.0:
        return 1.0
    if s < 0.0:
        return -1.0
    return 0.0


@njit(cache=True)
def spow(s, r):
    """Signed power |s|^r sign(s), zero at zero."""
    if s > 0.0:
        return s ** r
    if s < 0.0:
        return -((-s) ** r)
    return 0.0


@njit(cache=True)
def sosm_sigma(params, x1, x2):
    g1s = params[10] * params[10] / (params[7] * params[7])
    inner = x2 * abs(x2) + 2.0 * g1s * (params[0] * x1 + params[1] * x1 * x1 * x1)
    return x2 + spow(inner, 0.5)


@njit(cache=True)
def law_eval(kind, params, z, eps):
    if kind == LAW_LINEAR:
        acc = 0.0
        for i in range(z.shape[0]):
            acc -= params[i] * z[i]
        return acc
    if kind == LAW_POLY:
        s = z[0]
        m = abs(s)
        mag = (params[0] * m ** params[2] + params[1] * m ** params[3]) ** params[4]
        return -(mag + params[5]) * sgn(s, eps)
    if kind == LAW_SOSM:
        x1 = z[0]
        sigma = sosm_sigma(params, x1, z[1])
        m = abs(sigma)
        g1s = params[10] * params[10] / (params[7] * params[7])
        slide = params[11] / params[8] * (params[2] * m ** params[4] + params[3] * m ** params[5]) ** params[6]
        reach = 0.5 * g1s * (params[0] + 3.0 * params[1] * x1 * x1)
        return -(slide + reach + params[9]) * sgn(sigma, eps)
    if kind == LAW_BOUNDED_EXP:
        s = z[0]
        return -params[0] * (-math.expm1(-abs(s))) * sgn(s, eps)
    if kind == LAW_SIGN:
        return -params[0] * sgn(z[0], eps)
    return 0.0


@njit(cache=True)
def dist_eval(kind, params, t):
    if kind == DIST_SIN:
        return params[0] * math.sin(params[1] * t)
    if kind == DIST_CONST:
        return params[0]
    if kind == DIST_PULSE:
        if params[0] <= t < params[0] + params[1]:
            return params[2]
        return 0.0
    return 0.0


@njit(cache=True)
def kappa_at(t, T_c, alpha, eta, T_f):
    if alpha == 0.0:
        return T_f / T_c
    return eta / (alpha * (T_c - eta * t))


@njit(cache=True)
def phi_control(x, t, T_c, alpha, eta, T_f, beta, rho, Q, fb, kind, params, eps):
    n = x.shape[0]
    kap = kappa_at(t, T_c, alpha, eta, T_f)
    y = np.empty(n)
    for i in range(n):
        y[i] = kap ** (rho - i) * x[i]
    z = np.zeros(n)
    corr = 0.0
    for i in range(n):
        corr += fb[i] * y[i]
        for j in range(i + 1):
            z[i] += Q[i, j] * y[j]
        z[i] /= beta
    v = law_eval(kind, params, z, eps)
    return beta * kap ** (n - rho) * (v - corr / beta), kap


@njit(cache=True)
def hybrid_control(x, t, switch_time, T_c, alpha, eta, T_f, beta, rho, Q, fb,
                   aux_kind, aux_p, term_kind, term_p, eps):
    """Returns (u, kappa); kappa is nan on the terminal branch."""
    if t < switch_time:
        return phi_control(x, t, T_c, alpha, eta, T_f, beta, rho, Q, fb, aux_kind, aux_p, eps)
    return law_eval(term_kind, term_p, x, eps), np.nan


@njit(cache=True)
def _measured(x, t, meas_kind, meas_p):
    if meas_kind == DIST_ZERO:
        return x
    xm = x.copy()
    xm[0] += dist_eval(meas_kind, meas_p, t)
    return xm


@njit(cache=True)
def _rhs(x, u, d):
    n = x.shape[0]
    dx = np.empty(n)
    for i in range(n - 1):
        dx[i] = x[i + 1]
    dx[n - 1] = u + d
    return dx


@njit(cache=True)
def _finite(x):
    for i in range(x.shape[0]):
        if not math.isfinite(x[i]):
            return False
    return True


@njit(cache=True)
def run_closed_loop(x0, h, nsteps, stride, eps, method,
                    switch_time, T_c, alpha, eta, T_f, beta, rho, Q, fb,
                    aux_kind, aux_p, term_kind, term_p,
                    dist_kind, dist_p, dist_bound,
                    meas_kind, meas_p, settle_eps, peak_from):
    n = x0.shape[0]
    nrec = nsteps // stride + 2
    times = np.empty(nrec)
    states = np.empty((nrec, n))
    controls = np.empty(nrec)
    gains = np.empty(nrec)
    energy = np.empty(nrec)
    sup_u = np.empty(nrec)

    x = x0.copy()
    E = 0.0
    umax = 0.0
    kpeak = 0.0
    u_prev = 0.0
    last_out = -1
    xpeak = 0.0
    r = 0
    status = STATUS_OK
    fail_step = -1
    tol = dist_bound * (1.0 + 1e-12)

    for k in range(nsteps + 1):
        t = k * h
        xm = _measured(x, t, meas_kind, meas_p)
        u, kap = hybrid_control(xm, t, switch_time, T_c, alpha, eta, T_f, beta, rho, Q, fb,
                                aux_kind, aux_p, term_kind, term_p, eps)
        if not math.isfinite(u) or not _finite(x):
            status = STATUS_NONFINITE
            fail_step = k
            break
        if k > 0:
            E += 0.5 * h * (u_prev * u_prev + u * u)
        u_prev = u
        if abs(u) > umax:
            umax = abs(u)
        if kap == kap and kap > kpeak:
            kpeak = kap
        xinf = 0.0
        for i in range(n):
            if abs(x[i]) > xinf:
                xinf = abs(x[i])
        if xinf > settle_eps:
            last_out = k
        if t >= peak_from and abs(x[n - 1]) > xpeak:
            xpeak = abs(x[n - 1])

        if k % stride == 0 or k == nsteps:
            times[r] = t
            for i in range(n):
                states[r, i] = x[i]
            controls[r] = u
            gains[r] = kap
            energy[r] = E
            sup_u[r] = umax
            r += 1
        if k == nsteps:
            break

        d = dist_eval(dist_kind, dist_p, t)
        if abs(d) > tol:
            status = STATUS_DIST_BOUND
            fail_step = k
            break
        if method == 0:
            x = x + h * _rhs(x, u, d)
        else:
            th = t + 0.5 * h
            dh = dist_eval(dist_kind, dist_p, th)
            d1 = dist_eval(dist_kind, dist_p, t + h)
            if abs(dh) > tol or abs(d1) > tol:
                status = STATUS_DIST_BOUND
                fail_step = k
                break
            k1 = _rhs(x, u, d)
            x2 = x + 0.5 * h * k1
            u2 = hybrid_control(_measured(x2, th, meas_kind, meas_p), th, switch_time, T_c, alpha,
                                eta, T_f, beta, rho, Q, fb, aux_kind, aux_p, term_kind, term_p, eps)[0]
            k2 = _rhs(x2, u2, dh)
            x3 = x + 0.5 * h * k2
            u3 = hybrid_control(_measured(x3, th, meas_kind, meas_p), th, switch_time, T_c, alpha,
                                eta, T_f, beta, rho, Q, fb, aux_kind, aux_p, term_kind, term_p, eps)[0]
            k3 = _rhs(x3, u3, dh)
            x4 = x + h * k3
            u4 = hybrid_control(_measured(x4, t + h, meas_kind, meas_p), t + h, switch_time, T_c,
                                alpha, eta, T_f, beta, rho, Q, fb, aux_kind, aux_p, term_kind,
                                term_p, eps)[0]
            k4 = _rhs(x4, u4, d1)
            x = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    return (status, fail_step, r, times, states, controls, gains, energy, sup_u,
            last_out, kpeak, xpeak)


@njit(cache=True)
def run_auxiliary(z0, dtau, nsteps, kind, params, eps, stride):
    """Euler run of dz/dtau = J z + b_n v(z); returns sampled states."""
    n = z0.shape[0]
    nrec = nsteps // stride + 2
    out = np.empty((nrec, n))
    taus = np.empty(nrec)
    z = z0.copy()
    r = 0
    for k in range(nsteps + 1):
        if k % stride == 0 or k == nsteps:
            taus[r] = k * dtau
            for i in range(n):
                out[r, i] = z[i]
            r += 1
        if k == nsteps:
            break
        v = law_eval(kind, params, z, eps)
        z = z + dtau * _rhs(z, v, 0.0)
    return taus[:r], out[:r]

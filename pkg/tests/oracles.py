"""Independent reference implementations used only by the tests.

Nothing here imports the package's numerical code; each oracle is written
from the defining formulas with plain Python / numpy / scipy.
"""

from __future__ import annotations

import math

import numpy as np


def gamma(x):
    return math.gamma(x)


def settling_constant(a, b, p, q, k):
    mp = (1 - k * p) / (q - p)
    mq = (k * q - 1) / (q - p)
    return math.gamma(mp) * math.gamma(mq) / (a**k * math.gamma(k) * (q - p)) * (a / b) ** mp


def eta(alpha, T_f):
    if math.isinf(T_f):
        return 1.0
    return 1.0 - math.exp(-alpha * T_f)


def tau_of_t(t, T_c, alpha, T_f):
    e = eta(alpha, T_f)
    return -math.log(1.0 - e * t / T_c) / alpha


def gain(t, T_c, alpha, T_f):
    e = eta(alpha, T_f)
    return e / (alpha * (T_c - e * t))


def gain_max(T_c, alpha, T_f):
    return (math.exp(alpha * T_f) - 1.0) / (alpha * T_c)


def q_and_row(n, rho, alpha):
    """Rows e1' M^i by explicit matrix powers of M = J - alpha D."""
    J = np.diag(np.ones(n - 1), 1)
    D = np.diag(np.arange(n) - rho)
    M = J - alpha * D
    e1 = np.zeros(n)
    e1[0] = 1.0
    Q = np.array([e1 @ np.linalg.matrix_power(M, i) for i in range(n)])
    return Q, e1 @ np.linalg.matrix_power(M, n), M


def poly_law(z, a, b, p, q, k, zeta=0.0):
    s = z[0]
    if s == 0.0:
        return 0.0
    m = abs(s)
    return -((a * m**p + b * m**q) ** k + zeta) * math.copysign(1.0, s)


def _sign(s):
    return 0.0 if s == 0.0 else math.copysign(1.0, s)


def sliding_law(z, a1, b1, a2, b2, p, q, k, T1, T2, zeta, g1, g2):
    x1, x2 = z[0], z[1]
    inner = x2 * abs(x2) + 2.0 * g1**2 / T1**2 * (a1 * x1 + b1 * x1**3)
    sigma = x2 + _sign(inner) * math.sqrt(abs(inner))
    mag = (g2 / T2 * (a2 * abs(sigma) ** p + b2 * abs(sigma) ** q) ** k
           + g1**2 / (2.0 * T1**2) * (a1 + 3.0 * b1 * x1**2) + zeta)
    return -mag * _sign(sigma)


def chain_euler(law, z0, taus, dtau_max):
    """Euler integration of dz/dtau = J z + b_n law(z), sampled at ``taus``."""
    z = [float(v) for v in z0]
    n = len(z)
    out = [list(z)]
    tau = taus[0]
    for target in taus[1:]:
        span = target - tau
        steps = max(1, int(math.ceil(span / dtau_max)))
        dt = span / steps
        for _ in range(steps):
            v = law(z)
            nz = [z[i] + dt * z[i + 1] for i in range(n - 1)]
            nz.append(z[-1] + dt * v)
            z = nz
        tau = target
        out.append(list(z))
    return np.array(out)


def linear_prescribed_solution(x0, t, T_c):
    """x(t) = x0 (1 - t/T_c) under u = -x / (T_c - t)."""
    return x0 * (1.0 - np.asarray(t) / T_c)


def trapezoid_energy(t, u):
    t = np.asarray(t, dtype=float)
    u = np.asarray(u, dtype=float)
    return float(np.sum(0.5 * (t[1:] - t[:-1]) * (u[1:] ** 2 + u[:-1] ** 2)))

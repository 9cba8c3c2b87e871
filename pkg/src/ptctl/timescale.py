"""Logarithmic time-scale transformation and the induced time-varying gain.

The auxiliary (tau) time and the plant (t) time are related by

    tau = phi(t)     = -(1/alpha) * ln(1 - eta * t / T_c)
    t   = phi_inv(tau) = (T_c / eta) * (1 - exp(-alpha * tau))
    kappa(t) = d tau / d t = eta / (alpha * (T_c - eta * t))

with eta = 1 - exp(-alpha * T_f) for a finite tau-time settling bound T_f and
eta = 1 when T_f is infinite. The alpha = 0 case is the static scaling
tau = (T_f / T_c) * t, handled as its own branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

INF = math.inf


@dataclass(frozen=True)
class TimeScale:
    """Parameters of one time-scale transformation.

    ``T_f`` may be ``math.inf`` (prescribed-time regime). For ``alpha == 0``
    the exponential formula for ``eta`` degenerates to zero; the static
    branch never uses ``eta`` and it is stored as 1.
    """

    T_c: float
    alpha: float
    T_f: float
    eta: float

    @property
    def static(self) -> bool:
        return self.alpha == 0.0

    @property
    def prescribed(self) -> bool:
        return math.isinf(self.T_f)

    @property
    def horizon(self) -> float:
        """Plant time at which tau reaches infinity (``T_c / eta``), or inf."""
        if self.static:
            return INF
        return self.T_c / self.eta

    @property
    def kappa0(self) -> float:
        """Gain at t = 0; its reciprocal is ``alpha * T_c / eta``."""
        return kappa(self, 0.0)


def make_timescale(T_c: float, alpha: float, T_f: float = INF) -> TimeScale:
    T_c = float(T_c)
    alpha = float(alpha)
    T_f = float(T_f)
    if not T_c > 0 or math.isinf(T_c):
        raise DomainError(f"T_c must be a positive finite time, got {T_c}", "T_c")
    if not alpha >= 0 or math.isinf(alpha):
        raise DomainError(f"alpha must be finite and >= 0, got {alpha}", "alpha")
    if not T_f > 0:
        raise DomainError(f"T_f must be > 0, got {T_f}", "T_f")
    if alpha == 0.0 and math.isinf(T_f):
        raise DomainError("alpha = 0 requires a finite T_f", "alpha")

    if math.isinf(T_f) or alpha == 0.0:
        eta = 1.0
    else:
        eta = -math.expm1(-alpha * T_f)
    return TimeScale(T_c=T_c, alpha=alpha, T_f=T_f, eta=eta)


def _check_t(ts: TimeScale, t: float) -> None:
    if not t >= 0:
        raise DomainError(f"t must be >= 0, got {t}", "t")
    if not ts.static and not ts.eta * t < ts.T_c:
        raise DomainError(
            f"t = {t} is at or past the gain singularity T_c/eta = {ts.horizon}", "t"
        )


def phi(ts: TimeScale, t: float) -> float:
    """Map plant time ``t`` to auxiliary time."""
    _check_t(ts, t)
    if ts.static:
        return ts.T_f / ts.T_c * t
    return -math.log1p(-ts.eta * t / ts.T_c) / ts.alpha


def phi_inv(ts: TimeScale, tau: float) -> float:
    """Map auxiliary time ``tau`` (possibly inf) back to plant time."""
    if not tau >= 0:
        raise DomainError(f"tau must be >= 0, got {tau}", "tau")
    if ts.static:
        return ts.T_c / ts.T_f * tau
    if math.isinf(tau):
        return ts.T_c / ts.eta
    return -math.expm1(-ts.alpha * tau) * ts.T_c / ts.eta


def kappa(ts: TimeScale, t: float) -> float:
    """Time-varying gain d tau / d t."""
    _check_t(ts, t)
    if ts.static:
        return ts.T_f / ts.T_c
    return ts.eta / (ts.alpha * (ts.T_c - ts.eta * t))


def kappa_max(ts: TimeScale) -> float:
    """Supremum of ``kappa`` over ``[0, T_c)``.

    Raises for an infinite ``T_f`` because the gain is then unbounded. The
    static branch returns its constant gain ``T_f / T_c``.
    """
    if ts.prescribed:
        raise DomainError("kappa is unbounded when T_f is infinite", "T_f")
    if ts.static:
        return ts.T_f / ts.T_c
    return math.expm1(ts.alpha * ts.T_f) / (ts.alpha * ts.T_c)


def settling_map(ts: TimeScale, tau_settle: float) -> float:
    """Plant-time settling time for a tau-time settling time."""
    return phi_inv(ts, tau_settle)

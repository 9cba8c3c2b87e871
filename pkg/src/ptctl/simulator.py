"""Fixed-step simulation of the closed-loop perturbed integrator chain.

    dx_i/dt = x_(i+1),   dx_n/dt = u(x, t) + d(t)

Stock controllers and disturbances run through the compiled loop in
``_kernels``; anything containing a Python callable runs through an
equivalent pure-Python loop.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import _kernels as K
from .errors import DisturbanceBoundError, DomainError, NumericalError
from .synthesis import SynthesizedController, eval_hybrid

METHODS = {"euler": 0, "rk4": 1}


@dataclass(frozen=True)
class SimConfig:
    h: float = 1e-5
    horizon: float = 1.0
    sign_layer: float = 0.0
    settle_eps: float = 1e-3
    record_stride: int = 100
    method: str = "euler"

    def __post_init__(self):
        if not (self.h > 0 and math.isfinite(self.h)):
            raise DomainError(f"h must be positive, got {self.h}", "h")
        if not (self.horizon >= self.h and math.isfinite(self.horizon)):
            raise DomainError(f"horizon must be finite and >= h, got {self.horizon}", "horizon")
        if not self.sign_layer >= 0:
            raise DomainError(f"sign_layer must be >= 0, got {self.sign_layer}", "sign_layer")
        if not self.settle_eps > 0:
            raise DomainError(f"settle_eps must be > 0, got {self.settle_eps}", "settle_eps")
        if int(self.record_stride) != self.record_stride or self.record_stride < 1:
            raise DomainError(f"record_stride must be a positive integer, got {self.record_stride}",
                              "record_stride")
        if self.method not in METHODS:
            raise DomainError(f"method must be one of {sorted(METHODS)}, got {self.method!r}",
                              "method")

    @property
    def nsteps(self) -> int:
        # the 1e-9 guard keeps horizon = N*h from losing its last step to rounding
        return int(math.floor(self.horizon / self.h + 1e-9))


@dataclass(frozen=True, eq=False)
class Disturbance:
    """Additive input disturbance with a declared bound |d(t)| <= bound."""

    kind: str  # zero, sinusoid, constant, pulse, user-bounded
    bound: float
    params: np.ndarray
    func: Optional[Callable[[float], float]] = None

    @property
    def code(self) -> Optional[int]:
        return {"zero": K.DIST_ZERO, "sinusoid": K.DIST_SIN, "constant": K.DIST_CONST,
                "pulse": K.DIST_PULSE}.get(self.kind)

    def raw(self, t: float) -> float:
        if self.func is not None:
            return float(self.func(t))
        return float(K.dist_eval(self.code, self.params, float(t)))

    def evaluate(self, t: float) -> float:
        d = self.raw(t)
        if not abs(d) <= self.bound * (1.0 + 1e-12):
            raise DisturbanceBoundError(
                f"|d({t})| = {abs(d)} exceeds the declared bound {self.bound}", step=-1)
        return d

    __call__ = evaluate


def _bound(val: float) -> float:
    if not (val >= 0 and math.isfinite(val)):
        raise DomainError(f"disturbance bound must be finite and >= 0, got {val}", "bound")
    return float(val)


def zero_disturbance() -> Disturbance:
    return Disturbance("zero", 0.0, np.zeros(0))


def sinusoid(amplitude: float, frequency: float = 1.0) -> Disturbance:
    """amplitude * sin(frequency * t); frequency in rad per unit time."""
    return Disturbance("sinusoid", _bound(abs(amplitude)),
                       np.array([float(amplitude), float(frequency)]))


def constant(value: float) -> Disturbance:
    return Disturbance("constant", _bound(abs(value)), np.array([float(value)]))


def make_pulse(t_d: float, width: float, height: float) -> Disturbance:
    """``height`` on [t_d, t_d + width), zero elsewhere."""
    if not width > 0:
        raise DomainError(f"pulse width must be > 0, got {width}", "width")
    if not t_d >= 0:
        raise DomainError(f"pulse start must be >= 0, got {t_d}", "t_d")
    return Disturbance("pulse", _bound(abs(height)),
                       np.array([float(t_d), float(width), float(height)]))


def user_bounded(func: Callable[[float], float], bound: float) -> Disturbance:
    return Disturbance("user-bounded", _bound(bound), np.zeros(0), func=func)


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    controls: np.ndarray
    gains: np.ndarray
    energy: np.ndarray
    sup_u: np.ndarray
    settle_time: Optional[float]  # from every grid step, not only recorded rows
    kappa_peak: float
    h: float
    tail_peak: float = 0.0  # max |x_n| over grid times >= peak_from

    @property
    def n(self) -> int:
        return self.states.shape[1]

    @property
    def final_energy(self) -> float:
        return float(self.energy[-1])

    @property
    def max_control(self) -> float:
        return float(self.sup_u[-1])


def _check_pulse(dist: Disturbance, h: float) -> None:
    if dist.kind == "pulse" and dist.params[1] < 2 * h:
        raise DomainError(f"pulse width {dist.params[1]} is below 2h = {2 * h}", "width")


def simulate(ctrl: SynthesizedController, x0, dist: Optional[Disturbance] = None,
             cfg: Optional[SimConfig] = None, *, measurement: Optional[Disturbance] = None,
             switch_time: Optional[float] = None, peak_from: float = 0.0,
             engine: str = "auto") -> Trajectory:
    """Integrate the closed loop from ``x0`` over ``cfg.horizon``.

    ``measurement`` perturbs the first state as seen by the controller.
    ``switch_time`` moves the hand-over to the terminal controller earlier
    than ``T_c``. ``Trajectory.tail_peak`` tracks max |x_n| from ``peak_from``
    on at every grid step.
    """
    cfg = cfg or SimConfig()
    dist = dist or zero_disturbance()
    meas = measurement or zero_disturbance()
    x0 = np.asarray(x0, dtype=float).reshape(-1).copy()
    if x0.shape != (ctrl.n,):
        raise DomainError(f"x0 must have {ctrl.n} entries, got {x0.size}", "x0")
    if not np.all(np.isfinite(x0)):
        raise DomainError("x0 must be finite", "x0")
    _check_pulse(dist, cfg.h)
    _check_pulse(meas, cfg.h)
    if dist.bound > ctrl.delta:
        warnings.warn(f"disturbance bound {dist.bound} exceeds the controller's delta {ctrl.delta}",
                      stacklevel=2)
    if switch_time is None:
        switch_time = ctrl.T_c
    if not 0 < switch_time <= ctrl.T_c:
        raise DomainError(f"switch_time must lie in (0, T_c], got {switch_time}", "switch_time")

    compiled = ctrl.compiled and dist.code is not None and meas.code is not None
    if engine == "auto":
        engine = "compiled" if compiled else "python"
    if engine == "compiled" and not compiled:
        raise DomainError("the compiled engine cannot run Python callables", "engine")
    if engine not in ("compiled", "python"):
        raise DomainError(f"unknown engine {engine!r}", "engine")

    run = _run_compiled if engine == "compiled" else _run_python
    return run(ctrl, x0, dist, meas, cfg, float(switch_time), float(peak_from))


def _raise_status(status: int, step: int, h: float) -> None:
    if status == K.STATUS_NONFINITE:
        raise NumericalError(f"non-finite state or control at step {step} (t = {step * h})", step)
    if status == K.STATUS_DIST_BOUND:
        raise DisturbanceBoundError(f"disturbance exceeded its bound at step {step}", step)


def _settle(last_out: int, nsteps: int, h: float) -> Optional[float]:
    if last_out >= nsteps:
        return None
    return (last_out + 1) * h


def _run_compiled(ctrl, x0, dist, meas, cfg, switch_time, peak_from) -> Trajectory:
    ts, b = ctrl.timescale, ctrl.basis
    nsteps = cfg.nsteps
    Tf = ts.T_f if math.isfinite(ts.T_f) else 0.0
    out = K.run_closed_loop(
        x0, cfg.h, nsteps, int(cfg.record_stride), cfg.sign_layer, METHODS[cfg.method],
        switch_time, ts.T_c, ts.alpha, ts.eta, Tf, ctrl.beta, b.rho,
        np.ascontiguousarray(b.Q), np.ascontiguousarray(b.feedback_row),
        ctrl.aux.law, ctrl.aux.params, ctrl.terminal.law, ctrl.terminal.params,
        dist.code, dist.params, dist.bound, meas.code, meas.params, cfg.settle_eps, peak_from)
    status, fail_step, r, times, states, controls, gains, energy, sup_u, last_out, kpeak, xpeak = out
    _raise_status(status, fail_step, cfg.h)
    return Trajectory(times[:r].copy(), states[:r].copy(), controls[:r].copy(), gains[:r].copy(),
                      energy[:r].copy(), sup_u[:r].copy(), _settle(last_out, nsteps, cfg.h),
                      float(kpeak), cfg.h, float(xpeak))


def _run_python(ctrl, x0, dist, meas, cfg, switch_time, peak_from) -> Trajectory:
    h, nsteps, eps = cfg.h, cfg.nsteps, cfg.sign_layer
    n = x0.size
    ts = ctrl.timescale

    def control(x, t):
        xm = x
        if meas.kind != "zero":
            xm = x.copy()
            xm[0] += meas.evaluate(t)
        if t < switch_time:
            return eval_hybrid(ctrl, xm, t, eps)
        return ctrl.terminal.eval(xm, eps)

    def gain(t):
        if t >= switch_time:
            return math.nan
        return ts.T_f / ts.T_c if ts.static else ts.eta / (ts.alpha * (ts.T_c - ts.eta * t))

    def rhs(x, u, d):
        dx = np.empty(n)
        dx[:-1] = x[1:]
        dx[-1] = u + d
        return dx

    def dist_at(t, k):
        try:
            return dist.evaluate(t)
        except DisturbanceBoundError as exc:
            raise DisturbanceBoundError(str(exc), step=k) from None

    rows_t, rows_x, rows_u, rows_k, rows_e, rows_s = [], [], [], [], [], []
    x = x0.copy()
    E = umax = kpeak = u_prev = xpeak = 0.0
    last_out = -1
    for k in range(nsteps + 1):
        t = k * h
        u = control(x, t)
        kap = gain(t)
        if not (math.isfinite(u) and np.all(np.isfinite(x))):
            _raise_status(K.STATUS_NONFINITE, k, h)
        if k > 0:
            E += 0.5 * h * (u_prev * u_prev + u * u)
        u_prev = u
        umax = max(umax, abs(u))
        if kap == kap:
            kpeak = max(kpeak, kap)
        if np.max(np.abs(x)) > cfg.settle_eps:
            last_out = k
        if t >= peak_from:
            xpeak = max(xpeak, abs(x[-1]))
        if k % cfg.record_stride == 0 or k == nsteps:
            rows_t.append(t)
            rows_x.append(x.copy())
            rows_u.append(u)
            rows_k.append(kap)
            rows_e.append(E)
            rows_s.append(umax)
        if k == nsteps:
            break
        d = dist_at(t, k)
        if cfg.method == "euler":
            x = x + h * rhs(x, u, d)
        else:
            th, t1 = t + 0.5 * h, t + h
            dh, d1 = dist_at(th, k), dist_at(t1, k)
            k1 = rhs(x, u, d)
            x2 = x + 0.5 * h * k1
            k2 = rhs(x2, control(x2, th), dh)
            x3 = x + 0.5 * h * k2
            k3 = rhs(x3, control(x3, th), dh)
            x4 = x + h * k3
            k4 = rhs(x4, control(x4, t1), d1)
            x = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    return Trajectory(np.array(rows_t), np.array(rows_x), np.array(rows_u), np.array(rows_k),
                      np.array(rows_e), np.array(rows_s), _settle(last_out, nsteps, h),
                      float(kpeak), h, float(xpeak))


def energy_at(traj: Trajectory, t: float) -> float:
    """Running energy at ``t``, interpolated between recorded rows."""
    t0, t1 = traj.times[0], traj.times[-1]
    if not t0 <= t <= t1:
        raise DomainError(f"t = {t} is outside the trajectory span [{t0}, {t1}]", "t")
    return float(np.interp(t, traj.times, traj.energy))


def detect_settling(traj: Trajectory, eps: float) -> Optional[float]:
    """Earliest recorded time after which every recorded ``||x||_inf`` stays within ``eps``."""
    if not eps > 0:
        raise DomainError(f"eps must be > 0, got {eps}", "eps")
    inside = np.max(np.abs(traj.states), axis=1) <= eps
    if not inside[-1]:
        return None
    outside = np.flatnonzero(~inside)
    if outside.size == 0:
        return float(traj.times[0])
    return float(traj.times[outside[-1] + 1])


def csv_header(n: int) -> list[str]:
    return ["t", *[f"x{i + 1}" for i in range(n)], "u", "kappa", "E"]


def _fmt(v: float) -> str:
    return format(float(v), ".15g")


def write_csv(traj: Trajectory, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(csv_header(traj.n))
        for i in range(traj.times.size):
            w.writerow([_fmt(traj.times[i]), *map(_fmt, traj.states[i]), _fmt(traj.controls[i]),
                        _fmt(traj.gains[i]), _fmt(traj.energy[i])])
    return path


def read_csv(path) -> tuple[list[str], np.ndarray]:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DomainError(f"{path} is empty", "csv")
    header, body = rows[0], rows[1:]
    try:
        data = np.array([[float(v) for v in r] for r in body], dtype=float)
    except ValueError as exc:
        raise DomainError(f"{path}: non-numeric entry ({exc})", "csv") from exc
    if data.size and data.shape[1] != len(header):
        raise DomainError(f"{path}: rows do not match the header width", "csv")
    return header, data.reshape(-1, len(header))

"""Assembly of the hybrid predefined-time controller.

On [0, T_c) the plant is driven by

    phi(x, t) = beta kappa^(n - rho) [ v(z) - row . K^-1 x / beta ],  z = Q K^-1 x / beta

and from T_c onwards by a robust terminal controller w(x; Delta).
"""

from __future__ import annotations

import configparser
import io
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import _kernels as K
from .auxcontrollers import (
    AuxController,
    PolyParams,
    bounded_exp_controller,
    linear_controller,
    poly_fixed_time,
    second_order_sliding,
)
from .errors import ConfigError, DomainError
from .gainmatrices import GainBasis, build_basis, z_from_x
from .timescale import TimeScale, kappa, make_timescale, settling_map

log = logging.getLogger(__name__)

# Parameters of the default second-order terminal controller (a1, b1, a2, b2, p, q, k).
TERMINAL_SOSM_GAINS = (4.0, 0.25, 4.0, 0.25, 0.5, 1.0, 1.5)
TERMINAL_MARGIN = 0.1


@dataclass(frozen=True, eq=False)
class TerminalController:
    """Robust controller applied once t >= T_c."""

    kind: str  # "first-order-sign", "second-order-sliding", "zero-hold", "user-supplied"
    n: int
    law: int
    params: np.ndarray
    func: Optional[Callable[[np.ndarray], float]] = None
    aux: Optional[AuxController] = None

    @property
    def compiled(self) -> bool:
        return self.law != K.LAW_USER

    def eval(self, x, sign_layer: float = 0.0) -> float:
        x = np.asarray(x, dtype=float).reshape(-1)
        if self.func is not None:
            return float(self.func(x))
        return float(K.law_eval(self.law, self.params, x, float(sign_layer)))

    __call__ = eval

    @property
    def magnitude(self) -> float:
        if self.kind == "first-order-sign":
            return float(self.params[0])
        if self.kind == "second-order-sliding":
            return float(self.params[9])
        return 0.0


def sign_terminal(magnitude: float) -> TerminalController:
    """-magnitude * sign(x1)."""
    if not magnitude >= 0:
        raise DomainError(f"magnitude must be >= 0, got {magnitude}", "magnitude")
    return TerminalController("first-order-sign", 1, K.LAW_SIGN, np.array([float(magnitude)]))


def sosm_terminal(aux: AuxController) -> TerminalController:
    if aux.kind != "sosm":
        raise DomainError("second-order terminal controller needs a sliding controller")
    return TerminalController("second-order-sliding", 2, K.LAW_SOSM, aux.params, aux=aux)


def zero_hold(n: int) -> TerminalController:
    return TerminalController("zero-hold", n, K.LAW_ZERO, np.zeros(0))


def user_terminal(func: Callable[[np.ndarray], float], n: int) -> TerminalController:
    return TerminalController("user-supplied", n, K.LAW_USER, np.zeros(0), func=func)


def default_terminal(n: int, delta: float, T_c: float) -> TerminalController:
    zeta = delta + TERMINAL_MARGIN
    if n == 1:
        return sign_terminal(zeta)
    if n == 2:
        a1, b1, a2, b2, p, q, k = TERMINAL_SOSM_GAINS
        return sosm_terminal(second_order_sliding(a1, b1, a2, b2, p, q, k, T_c, T_c, zeta))
    log.warning("no stock terminal controller for n = %d; holding u = 0 after T_c", n)
    return zero_hold(n)


@dataclass(frozen=True, eq=False)
class SynthesizedController:
    timescale: TimeScale
    basis: GainBasis
    aux: AuxController
    beta: float
    terminal: TerminalController
    delta: float

    @property
    def n(self) -> int:
        return self.basis.n

    @property
    def T_c(self) -> float:
        return self.timescale.T_c

    @property
    def compiled(self) -> bool:
        return self.aux.compiled and self.terminal.compiled


def beta_bound(ts: TimeScale, n: int, rho: float) -> float:
    """Smallest admissible beta, (alpha T_c / eta)^(n - rho) = kappa(0)^-(n - rho)."""
    expo = n - rho
    if expo == 0:
        return 1.0
    return ts.kappa0 ** (-expo)


def synthesize(aux: AuxController, T_c: float, alpha: float, rho: float,
               beta: Optional[float] = None, terminal: Optional[TerminalController] = None,
               delta: float = 0.0) -> SynthesizedController:
    """Redesign ``aux`` into a hybrid controller with convergence-time bound ``T_c``.

    The lower bound on ``beta`` only matters for disturbance attenuation, so
    it is enforced when ``delta > 0``.
    """
    if not delta >= 0:
        raise DomainError(f"delta must be >= 0, got {delta}", "delta")
    ts = make_timescale(T_c, alpha, aux.T_f)
    basis = build_basis(aux.n, rho, alpha)
    if not aux.admissible_for(alpha, rho):
        raise DomainError(
            f"auxiliary controller '{aux.kind}' is not admissible for alpha={alpha}, rho={rho}",
            "aux")
    bound = beta_bound(ts, basis.n, basis.rho)
    if beta is None:
        beta = max(1.0, bound)
    beta = float(beta)
    if not (beta > 0 and math.isfinite(beta)):
        raise DomainError(f"beta must be positive and finite, got {beta}", "beta")
    if delta > 0 and beta < bound * (1.0 - 1e-12):
        raise DomainError(f"beta = {beta} is below the required bound {bound}", "beta")
    if terminal is None:
        terminal = default_terminal(basis.n, delta, ts.T_c)
    elif terminal.n != basis.n:
        raise DomainError(f"terminal controller has order {terminal.n}, expected {basis.n}",
                          "terminal")
    return SynthesizedController(ts, basis, aux, beta, terminal, float(delta))


def _state(ctrl: SynthesizedController, x) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape != (ctrl.n,):
        raise DomainError(f"x must have {ctrl.n} entries, got {x.size}", "x")
    return x


def eval_phi(ctrl: SynthesizedController, x, t: float, sign_layer: float = 0.0) -> float:
    """Time-varying branch of the hybrid law."""
    x = _state(ctrl, x)
    b = ctrl.basis
    kap = kappa(ctrl.timescale, t)
    y = kap ** b.exponents * x
    z = b.Q @ y / ctrl.beta
    v = ctrl.aux.eval(z, sign_layer)
    return float(ctrl.beta * kap ** (b.n - b.rho) * (v - b.feedback_row @ y / ctrl.beta))


def eval_hybrid(ctrl: SynthesizedController, x, t: float, sign_layer: float = 0.0) -> float:
    if not t >= 0:
        raise DomainError(f"t must be >= 0, got {t}", "t")
    if t < ctrl.T_c:
        return eval_phi(ctrl, x, t, sign_layer)
    return ctrl.terminal.eval(_state(ctrl, x), sign_layer)


def predicted_settling_bound(ctrl: SynthesizedController, x0) -> float:
    """Settling time predicted from the auxiliary controller's settling function."""
    x0 = _state(ctrl, x0)
    if not np.all(np.isfinite(x0)):
        raise DomainError("x0 must be finite", "x0")
    if not np.any(x0):
        return 0.0
    ts = ctrl.timescale
    if ctrl.aux.settling_fn is None:
        return ts.T_c
    z0 = z_from_x(ctrl.basis, ctrl.beta, ts.kappa0, x0)
    tau = ctrl.aux.settling_fn(z0)
    if math.isinf(tau):
        return ts.T_c if ts.prescribed else ts.T_c / ts.eta
    return min(settling_map(ts, tau), ts.T_c)


# --- key=value configuration ------------------------------------------------

_AUX_KEYS = {
    "poly": ("a", "b", "p", "q", "k", "zeta"),
    "sosm": ("a1", "b1", "a2", "b2", "p", "q", "k", "T_f1", "T_f2", "zeta"),
    "linear": ("gains",),
    "bounded_exp": ("c",),
}


def aux_to_section(aux: AuxController) -> dict[str, str]:
    if aux.kind not in _AUX_KEYS:
        raise ConfigError(f"auxiliary controller '{aux.kind}' cannot be serialized")
    if aux.kind == "linear":
        return {"kind": "linear", "gains": ",".join(repr(float(g)) for g in aux.params)}
    keys = _AUX_KEYS[aux.kind]
    return {"kind": aux.kind, **{k: repr(float(v)) for k, v in zip(keys, aux.params)}}


def aux_from_section(sec) -> AuxController:
    kind = sec.get("kind")
    if kind not in _AUX_KEYS:
        raise ConfigError(f"unknown aux kind {kind!r}; expected one of {sorted(_AUX_KEYS)}")
    extra = set(sec) - set(_AUX_KEYS[kind]) - {"kind"}
    if extra:
        raise ConfigError(f"unknown keys in [aux]: {sorted(extra)}")
    try:
        if kind == "linear":
            return linear_controller([float(g) for g in sec["gains"].split(",")])
        vals = {k: float(sec[k]) for k in _AUX_KEYS[kind] if k in sec}
        if kind == "poly":
            return poly_fixed_time(PolyParams(**vals))
        if kind == "sosm":
            return second_order_sliding(**vals)
        return bounded_exp_controller(vals["c"])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DomainError):
            raise ConfigError(str(exc)) from exc
        raise ConfigError(f"bad [aux] section: {exc}") from exc


def to_config(ctrl: SynthesizedController) -> str:
    cp = configparser.ConfigParser()
    cp.optionxform = str
    ts, b = ctrl.timescale, ctrl.basis
    cp["timescale"] = {"T_c": repr(ts.T_c), "alpha": repr(ts.alpha)}
    cp["basis"] = {"rho": repr(b.rho), "beta": repr(ctrl.beta)}
    cp["aux"] = aux_to_section(ctrl.aux)
    term = ctrl.terminal
    tsec = {"kind": term.kind, "delta": repr(ctrl.delta)}
    if term.kind == "first-order-sign":
        tsec["magnitude"] = repr(term.magnitude)
    elif term.kind == "second-order-sliding":
        tsec.update({k: v for k, v in aux_to_section(term.aux).items() if k != "kind"})
    elif term.kind == "user-supplied":
        raise ConfigError("user-supplied terminal controllers cannot be serialized")
    cp["terminal"] = tsec
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def parse_config(text: str) -> configparser.ConfigParser:
    cp = configparser.ConfigParser()
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    return cp


def _float(sec, key, default=None) -> float:
    if key not in sec:
        if default is None:
            raise ConfigError(f"missing key '{key}' in [{sec.name}]")
        return default
    try:
        return float(sec[key])
    except ValueError as exc:
        raise ConfigError(f"[{sec.name}] {key} is not a number: {sec[key]!r}") from exc


def from_config(text: str) -> SynthesizedController:
    cp = parse_config(text)
    for name in ("timescale", "basis", "aux"):
        if name not in cp:
            raise ConfigError(f"missing [{name}] section")
    tsec, bsec = cp["timescale"], cp["basis"]
    aux = aux_from_section(cp["aux"])
    delta = 0.0
    terminal = None
    if "terminal" in cp:
        sec = cp["terminal"]
        delta = _float(sec, "delta", 0.0)
        kind = sec.get("kind", "default")
        if kind == "first-order-sign":
            terminal = sign_terminal(_float(sec, "magnitude"))
        elif kind == "second-order-sliding":
            body = {k: v for k, v in sec.items() if k not in ("kind", "delta")}
            terminal = sosm_terminal(aux_from_section({"kind": "sosm", **body}))
        elif kind == "zero-hold":
            terminal = zero_hold(aux.n)
        elif kind != "default":
            raise ConfigError(f"unknown terminal kind {kind!r}")
    beta = _float(bsec, "beta") if "beta" in bsec else None
    try:
        return synthesize(aux, _float(tsec, "T_c"), _float(tsec, "alpha"), _float(bsec, "rho"),
                          beta=beta, terminal=terminal, delta=delta)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc

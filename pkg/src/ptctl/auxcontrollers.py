"""Auxiliary controllers v(z) with declared tau-time settling bounds.

Each controller acts on the auxiliary chain dz/dtau = J z + b_n (v(z) + pi).
Stock controllers are encoded for the compiled simulation loop; arbitrary
Python callables can be wrapped with :func:`user_controller`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad

from . import _kernels as K
from .errors import DomainError

INF = math.inf

# Lanczos approximation, g = 7, nine coefficients.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma_fn(x: float) -> float:
    """Gamma function for x > 0 (Lanczos, with reflection below 1/2)."""
    x = float(x)
    if not x > 0 or math.isinf(x):
        raise DomainError(f"gamma_fn needs a finite x > 0, got {x}", "x")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma_fn(1.0 - x))
    x -= 1.0
    acc = _LANCZOS_COEF[0]
    for i, c in enumerate(_LANCZOS_COEF[1:], start=1):
        acc += c / (x + i)
    t = x + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (x + 0.5) * math.exp(-t) * acc


@dataclass(frozen=True)
class PolyParams:
    """Gains of the scalar controller -[(a|x|^p + b|x|^q)^k + zeta] sign(x)."""

    a: float
    b: float
    p: float
    q: float
    k: float
    zeta: float = 0.0

    def __post_init__(self):
        for name in ("a", "b", "p", "q", "k"):
            val = getattr(self, name)
            if not (val > 0 and math.isfinite(val)):
                raise DomainError(f"{name} must be positive and finite, got {val}", name)
        if not self.zeta >= 0:
            raise DomainError(f"zeta must be >= 0, got {self.zeta}", "zeta")
        if not self.k * self.p < 1:
            raise DomainError(f"need k*p < 1, got {self.k * self.p}", "p")
        if not self.k * self.q > 1:
            raise DomainError(f"need k*q > 1, got {self.k * self.q}", "q")
        # kp < 1 < kq already forces q > p

    @property
    def m_p(self) -> float:
        return (1.0 - self.k * self.p) / (self.q - self.p)

    @property
    def m_q(self) -> float:
        return (self.k * self.q - 1.0) / (self.q - self.p)


def gamma_first_order(params: PolyParams) -> float:
    """Least upper bound of the settling time of dx/dtau = -(a|x|^p + b|x|^q)^k sign(x)."""
    a, b, k = params.a, params.b, params.k
    mp, mq = params.m_p, params.m_q
    return (gamma_fn(mp) * gamma_fn(mq) / (a**k * gamma_fn(k) * (params.q - params.p))
            * (a / b) ** mp)


def gamma_pair_second_order(a1: float, b1: float, a2: float, b2: float,
                            p: float, q: float, k: float) -> tuple[float, float]:
    """Settling constants of the two phases of the sliding second-order controller."""
    for name, val in (("a1", a1), ("b1", b1)):
        if not (val > 0 and math.isfinite(val)):
            raise DomainError(f"{name} must be positive and finite, got {val}", name)
    g1 = gamma_fn(0.25) ** 2 / (2.0 * math.sqrt(a1) * gamma_fn(0.5)) * (a1 / b1) ** 0.25
    g2 = gamma_first_order(PolyParams(a=a2, b=b2, p=p, q=q, k=k))
    return g1, g2


@dataclass(frozen=True, eq=False)
class AuxController:
    """An auxiliary controller together with its declared properties.

    ``T_f`` is the declared tau-time settling bound (``inf`` for asymptotic
    controllers). ``settling_fn``, when present, returns the tau-time settling
    time from a given auxiliary state.
    """

    n: int
    T_f: float
    kind: str
    law: int
    params: np.ndarray
    delta_tolerance: float = 0.0
    discontinuous: bool = False
    admissible: bool = True
    func: Optional[Callable[[np.ndarray], float]] = None
    settling_fn: Optional[Callable[[np.ndarray], float]] = None
    meta: dict = field(default_factory=dict)

    @property
    def compiled(self) -> bool:
        return self.law != K.LAW_USER

    def eval(self, z, sign_layer: float = 0.0) -> float:
        z = np.asarray(z, dtype=float).reshape(-1)
        if z.shape != (self.n,):
            raise DomainError(f"state must have {self.n} entries, got {z.size}", "z")
        if self.func is not None:
            return float(self.func(z))
        return float(K.law_eval(self.law, self.params, z, float(sign_layer)))

    __call__ = eval

    def admissible_for(self, alpha: float, rho: float) -> bool:
        """Whether the controller may be redesigned with the given (alpha, rho)."""
        if self.kind != "linear":
            return self.admissible
        eig = np.linalg.eigvals(companion_matrix(self.params))
        decay = float(np.max(eig.real))
        # z_i exp(-alpha (rho + 1 - i) tau) -> 0 for every i; i = n is the binding one
        return decay < 0 and decay < alpha * (rho + 1 - self.n)


def _array(vals) -> np.ndarray:
    arr = np.asarray(vals, dtype=float).copy()
    arr.setflags(write=False)
    return arr


def poly_fixed_time(params: PolyParams) -> AuxController:
    gamma = gamma_first_order(params)
    a, b, p, q, k, zeta = params.a, params.b, params.p, params.q, params.k, params.zeta

    def rate(s):
        return (a * s**p + b * s**q) ** k + zeta

    def settling(z) -> float:
        x = abs(float(np.asarray(z).reshape(-1)[0]))
        if x == 0.0:
            return 0.0
        head = quad(lambda s: 1.0 / rate(s), 0.0, min(x, 1.0), limit=200)[0]
        if x <= 1.0:
            return head
        # s = e^u keeps the tail smooth for large initial conditions
        tail = quad(lambda u: math.exp(u) / rate(math.exp(u)), 0.0, math.log(x), limit=200)[0]
        return head + tail

    return AuxController(
        n=1, T_f=gamma, kind="poly", law=K.LAW_POLY,
        params=_array([a, b, p, q, k, zeta]),
        delta_tolerance=zeta, discontinuous=True,
        settling_fn=settling, meta={"poly": params},
    )


def second_order_sliding(a1: float, b1: float, a2: float, b2: float, p: float, q: float,
                         k: float, T_f1: float, T_f2: float, zeta: float = 0.0) -> AuxController:
    """Fixed-time sliding controller for the double integrator, settling bound T_f1 + T_f2."""
    g1, g2 = gamma_pair_second_order(a1, b1, a2, b2, p, q, k)
    for name, val in (("T_f1", T_f1), ("T_f2", T_f2)):
        if not (val > 0 and math.isfinite(val)):
            raise DomainError(f"{name} must be positive and finite, got {val}", name)
    if not zeta >= 0:
        raise DomainError(f"zeta must be >= 0, got {zeta}", "zeta")
    params = _array([a1, b1, a2, b2, p, q, k, T_f1, T_f2, zeta, g1, g2])
    return AuxController(
        n=2, T_f=float(T_f1) + float(T_f2), kind="sosm", law=K.LAW_SOSM, params=params,
        delta_tolerance=float(zeta), discontinuous=True,
        meta={"gamma1": g1, "gamma2": g2},
    )


def sliding_variable(aux: AuxController, z) -> float:
    """The sliding variable of a :func:`second_order_sliding` controller."""
    if aux.kind != "sosm":
        raise DomainError("sliding variable only exists for the sliding second-order controller")
    z = np.asarray(z, dtype=float).reshape(-1)
    return float(K.sosm_sigma(aux.params, z[0], z[1]))


def companion_matrix(gains) -> np.ndarray:
    """Closed-loop matrix of dz/dtau = J z - b_n gains . z."""
    g = np.asarray(gains, dtype=float).reshape(-1)
    n = g.size
    A = np.eye(n, k=1)
    A[-1, :] -= g
    return A


def linear_controller(gains) -> AuxController:
    g = np.asarray(gains, dtype=float).reshape(-1)
    if g.size == 0:
        raise DomainError("linear controller needs at least one gain", "gains")

    def settling(z) -> float:
        return 0.0 if not np.any(np.asarray(z, dtype=float)) else INF

    return AuxController(n=g.size, T_f=INF, kind="linear", law=K.LAW_LINEAR,
                         params=_array(g), settling_fn=settling)


def bounded_exp_controller(c: float) -> AuxController:
    """-c (1 - exp(-|x|)) sign(x); bounded by c, asymptotically stabilizing."""
    if not (c >= 1 and math.isfinite(c)):
        raise DomainError(f"c must be >= 1, got {c}", "c")

    def settling(z) -> float:
        return 0.0 if float(np.asarray(z).reshape(-1)[0]) == 0.0 else INF

    return AuxController(n=1, T_f=INF, kind="bounded_exp", law=K.LAW_BOUNDED_EXP,
                         params=_array([c]), settling_fn=settling)


def user_controller(func: Callable[[np.ndarray], float], n: int, T_f: float = INF, *,
                    delta_tolerance: float = 0.0, discontinuous: bool = False,
                    admissible: bool = True,
                    settling_fn: Optional[Callable[[np.ndarray], float]] = None) -> AuxController:
    """Wrap a Python callable; admissibility is the caller's assertion."""
    if not (T_f > 0):
        raise DomainError(f"T_f must be > 0, got {T_f}", "T_f")
    return AuxController(n=int(n), T_f=float(T_f), kind="user", law=K.LAW_USER,
                         params=_array([]), delta_tolerance=delta_tolerance,
                         discontinuous=discontinuous, admissible=admissible, func=func,
                         settling_fn=settling_fn)

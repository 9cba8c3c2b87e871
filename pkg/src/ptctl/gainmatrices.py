"""Structural matrices for redesigning an auxiliary controller on an integrator chain.

For order ``n``, homogeneity-like degree ``rho`` and rate ``alpha``:

    D   = diag(-rho, 1 - rho, ..., n - 1 - rho)
    M   = J - alpha * D                 (J: upper shift, single zero Jordan block)
    Q   = rows b1' M^0, b1' M^1, ..., b1' M^(n-1)   (unit lower triangular)
    row = b1' M^n                        (feedback row)
    K(kappa) = diag(kappa^-rho, kappa^(1-rho), ..., kappa^(n-1-rho))

Plant and auxiliary coordinates are related by z = Q K^-1 x / beta.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError


def shift_matrix(n: int) -> np.ndarray:
    """The n x n upper shift ``J``."""
    return np.eye(n, k=1)


def unit_vector(n: int, i: int) -> np.ndarray:
    """``b_i`` with one-based index ``i``."""
    b = np.zeros(n)
    b[i - 1] = 1.0
    return b


def _row_times_m(row: np.ndarray, alpha: float, d: np.ndarray) -> np.ndarray:
    # row @ (J - alpha D) without forming the matrix: shift right, then scale.
    out = np.empty_like(row)
    out[0] = -alpha * d[0] * row[0]
    out[1:] = row[:-1] - alpha * d[1:] * row[1:]
    return out


def unit_lower_inverse(Q: np.ndarray) -> np.ndarray:
    """Inverse of a unit lower-triangular matrix by forward substitution."""
    n = Q.shape[0]
    inv = np.zeros_like(Q)
    for j in range(n):
        inv[j, j] = 1.0
        for i in range(j + 1, n):
            inv[i, j] = -Q[i, j:i] @ inv[j:i, j]
    return inv


@dataclass(frozen=True, eq=False)
class GainBasis:
    n: int
    rho: float
    alpha: float
    D: np.ndarray
    Q: np.ndarray
    Q_inv: np.ndarray
    feedback_row: np.ndarray

    @property
    def d(self) -> np.ndarray:
        """Diagonal of ``D``."""
        return np.diag(self.D).copy()

    @property
    def exponents(self) -> np.ndarray:
        """Exponents of ``K^-1``: entry i is ``rho - (i - 1)``."""
        return self.rho - np.arange(self.n, dtype=float)

    def M(self) -> np.ndarray:
        return shift_matrix(self.n) - self.alpha * self.D

    def A(self) -> np.ndarray:
        """Rank-one correction ``b_n row Q^-1`` with (J + A) Q = Q (J - alpha D)."""
        return np.outer(unit_vector(self.n, self.n), self.feedback_row @ self.Q_inv)


def build_basis(n: int, rho: float, alpha: float) -> GainBasis:
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}", "n")
    n = int(n)
    rho = float(rho)
    alpha = float(alpha)
    if not 0.0 <= rho <= n:
        raise DomainError(f"rho must lie in [0, {n}], got {rho}", "rho")
    if not alpha >= 0:
        raise DomainError(f"alpha must be >= 0, got {alpha}", "alpha")

    d = np.arange(n, dtype=float) - rho
    Q = np.zeros((n, n))
    row = unit_vector(n, 1)
    for i in range(n):
        Q[i] = row
        row = _row_times_m(row, alpha, d)

    for arr in (Q, row):
        arr.setflags(write=False)
    D = np.diag(d)
    D.setflags(write=False)
    Q_inv = unit_lower_inverse(Q)
    Q_inv.setflags(write=False)
    return GainBasis(n=n, rho=rho, alpha=alpha, D=D, Q=Q, Q_inv=Q_inv, feedback_row=row)


def feedback_row(basis: GainBasis) -> np.ndarray:
    return basis.feedback_row


@dataclass(frozen=True, eq=False)
class GainDiagonal:
    """Diagonal of ``K(kappa)`` and of its inverse."""

    kappa: float
    entries: np.ndarray
    inverse: np.ndarray

    def matrix(self) -> np.ndarray:
        return np.diag(self.entries)

    def inverse_matrix(self) -> np.ndarray:
        return np.diag(self.inverse)


def k_diag(basis: GainBasis, kappa_val: float) -> GainDiagonal:
    if not kappa_val > 0:
        raise DomainError(f"kappa must be > 0, got {kappa_val}", "kappa_val")
    inv = kappa_val ** basis.exponents
    return GainDiagonal(kappa=float(kappa_val), entries=1.0 / inv, inverse=inv)


def _as_state(v, n: int, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.shape != (n,):
        raise DomainError(f"{name} must have {n} entries, got {v.size}", name)
    return v


def _check_scales(beta: float, kappa_val: float) -> None:
    if not beta > 0:
        raise DomainError(f"beta must be > 0, got {beta}", "beta")
    if not kappa_val > 0:
        raise DomainError(f"kappa must be > 0, got {kappa_val}", "kappa_val")


def z_from_x(basis: GainBasis, beta: float, kappa_val: float, x) -> np.ndarray:
    """Auxiliary coordinates ``Q K^-1 x / beta``."""
    _check_scales(beta, kappa_val)
    x = _as_state(x, basis.n, "x")
    return basis.Q @ (kappa_val ** basis.exponents * x) / beta


def x_from_z(basis: GainBasis, beta: float, kappa_val: float, z) -> np.ndarray:
    """Plant coordinates ``beta K Q^-1 z``."""
    _check_scales(beta, kappa_val)
    z = _as_state(z, basis.n, "z")
    return beta * kappa_val ** (-basis.exponents) * (basis.Q_inv @ z)

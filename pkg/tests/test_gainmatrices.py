import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles as O
from ptctl.errors import DomainError
from ptctl.gainmatrices import (
    build_basis,
    feedback_row,
    k_diag,
    shift_matrix,
    unit_vector,
    x_from_z,
    z_from_x,
)


@st.composite
def bases(draw):
    n = draw(st.integers(1, 5))
    rho = draw(st.floats(0.0, float(n)))
    alpha = draw(st.floats(0.0, 1.5))
    return n, rho, alpha


def test_double_integrator_rho_zero():
    b = build_basis(2, 0.0, 1.0)
    np.testing.assert_array_equal(b.Q, np.eye(2))
    np.testing.assert_array_equal(feedback_row(b), [0.0, -1.0])


def test_second_order_rho_two():
    b = build_basis(2, 2.0, 0.5)
    np.testing.assert_allclose(b.Q, [[1, 0], [1, 1]])
    np.testing.assert_allclose(b.feedback_row, [1.0, 1.5])


@pytest.mark.parametrize("alpha", [0.3, 1.0, 2.0])
def test_third_order_rho_three(alpha):
    b = build_basis(3, 3.0, alpha)
    a = alpha
    np.testing.assert_allclose(b.Q, [[1, 0, 0], [3 * a, 1, 0], [9 * a * a, 5 * a, 1]],
                               rtol=1e-14)
    np.testing.assert_allclose(b.feedback_row, [27 * a**3, 19 * a**2, 6 * a], rtol=1e-14)


@settings(max_examples=150, deadline=None)
@given(bases())
def test_matches_matrix_powers(args):
    n, rho, alpha = args
    b = build_basis(n, rho, alpha)
    Q, row, M = O.q_and_row(n, rho, alpha)
    np.testing.assert_allclose(b.Q, Q, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(b.feedback_row, row, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(b.M(), M)


@settings(max_examples=150, deadline=None)
@given(bases())
def test_structure(args):
    n, rho, alpha = args
    b = build_basis(n, rho, alpha)
    assert np.allclose(np.triu(b.Q, 1), 0)
    np.testing.assert_array_equal(np.diag(b.Q), np.ones(n))
    assert np.linalg.det(b.Q) == pytest.approx(1.0)
    scale = 1 + np.abs(b.Q).max() * np.abs(b.Q_inv).max()
    assert np.abs(b.Q @ b.Q_inv - np.eye(n)).max() <= 1e-12 * scale
    bn = unit_vector(n, n)
    np.testing.assert_array_equal(b.Q @ bn, bn)
    np.testing.assert_array_equal(b.Q_inv @ bn, bn)


@settings(max_examples=150, deadline=None)
@given(bases())
def test_similarity_identity(args):
    n, rho, alpha = args
    b = build_basis(n, rho, alpha)
    R = (shift_matrix(n) + b.A()) @ b.Q - b.Q @ b.M()
    assert np.abs(R).max() <= 1e-12 * (1 + np.abs(b.Q).max() * np.abs(b.M()).max())


@settings(max_examples=100, deadline=None)
@given(bases(), st.floats(0.01, 100.0))
def test_diagonal_conjugates_shift(args, kap):
    n, rho, alpha = args
    b = build_basis(n, rho, alpha)
    kd = k_diag(b, kap)
    J = shift_matrix(n)
    np.testing.assert_allclose(kd.inverse_matrix() @ J @ kd.matrix(), kap * J, rtol=1e-12,
                               atol=1e-12)
    np.testing.assert_allclose(kd.entries * kd.inverse, np.ones(n), rtol=1e-14)


def test_roundtrip_well_conditioned(rng):
    for _ in range(100):
        n = int(rng.integers(1, 6))
        b = build_basis(n, float(rng.uniform(0, n)), float(rng.uniform(0, 0.5)))
        kap = float(rng.uniform(0.5, 2.0))
        beta = float(rng.uniform(0.5, 3))
        x = rng.normal(size=n)
        back = x_from_z(b, beta, kap, z_from_x(b, beta, kap, x))
        np.testing.assert_allclose(back, x, rtol=0, atol=1e-10)


def test_roundtrip_within_forward_error_bound(rng):
    # kappa^(rho - i) spans many decades for large n and kappa, so the attainable
    # accuracy is set by rounding in z and its amplification through Q^-1
    eps = np.finfo(float).eps
    for _ in range(100):
        n = int(rng.integers(1, 6))
        b = build_basis(n, float(rng.uniform(0, n)), float(rng.uniform(0, 1.5)))
        kap = float(rng.uniform(0.1, 30))
        beta = float(rng.uniform(0.5, 3))
        x = rng.normal(size=n)
        y = kap ** b.exponents * np.abs(x)
        bound = 4 * n * eps * kap ** (-b.exponents) * (np.abs(b.Q_inv) @ (np.abs(b.Q) @ y))
        back = x_from_z(b, beta, kap, z_from_x(b, beta, kap, x))
        assert np.all(np.abs(back - x) <= bound + 1e-15)


def test_z_from_x_formula():
    b = build_basis(2, 2.0, 0.5)
    z = z_from_x(b, 2.0, 3.0, [1.0, 1.0])
    np.testing.assert_allclose(z, np.array([9.0, 9.0 + 3.0]) / 2.0)


def test_arrays_are_read_only():
    b = build_basis(3, 1.0, 1.0)
    with pytest.raises(ValueError):
        b.Q[0, 0] = 2.0


@pytest.mark.parametrize("args", [(0, 0, 1), (2.5, 0, 1), (2, -0.1, 1), (2, 2.1, 1), (2, 1, -1)])
def test_invalid_basis(args):
    with pytest.raises(DomainError):
        build_basis(*args)


def test_invalid_coordinates():
    b = build_basis(2, 1.0, 1.0)
    with pytest.raises(DomainError):
        z_from_x(b, 1.0, 1.0, [1.0, 2.0, 3.0])
    with pytest.raises(DomainError):
        z_from_x(b, 0.0, 1.0, [1.0, 2.0])
    with pytest.raises(DomainError):
        x_from_z(b, 1.0, -1.0, [1.0, 2.0])
    with pytest.raises(DomainError):
        k_diag(b, 0.0)

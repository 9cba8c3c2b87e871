import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

import oracles as O
from ptctl import _kernels as K
from ptctl.auxcontrollers import (
    PolyParams,
    bounded_exp_controller,
    companion_matrix,
    gamma_first_order,
    gamma_fn,
    gamma_pair_second_order,
    linear_controller,
    poly_fixed_time,
    second_order_sliding,
    sliding_variable,
    user_controller,
)
from ptctl.errors import DomainError


@settings(max_examples=300, deadline=None)
@given(st.floats(1e-3, 60.0))
def test_gamma_matches_reference(x):
    assert gamma_fn(x) == pytest.approx(O.gamma(x), rel=1e-12)


def test_gamma_special_values():
    assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert gamma_fn(1.0) == pytest.approx(1.0, rel=1e-14)
    assert gamma_fn(5.0) == pytest.approx(24.0, rel=1e-13)


@pytest.mark.parametrize("x", [0.0, -1.0, math.inf, math.nan])
def test_gamma_domain(x):
    with pytest.raises(DomainError):
        gamma_fn(x)


def test_settling_constant_reference_values():
    assert gamma_first_order(PolyParams(4, 0.25, 0.9, 1.1, 1.0)) == pytest.approx(5 * math.pi,
                                                                                 rel=1e-12)
    g1, g2 = gamma_pair_second_order(4, 0.25, 4, 0.25, 0.5, 1.0, 1.5)
    assert g1 == pytest.approx(3.7081, abs=1e-3)
    assert g2 == pytest.approx(2.0, abs=1e-9)


@st.composite
def polys(draw):
    k = draw(st.floats(0.5, 2.0))
    p = draw(st.floats(0.05, 0.95)) / k
    q = draw(st.floats(1.05, 3.0)) / k
    return PolyParams(draw(st.floats(0.1, 10)), draw(st.floats(0.1, 10)), p, q, k)


@settings(max_examples=200, deadline=None)
@given(polys())
def test_settling_constant_matches_reference(pp):
    assert gamma_first_order(pp) == pytest.approx(
        O.settling_constant(pp.a, pp.b, pp.p, pp.q, pp.k), rel=1e-10)


@pytest.mark.parametrize("kw", [dict(a=0), dict(b=-1), dict(p=1.2), dict(q=0.95),
                                dict(zeta=-0.1), dict(k=0)])
def test_poly_params_validation(kw):
    base = dict(a=4, b=0.25, p=0.9, q=1.1, k=1.0)
    base.update(kw)
    with pytest.raises(DomainError):
        PolyParams(**base)


def test_poly_law_values():
    pp = PolyParams(4, 0.25, 0.9, 1.1, 1.0, zeta=0.5)
    aux = poly_fixed_time(pp)
    assert aux.T_f == pytest.approx(5 * math.pi)
    assert aux.discontinuous and aux.delta_tolerance == 0.5
    for z in (-3.0, -0.2, 0.7, 12.0):
        assert aux.eval([z]) == pytest.approx(O.poly_law([z], 4, 0.25, 0.9, 1.1, 1.0, 0.5))
    assert aux.eval([0.0]) == 0.0
    # the saturation layer replaces sign by a clipped ramp
    assert aux.eval([1e-4], sign_layer=1e-3) == pytest.approx(
        -((4 * 1e-4**0.9 + 0.25 * 1e-4**1.1) + 0.5) * 0.1)


def test_poly_settling_function():
    pp = PolyParams(4, 0.25, 0.9, 1.1, 1.0)
    aux = poly_fixed_time(pp)
    prev = 0.0
    for x0 in (0.01, 0.5, 1.0, 3.0, 100.0, 1e6):
        T = aux.settling_fn([x0])
        assert prev < T <= aux.T_f
        prev = T
    assert aux.settling_fn([-2.0]) == aux.settling_fn([2.0])
    assert aux.settling_fn([0.0]) == 0.0
    # direct integration of the scalar ODE from 3 down to 1e-3
    hit = lambda t, x: x[0] - 1e-3  # noqa: E731
    hit.terminal = True
    sol = solve_ivp(lambda t, x: [O.poly_law(x, 4, 0.25, 0.9, 1.1, 1.0)], (0, 20), [3.0],
                    events=hit, rtol=1e-10, atol=1e-12)
    expected = aux.settling_fn([3.0]) - aux.settling_fn([1e-3])
    assert sol.t_events[0][0] == pytest.approx(expected, rel=1e-6)


def test_sliding_controller_matches_reference():
    aux = second_order_sliding(4, 0.25, 4, 0.25, 0.5, 1.0, 1.5, 5, 5, 1.0)
    assert aux.T_f == 10.0 and aux.n == 2 and aux.discontinuous
    pr = [float(v) for v in aux.params]
    rng = np.random.default_rng(3)
    for _ in range(50):
        z = rng.normal(scale=20, size=2)
        assert aux.eval(z) == pytest.approx(O.sliding_law(z, *pr), rel=1e-12)
    assert aux.eval([0.0, 0.0]) == 0.0
    # on the curve where the square-root term cancels x2 the sliding variable vanishes
    x2 = -2.0
    g1s = pr[10] ** 2 / pr[7] ** 2
    # choose x1 with 2 g1s (a1 x1 + b1 x1^3) = 2 x2^2 so that x2|x2| + ... = x2^2
    from scipy.optimize import brentq
    x1 = brentq(lambda s: 2 * g1s * (4 * s + 0.25 * s**3) - 2 * x2 * x2, 0, 10)
    assert sliding_variable(aux, [x1, x2]) == pytest.approx(0.0, abs=1e-12)


def test_sliding_controller_validation():
    with pytest.raises(DomainError):
        second_order_sliding(4, 0.25, 4, 0.25, 0.5, 1.0, 1.5, 0, 5)
    with pytest.raises(DomainError):
        second_order_sliding(0, 0.25, 4, 0.25, 0.5, 1.0, 1.5, 5, 5)
    with pytest.raises(DomainError):
        sliding_variable(linear_controller([1.0]), [1.0])


def test_linear_controller_admissibility():
    aux = linear_controller([18.0, 9.0])
    assert aux.T_f == math.inf and not aux.discontinuous
    assert aux.eval([1.0, 2.0]) == -36.0
    np.testing.assert_allclose(sorted(np.linalg.eigvals(companion_matrix([18, 9])).real),
                               [-6, -3])
    assert aux.admissible_for(1.0, 0.0)
    # the slowest mode (-3) must decay faster than alpha (rho + 1 - n)
    assert not aux.admissible_for(4.0, 0.0)
    assert not linear_controller([-1.0]).admissible_for(1.0, 1.0)
    assert not linear_controller([2.0, 3.0]).admissible_for(2.0, 0.0)
    assert linear_controller([1.0]).admissible_for(1.0, 0.0)
    assert aux.settling_fn([0.0, 0.0]) == 0.0
    assert aux.settling_fn([1.0, 0.0]) == math.inf


def test_bounded_exponential_controller():
    aux = bounded_exp_controller(10.0)
    zs = np.linspace(-50, 50, 101)
    vals = np.array([aux.eval([z]) for z in zs])
    assert np.all(np.abs(vals) <= 10.0)
    assert np.all(vals * zs <= 0)
    with pytest.raises(DomainError):
        bounded_exp_controller(0.5)


def test_user_controller():
    aux = user_controller(lambda z: -2.0 * z[0], 1, 3.0, discontinuous=False)
    assert not aux.compiled and aux.law == K.LAW_USER
    assert aux.eval([1.5]) == -3.0
    with pytest.raises(DomainError):
        aux.eval([1.0, 2.0])
    with pytest.raises(DomainError):
        user_controller(lambda z: 0.0, 1, 0.0)

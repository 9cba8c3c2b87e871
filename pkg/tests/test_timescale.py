import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles as O
from ptctl.errors import DomainError
from ptctl.timescale import kappa, kappa_max, make_timescale, phi, phi_inv, settling_map

INF = math.inf
alphas = st.floats(0.01, 3.0)
tcs = st.floats(0.1, 50.0)
tfs = st.one_of(st.just(INF), st.floats(0.1, 20.0))
fracs = st.floats(0.0, 0.999)


def test_eta_and_kappa_max_reference_values():
    ts = make_timescale(10, 0.5, 10)
    assert ts.eta == pytest.approx(0.99326, abs=1e-4)
    assert kappa_max(ts) == pytest.approx(29.4826, abs=1e-3)


def test_prescribed_branch():
    ts = make_timescale(1.0, 1.0)
    assert ts.eta == 1.0 and ts.prescribed
    assert kappa(ts, 0.5) == pytest.approx(2.0)
    assert phi(ts, 0.5) == pytest.approx(math.log(2.0))
    assert settling_map(ts, INF) == 1.0
    with pytest.raises(DomainError):
        kappa_max(ts)


def test_static_branch():
    ts = make_timescale(2.0, 0.0, 6.0)
    assert ts.static and ts.horizon == INF
    assert kappa(ts, 100.0) == 3.0
    assert phi(ts, 1.0) == 3.0
    assert phi_inv(ts, 3.0) == 1.0
    assert kappa_max(ts) == 3.0


@pytest.mark.parametrize("args", [(0, 1, 1), (-1, 1, 1), (INF, 1, 1), (1, -0.1, 1),
                                  (1, 0, INF), (1, 1, 0), (1, INF, 1)])
def test_invalid_parameters(args):
    with pytest.raises(DomainError):
        make_timescale(*args)


def test_singularity_is_rejected():
    ts = make_timescale(1.0, 1.0)
    with pytest.raises(DomainError):
        kappa(ts, 1.0)
    with pytest.raises(DomainError):
        phi(ts, 1.5)
    with pytest.raises(DomainError):
        kappa(ts, -0.1)
    with pytest.raises(DomainError):
        phi_inv(ts, -1.0)


@settings(max_examples=200, deadline=None)
@given(tcs, alphas, tfs, fracs)
def test_against_closed_forms(T_c, alpha, T_f, frac):
    ts = make_timescale(T_c, alpha, T_f)
    t = frac * min(T_c, ts.horizon)
    assert ts.eta == pytest.approx(O.eta(alpha, T_f), rel=1e-12)
    assert phi(ts, t) == pytest.approx(O.tau_of_t(t, T_c, alpha, T_f), rel=1e-9, abs=1e-12)
    assert kappa(ts, t) == pytest.approx(O.gain(t, T_c, alpha, T_f), rel=1e-12)
    assert phi_inv(ts, phi(ts, t)) == pytest.approx(t, rel=1e-9, abs=1e-12)
    if not ts.prescribed and alpha * T_f < 700:
        assert kappa_max(ts) == pytest.approx(O.gain_max(T_c, alpha, T_f), rel=1e-9)
        assert kappa(ts, t) <= kappa_max(ts) * (1 + 1e-12)


@settings(max_examples=50, deadline=None)
@given(tcs, alphas, tfs, st.floats(0.05, 0.9))
def test_gain_is_derivative_of_map(T_c, alpha, T_f, frac):
    ts = make_timescale(T_c, alpha, T_f)
    t = frac * T_c
    dt = 1e-7 * T_c
    fd = (phi(ts, t + dt) - phi(ts, t - dt)) / (2 * dt)
    assert fd == pytest.approx(kappa(ts, t), rel=1e-5)


def test_finite_settling_maps_inside_horizon():
    ts = make_timescale(10, 0.5, 10)
    assert settling_map(ts, 10.0) == pytest.approx(10.0, rel=1e-12)
    assert settling_map(ts, 5.0) < 10.0
    assert settling_map(ts, 0.0) == 0.0

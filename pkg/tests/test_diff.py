import numpy as np
import pytest

from hystid.core import TimeSeries, TooShort
from hystid.diff import central_difference, differentiate_series
from hystid.generators import DuhemParams, HarmonicExcitation, duhem_rhs, simulate_duhem


def test_constant_sequence_has_zero_derivative():
    d = central_difference(np.full(10, 3.7), 0.1)
    np.testing.assert_allclose(d, np.zeros(10), rtol=0, atol=1e-12)


def test_exact_on_affine_signals():
    t = np.arange(50) * 0.05
    d = central_difference(2.5 * t - 1.0, 0.05)
    np.testing.assert_allclose(d, np.full(50, 2.5), rtol=0, atol=1e-12)


def test_exact_on_quadratic_interior():
    t = np.arange(30) * 0.1
    d = central_difference(t**2, 0.1)
    np.testing.assert_allclose(d[1:-1], 2.0 * t[1:-1], rtol=0, atol=1e-12)
    # one-sided boundary stencils are also exact on quadratics
    np.testing.assert_allclose(d[[0, -1]], 2.0 * t[[0, -1]], rtol=0, atol=1e-12)


def test_sine_error_bound():
    dt = 1e-3
    t = np.arange(2000) * dt
    err = np.abs(central_difference(np.sin(t), dt) - np.cos(t))
    assert err.max() <= 5e-7


def test_second_order_convergence_on_sine():
    errs = []
    for dt in (2e-3, 1e-3):
        t = np.arange(int(2.0 / dt)) * dt
        errs.append(np.abs(central_difference(np.sin(t), dt) - np.cos(t)).max())
    assert errs[0] / errs[1] > 3.5


def test_linearity():
    rng = np.random.default_rng(3)
    x, y = rng.normal(size=100), rng.normal(size=100)
    lhs = central_difference(2.0 * x + 3.0 * y, 0.01)
    rhs = 2.0 * central_difference(x, 0.01) + 3.0 * central_difference(y, 0.01)
    np.testing.assert_allclose(lhs, rhs, rtol=0, atol=1e-12 * np.abs(rhs).max())


def test_too_short_and_bad_dt():
    with pytest.raises(TooShort):
        central_difference([1.0, 2.0, 3.0], 0.1)
    with pytest.raises(ValueError):
        central_difference(np.zeros(10), 0.0)


def test_differentiate_zero_series():
    ts = TimeSeries(np.arange(5) * 0.1, np.zeros(5), np.zeros(5))
    ds = differentiate_series(ts)
    np.testing.assert_array_equal(ds.du, np.zeros(5))
    np.testing.assert_array_equal(ds.dw, np.zeros(5))


def test_ramp_input_constant_output():
    t = np.arange(20) * 0.1
    ts = TimeSeries(t, 4.0 * t, np.full(20, 2.0))
    ds = differentiate_series(ts)
    np.testing.assert_allclose(ds.du, np.full(20, 4.0), atol=1e-12)
    np.testing.assert_array_equal(ds.dw, np.zeros(20))


def test_duhem_trajectory_derivative_matches_rhs():
    # dw from differencing the simulated output must match the analytic
    # right-hand side along the trajectory to second order in dt; the
    # |u'| kink makes w'' jump where u' crosses zero, so the O(dt^2)
    # statement holds away from those isolated samples
    p = DuhemParams(0.4, 0.5, 0.25)
    exc = HarmonicExcitation()
    dt = 1e-3
    ts = simulate_duhem(p, exc, 4000, dt)
    ds = differentiate_series(ts)
    rhs = duhem_rhs(p)
    du = exc.derivative(ts.t)
    expected = np.array([rhs(ts.u[i], du[i], ts.w[i]) for i in range(len(ts))])
    scale = np.abs(expected).max()
    err = np.abs(ds.dw - expected)
    near_kink = np.zeros(len(ts), dtype=bool)
    crossings = np.nonzero(np.diff(np.sign(du)))[0]
    for i in crossings:
        near_kink[max(0, i - 2):i + 4] = True
    assert err[~near_kink].max() <= 20.0 * dt**2 * scale
    # at the kinks the difference scheme is still first-order accurate
    assert err.max() <= 20.0 * dt * scale

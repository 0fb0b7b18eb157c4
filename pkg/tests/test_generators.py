import math

import numpy as np
import pytest
import sympy

from hystid.core import DivergedSimulation, InvalidExcitation, TooShort
from hystid.generators import (
    BoucWenParams,
    DuhemParams,
    HarmonicExcitation,
    add_gaussian_noise,
    bouc_wen_rhs,
    duhem_rhs,
    excitation_signal,
    simulate_bouc_wen,
    simulate_butterfly,
    simulate_duhem,
)

EXC = HarmonicExcitation()


class TestExcitation:
    def test_sine_at_origin(self):
        u, du = excitation_signal(EXC, 8, 0.01)
        assert u[0] == 0.0
        assert du[0] == pytest.approx(2.0 * math.pi, abs=1e-12)

    def test_cosine_peak(self):
        exc = HarmonicExcitation(phase=math.pi / 2)
        u, du = excitation_signal(exc, 8, 0.01)
        assert u[0] == pytest.approx(1.0, abs=1e-12)
        assert du[0] == pytest.approx(0.0, abs=1e-12)

    def test_matches_symbolic_derivative(self):
        # independent oracle: differentiate the closed form with sympy
        exc = HarmonicExcitation(amplitude=2.0, frequency=0.5, phase=0.3, decay=0.1)
        ts = sympy.Symbol("t")
        expr = 2.0 * sympy.exp(-0.1 * ts) * sympy.sin(2 * sympy.pi * 0.5 * ts + 0.3)
        d_expr = sympy.diff(expr, ts)
        for t in (0.0, 0.37, 1.0, 2.5):
            assert exc.value(t) == pytest.approx(float(expr.subs(ts, t)), abs=1e-12)
            assert exc.derivative(t) == pytest.approx(float(d_expr.subs(ts, t)), abs=1e-12)

    def test_invalid_parameters(self):
        with pytest.raises(InvalidExcitation):
            HarmonicExcitation(amplitude=0.0)
        with pytest.raises(InvalidExcitation):
            HarmonicExcitation(frequency=-1.0)
        with pytest.raises(TooShort):
            excitation_signal(EXC, 3, 0.01)


def rk4_step_oracle(f, t0, x0, dt, exc):
    """Hand-coded single RK4 step, independent of the integrator."""
    k1 = f(exc.value(t0), exc.derivative(t0), x0)
    k2 = f(exc.value(t0 + dt / 2), exc.derivative(t0 + dt / 2), x0 + dt / 2 * k1)
    k3 = f(exc.value(t0 + dt / 2), exc.derivative(t0 + dt / 2), x0 + dt / 2 * k2)
    k4 = f(exc.value(t0 + dt), exc.derivative(t0 + dt), x0 + dt * k3)
    return x0 + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


class TestDuhem:
    def test_zero_rhs_keeps_initial_value(self):
        ts = simulate_duhem(DuhemParams(0, 0, 0), EXC, 50, 0.01, w0=1.25)
        np.testing.assert_array_equal(ts.w, np.full(50, 1.25))

    def test_gamma_only_integrates_input_exactly(self):
        # w' = u' means w(t) = w0 + u(t) - u(0)
        ts = simulate_duhem(DuhemParams(0, 0, 1.0), EXC, 2000, 1e-3, w0=0.5)
        expected = 0.5 + ts.u - ts.u[0]
        assert np.abs(ts.w - expected).max() < 1e-10

    def test_single_step_matches_oracle(self):
        p = DuhemParams(0.4, 0.5, 0.25)
        ts = simulate_duhem(p, EXC, 4, 0.01, w0=0.3)
        expected = rk4_step_oracle(duhem_rhs(p), 0.0, 0.3, 0.01, EXC)
        assert ts.w[1] == pytest.approx(expected, abs=1e-12)

    def test_rate_independence_of_gamma_dynamics(self):
        # for gamma-only dynamics w - w0 must track u - u(0) at any speed
        slow = simulate_duhem(DuhemParams(0, 0, 2.0), HarmonicExcitation(frequency=0.5), 1000, 2e-3)
        fast = simulate_duhem(DuhemParams(0, 0, 2.0), HarmonicExcitation(frequency=2.0), 1000, 5e-4)
        np.testing.assert_allclose(slow.w, 2.0 * (slow.u - slow.u[0]), atol=1e-10)
        np.testing.assert_allclose(fast.w, 2.0 * (fast.u - fast.u[0]), atol=1e-10)

    def test_divergence_detected(self):
        # beta < 0 turns the loop-closing term into exponential growth
        with pytest.raises(DivergedSimulation):
            simulate_duhem(DuhemParams(0, -80.0, 0), EXC, 8000, 0.01, w0=1e-3)


class TestBoucWen:
    def test_linear_case_integrates_input(self):
        ts = simulate_bouc_wen(BoucWenParams(5.0, 0, 0, 1), EXC, 2000, 1e-3)
        expected = 5.0 * (ts.u - ts.u[0])
        assert np.abs(ts.w - expected).max() < 5e-10

    def test_paper_parameters_produce_loop(self):
        ts = simulate_bouc_wen(BoucWenParams(5.0, 0.25, 0.5, 1), EXC, 5000, 3e-4)
        assert ts.w.max() > 1.0 and ts.w.min() < -1.0

    def test_single_step_matches_oracle(self):
        p = BoucWenParams(5.0, 0.25, 0.5, 1)
        ts = simulate_bouc_wen(p, EXC, 4, 0.01, w0=-0.2)
        expected = rk4_step_oracle(bouc_wen_rhs(p), 0.0, -0.2, 0.01, EXC)
        assert ts.w[1] == pytest.approx(expected, abs=1e-12)

    def test_rhs_continuous_limit_at_zero(self):
        # |w|^(n-1) w at w = 0, n = 1 must evaluate to w, not raise 0^0 issues
        f = bouc_wen_rhs(BoucWenParams(1.0, 1.0, 1.0, 1))
        assert f(0.5, 1.0, 0.0) == pytest.approx(1.0)

    def test_exponent_validation(self):
        with pytest.raises(ValueError):
            BoucWenParams(1.0, 1.0, 1.0, 0)


class TestButterfly:
    def test_zero_dynamics(self):
        ts, y = simulate_butterfly(DuhemParams(0, 0, 0), EXC, 100, 1e-3, y0=0.0)
        np.testing.assert_array_equal(ts.w, np.zeros(100))
        np.testing.assert_array_equal(y, np.zeros(100))

    def test_output_is_square_plus_offset(self):
        ts, y = simulate_butterfly(DuhemParams(3.2, 1.7, 0.4), EXC, 500, 1e-3, offset=0.7)
        np.testing.assert_array_equal(ts.w, y * y + 0.7)
        ts0, y0 = simulate_butterfly(DuhemParams(3.2, 1.7, 0.4), EXC, 500, 1e-3)
        assert (ts0.w >= 0).all()

    def test_chain_rule_identity(self):
        # centered differences of w and 2 y y' agree on interior points;
        # the grid must be fine enough that the O(dt^2) difference error
        # sits below the 1e-8 relative bound
        ts, y = simulate_butterfly(DuhemParams(3.2, 1.7, 0.4), EXC, 4000, 1e-6, y0=1.0)
        dt = ts.dt
        dw = (ts.w[2:] - ts.w[:-2]) / (2 * dt)
        dy = (y[2:] - y[:-2]) / (2 * dt)
        resid = np.abs(dw - 2.0 * y[1:-1] * dy)
        assert resid.max() <= 1e-8 * np.abs(ts.w).max()


class TestGaussianNoise:
    def test_zero_percent_is_identity(self):
        ts = simulate_duhem(DuhemParams(0.4, 0.5, 0.25), EXC, 200, 1e-3)
        assert add_gaussian_noise(ts, 0.0, 7) is ts

    def test_noise_level_matches_request(self):
        ts = simulate_duhem(DuhemParams(0.4, 0.5, 0.25), EXC, 10000, 3e-4)
        noisy = add_gaussian_noise(ts, 5.0, 123)
        ratio = np.std(noisy.w - ts.w) / np.std(ts.w)
        assert 0.045 <= ratio <= 0.055

    def test_deterministic_under_seed(self):
        ts = simulate_duhem(DuhemParams(0.4, 0.5, 0.25), EXC, 500, 1e-3)
        a = add_gaussian_noise(ts, 3.0, 42)
        b = add_gaussian_noise(ts, 3.0, 42)
        np.testing.assert_array_equal(a.w, b.w)
        c = add_gaussian_noise(ts, 3.0, 43)
        assert not np.array_equal(a.w, c.w)

    def test_t_and_u_untouched(self):
        ts = simulate_duhem(DuhemParams(0.4, 0.5, 0.25), EXC, 500, 1e-3)
        noisy = add_gaussian_noise(ts, 10.0, 0)
        np.testing.assert_array_equal(noisy.t, ts.t)
        np.testing.assert_array_equal(noisy.u, ts.u)

    def test_negative_percent_rejected(self):
        ts = simulate_duhem(DuhemParams(0.4, 0.5, 0.25), EXC, 10, 1e-3)
        with pytest.raises(ValueError):
            add_gaussian_noise(ts, -1.0, 0)


@pytest.mark.parametrize("kind", ["duhem", "bouc-wen"])
def test_rk4_convergence_order(kind):
    # halving dt must cut the error against a fine reference by >= 8x
    # (observed order >= 3); measured on a window where neither u' nor w
    # changes sign, since the |.| kinks in the right-hand sides locally
    # reduce the smoothness RK4's order relies on
    if kind == "duhem":
        sim = lambda n, dt: simulate_duhem(DuhemParams(0.4, 0.5, 0.25), EXC, n, dt, w0=0.1)
    else:
        sim = lambda n, dt: simulate_bouc_wen(BoucWenParams(5.0, 0.25, 0.5, 1), EXC, n, dt, w0=0.1)
    base_dt = 0.02
    n = 11  # a fifth of a period: u' > 0 and w > 0 throughout
    ref = sim((n - 1) * 64 + 1, base_dt / 64)
    errs = []
    for k in (1, 2):
        coarse = sim((n - 1) * k + 1, base_dt / k)
        errs.append(np.abs(coarse.w - ref.w[::64 // k]).max())
    assert errs[0] / errs[1] >= 8.0

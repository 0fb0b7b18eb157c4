"""Synthetic hysteresis data: harmonic excitation driving Duhem-type,
Bouc-Wen and butterfly (squared Duhem) models, integrated with classical
fixed-step RK4.  The excitation and its derivative are evaluated
analytically at every RK4 substage, including the half-steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    DivergedSimulation,
    InvalidExcitation,
    MIN_SAMPLES,
    TimeSeries,
    TooShort,
    validate_series,
)

DIVERGENCE_LIMIT = 1e12


@dataclass(frozen=True)
class DuhemParams:
    """Shape parameters of w' = alpha |u'| u - beta |u'| w + gamma u'."""

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.alpha, self.beta, self.gamma)):
            raise ValueError("Duhem parameters must be finite")


@dataclass(frozen=True)
class BoucWenParams:
    """Parameters of w' = alpha u' - beta |u'| |w|^(n-1) w - gamma u' |w|^n."""

    alpha: float
    beta: float
    gamma: float
    n: int = 1

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.alpha, self.beta, self.gamma)):
            raise ValueError("Bouc-Wen parameters must be finite")
        if self.n < 1:
            raise ValueError(f"shape exponent n must be >= 1, got {self.n}")


@dataclass(frozen=True)
class HarmonicExcitation:
    """Decaying sinusoid u(t) = A exp(-decay t) sin(2 pi f t + phase)."""

    amplitude: float = 1.0
    frequency: float = 1.0
    phase: float = 0.0
    decay: float = 0.0

    def __post_init__(self):
        if self.amplitude <= 0:
            raise InvalidExcitation(f"amplitude must be > 0, got {self.amplitude}")
        if self.frequency <= 0:
            raise InvalidExcitation(f"frequency must be > 0, got {self.frequency}")
        if self.decay < 0:
            raise InvalidExcitation(f"decay must be >= 0, got {self.decay}")

    def value(self, t):
        """u at time t (scalar or array)."""
        t = np.asarray(t, dtype=float)
        omega = 2.0 * math.pi * self.frequency
        return self.amplitude * np.exp(-self.decay * t) * np.sin(omega * t + self.phase)

    def derivative(self, t):
        """Exact analytic u' at time t."""
        t = np.asarray(t, dtype=float)
        omega = 2.0 * math.pi * self.frequency
        ph = omega * t + self.phase
        env = self.amplitude * np.exp(-self.decay * t)
        return env * (omega * np.cos(ph) - self.decay * np.sin(ph))


def excitation_signal(exc: HarmonicExcitation, n_points: int, dt: float):
    """Sample u and its exact derivative on the uniform grid t_i = i dt."""
    if n_points < MIN_SAMPLES:
        raise TooShort(n_points)
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    t = np.arange(n_points) * dt
    return exc.value(t), exc.derivative(t)


def duhem_rhs(p: DuhemParams):
    a, b, g = p.alpha, p.beta, p.gamma

    def f(u, du, w):
        return a * abs(du) * u - b * abs(du) * w + g * du

    return f


def bouc_wen_rhs(p: BoucWenParams):
    a, b, g, n = p.alpha, p.beta, p.gamma, p.n

    if n == 1:
        # |w|^0 w is taken as w (continuous limit at w = 0)
        def f(u, du, w):
            return a * du - b * abs(du) * w - g * du * abs(w)
    else:
        def f(u, du, w):
            return a * du - b * abs(du) * abs(w) ** (n - 1) * w - g * du * abs(w) ** n

    return f


def _integrate(rhs, exc: HarmonicExcitation, n_points: int, dt: float, x0: float):
    """Fixed-step RK4 for a scalar state driven by the analytic excitation."""
    if n_points < MIN_SAMPLES:
        raise TooShort(n_points)
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    t = np.arange(n_points) * dt
    u_full = exc.value(t)
    du_full = exc.derivative(t)
    t_half = t[:-1] + 0.5 * dt
    u_half = exc.value(t_half)
    du_half = exc.derivative(t_half)

    out = np.empty(n_points)
    x = float(x0)
    out[0] = x
    half = 0.5 * dt
    sixth = dt / 6.0
    for i in range(n_points - 1):
        uf, df = u_full[i], du_full[i]
        uh, dh = u_half[i], du_half[i]
        k1 = rhs(uf, df, x)
        k2 = rhs(uh, dh, x + half * k1)
        k3 = rhs(uh, dh, x + half * k2)
        k4 = rhs(u_full[i + 1], du_full[i + 1], x + dt * k3)
        x = x + sixth * (k1 + 2.0 * (k2 + k3) + k4)
        if abs(x) > DIVERGENCE_LIMIT:
            raise DivergedSimulation(i + 1, abs(x))
        out[i + 1] = x
    return t, u_full, out


def simulate_duhem(p: DuhemParams, exc: HarmonicExcitation, n_points: int,
                   dt: float, w0: float = 0.0) -> TimeSeries:
    """Integrate the Duhem model under harmonic excitation."""
    t, u, w = _integrate(duhem_rhs(p), exc, n_points, dt, w0)
    return validate_series(TimeSeries(t, u, w))


def simulate_bouc_wen(p: BoucWenParams, exc: HarmonicExcitation, n_points: int,
                      dt: float, w0: float = 0.0) -> TimeSeries:
    """Integrate the Bouc-Wen model under harmonic excitation."""
    t, u, w = _integrate(bouc_wen_rhs(p), exc, n_points, dt, w0)
    return validate_series(TimeSeries(t, u, w))


def simulate_butterfly(p: DuhemParams, exc: HarmonicExcitation, n_points: int,
                       dt: float, y0: float = 0.0, offset: float = 0.0):
    """Butterfly response: integrate y with Duhem-form dynamics and report
    w = y^2 + offset.

    Returns (TimeSeries with the butterfly output w, y array).  The
    auxiliary y is what the two-stage fit uses as its inner signal.
    """
    t, u, y = _integrate(duhem_rhs(p), exc, n_points, dt, y0)
    w = y * y + offset
    return validate_series(TimeSeries(t, u, w)), y


def add_gaussian_noise(ts: TimeSeries, percent: float, seed: int) -> TimeSeries:
    """Corrupt the output channel with zero-mean Gaussian noise.

    The noise level is a percentage of the population standard deviation
    of the clean w.  t and u are never touched; the result is
    deterministic for a fixed seed.
    """
    if percent < 0:
        raise ValueError(f"noise percent must be >= 0, got {percent}")
    if percent == 0:
        return ts
    sigma = (percent / 100.0) * float(np.std(ts.w))
    rng = np.random.default_rng(seed)
    return TimeSeries(ts.t, ts.u, ts.w + rng.normal(0.0, sigma, size=len(ts.w)))

"""Second-order finite-difference time differentiation."""

from __future__ import annotations

import numpy as np

from .core import DerivedSeries, TimeSeries, TooShort, MIN_SAMPLES


def central_difference(values, dt: float) -> np.ndarray:
    """Differentiate a uniformly sampled signal.

    Interior points use the centered stencil (v[i+1] - v[i-1]) / (2 dt);
    the endpoints use one-sided three-point stencils of the same order, so
    the output has the same length as the input.  Exact on affine signals.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 1:
        raise ValueError("expected a 1-d sequence")
    if len(v) < MIN_SAMPLES:
        raise TooShort(len(v))
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    d = np.empty_like(v)
    d[1:-1] = (v[2:] - v[:-2]) / (2.0 * dt)
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dt)
    d[-1] = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * dt)
    return d


def differentiate_series(ts: TimeSeries) -> DerivedSeries:
    """Numerical u' and w' for a validated series."""
    dt = ts.dt
    return DerivedSeries(du=central_difference(ts.u, dt),
                         dw=central_difference(ts.w, dt))

"""Forward integration of discovered models and the error metrics used to
judge them.

Prediction is strictly input-driven: the exogenous u and u' come from the
measured data, never from re-differentiated predictions.  Values between
samples (RK4 half-steps) are interpolated from the sampled signals with a
four-point centered stencil, which keeps the integrator's own error well
below the finite-difference error of the fitting stage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    DerivedSeries,
    DerivFactor,
    DivergedSimulation,
    LengthMismatch,
    ConstantReference,
    MissingAuxModel,
    SparseModel,
    TimeSeries,
    ZeroReference,
)
from .generators import DIVERGENCE_LIMIT


@dataclass(frozen=True)
class Prediction:
    """Simulated output trajectory and its pointwise absolute error."""

    w_pred: np.ndarray
    abs_err: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "w_pred", np.asarray(self.w_pred, dtype=float))
        object.__setattr__(self, "abs_err", np.asarray(self.abs_err, dtype=float))
        if len(self.w_pred) != len(self.abs_err):
            raise LengthMismatch("w_pred and abs_err lengths differ")

    @property
    def max_abs_err(self) -> float:
        return float(np.max(self.abs_err))


def _compile_rhs(model: SparseModel):
    """Turn a sparse model into a fast scalar callable f(u, du, w, y)."""
    terms = [(c, int(d.deriv_factor), d.pow_u, d.pow_w, d.pow_abs_w, d.pow_y)
             for d, c in model.nonzero_items()]

    def rhs(u, du, w, y=0.0):
        total = 0.0
        for c, fac, pu, pw, paw, py in terms:
            v = c
            if fac == 1:
                v *= du
            elif fac == 2:
                v *= abs(du)
            if pu:
                v *= u ** pu
            if pw:
                v *= w ** pw
            if paw:
                v *= abs(w)
            if py:
                v *= y ** py
            total += v
        return total

    return rhs


def _midpoints(v: np.ndarray) -> np.ndarray:
    """Third/fourth-order interpolation of a sampled signal at half-steps."""
    v = np.asarray(v, dtype=float)
    mid = np.empty(len(v) - 1)
    mid[1:-1] = (-v[:-3] + 9.0 * v[1:-2] + 9.0 * v[2:-1] - v[3:]) / 16.0
    mid[0] = (3.0 * v[0] + 6.0 * v[1] - v[2]) / 8.0
    mid[-1] = (-v[-3] + 6.0 * v[-2] + 3.0 * v[-1]) / 8.0
    return mid


def integrate_model(model: SparseModel, ts: TimeSeries, ds: DerivedSeries,
                    w0: float, aux_model: SparseModel | None = None,
                    y0: float = 0.0) -> Prediction:
    """Integrate a discovered model along measured u, u' with fixed-step RK4.

    If any model term uses the auxiliary signal, ``aux_model`` provides
    the inner dynamics and the pair is integrated as a coupled state
    (w, y) starting from (w0, y0).
    """
    needs_aux = any(d.pow_y > 0 for d, _ in model.nonzero_items())
    if needs_aux and aux_model is None:
        raise MissingAuxModel("model has auxiliary terms but no aux model was given")
    if aux_model is not None and any(d.pow_y > 0 for d, _ in aux_model.nonzero_items()):
        raise MissingAuxModel("aux model must not itself contain auxiliary terms")
    n = len(ts)
    if len(ds) != n:
        raise LengthMismatch(f"series has {n} samples, derivatives have {len(ds)}")
    dt = ts.dt
    u, du = ts.u, ds.du
    uh, duh = _midpoints(u), _midpoints(du)

    f = _compile_rhs(model)
    g = _compile_rhs(aux_model) if aux_model is not None else None
    w_pred = np.empty(n)
    w = float(w0)
    y = float(y0)
    w_pred[0] = w
    half = 0.5 * dt
    sixth = dt / 6.0
    for i in range(n - 1):
        u0, d0 = u[i], du[i]
        um, dm = uh[i], duh[i]
        u1, d1 = u[i + 1], du[i + 1]
        if g is None:
            k1 = f(u0, d0, w, y)
            k2 = f(um, dm, w + half * k1, y)
            k3 = f(um, dm, w + half * k2, y)
            k4 = f(u1, d1, w + dt * k3, y)
        else:
            # inner model was fitted with y occupying the output slot
            l1 = g(u0, d0, y)
            k1 = f(u0, d0, w, y)
            l2 = g(um, dm, y + half * l1)
            k2 = f(um, dm, w + half * k1, y + half * l1)
            l3 = g(um, dm, y + half * l2)
            k3 = f(um, dm, w + half * k2, y + half * l2)
            l4 = g(u1, d1, y + dt * l3)
            k4 = f(u1, d1, w + dt * k3, y + dt * l3)
            y = y + sixth * (l1 + 2.0 * (l2 + l3) + l4)
            if abs(y) > DIVERGENCE_LIMIT:
                raise DivergedSimulation(i + 1, abs(y))
        w = w + sixth * (k1 + 2.0 * (k2 + k3) + k4)
        if abs(w) > DIVERGENCE_LIMIT:
            raise DivergedSimulation(i + 1, abs(w))
        w_pred[i + 1] = w
    return Prediction(w_pred=w_pred, abs_err=np.abs(ts.w - w_pred))


def relative_percent_error(w, w_pred) -> float:
    """100 * ||w_pred - w||_2 / ||w||_2."""
    w = np.asarray(w, dtype=float)
    w_pred = np.asarray(w_pred, dtype=float)
    if len(w) != len(w_pred):
        raise LengthMismatch("sequences have different lengths")
    denom = float(np.linalg.norm(w))
    if denom == 0:
        raise ZeroReference("reference signal has zero norm")
    return 100.0 * float(np.linalg.norm(w_pred - w)) / denom


def nrmse(w, w_pred) -> float:
    """Root-mean-square error normalized by the reference signal's range."""
    w = np.asarray(w, dtype=float)
    w_pred = np.asarray(w_pred, dtype=float)
    if len(w) != len(w_pred):
        raise LengthMismatch("sequences have different lengths")
    span = float(np.max(w) - np.min(w))
    if span == 0:
        raise ConstantReference("reference signal has zero range")
    rmse = math.sqrt(float(np.mean((w - w_pred) ** 2)))
    return rmse / span


def r2_score(w, w_pred) -> float:
    """Coefficient of determination, 1 for a perfect prediction."""
    w = np.asarray(w, dtype=float)
    w_pred = np.asarray(w_pred, dtype=float)
    if len(w) != len(w_pred):
        raise LengthMismatch("sequences have different lengths")
    ss_tot = float(np.sum((w - np.mean(w)) ** 2))
    if ss_tot == 0:
        raise ConstantReference("reference signal has zero variance")
    ss_res = float(np.sum((w - w_pred) ** 2))
    return 1.0 - ss_res / ss_tot

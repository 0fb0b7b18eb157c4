"""Least-squares solvers: ordinary, ridge, and sequentially thresholded.

The sequentially thresholded solver (STLSQ) alternates a least-squares
fit with hard thresholding of small coefficients until the active support
stops changing.  Thresholding always compares coefficients in original
(unnormalized) units, regardless of column normalization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import LibraryMatrix, ShapeMismatch, SparseModel


@dataclass(frozen=True)
class StlsqConfig:
    threshold: float
    max_sweeps: int = 10
    ridge_penalty: float = 0.0
    normalize_columns: bool = True

    def __post_init__(self):
        if self.threshold < 0:
            raise ValueError(f"threshold must be >= 0, got {self.threshold}")
        if self.max_sweeps < 1:
            raise ValueError(f"max_sweeps must be >= 1, got {self.max_sweeps}")
        if self.ridge_penalty < 0:
            raise ValueError(f"ridge_penalty must be >= 0, got {self.ridge_penalty}")


def _design(theta) -> np.ndarray:
    if isinstance(theta, LibraryMatrix):
        return theta.values
    a = np.asarray(theta, dtype=float)
    if a.ndim != 2:
        raise ShapeMismatch(f"design matrix must be 2-d, got shape {a.shape}")
    return a


def _check_shapes(a: np.ndarray, y: np.ndarray):
    if y.ndim != 1 or a.shape[0] != len(y):
        raise ShapeMismatch(f"matrix is {a.shape}, target has {len(y)} entries")
    if a.shape[0] < a.shape[1]:
        raise ShapeMismatch(
            f"underdetermined system: {a.shape[0]} rows < {a.shape[1]} columns")


def ols(theta, target) -> np.ndarray:
    """Minimum-norm least squares via an orthogonal factorization."""
    a = _design(theta)
    y = np.asarray(target, dtype=float)
    _check_shapes(a, y)
    coef, *_ = np.linalg.lstsq(a, y, rcond=None)
    return coef


def ridge(theta, target, penalty: float) -> np.ndarray:
    """L2-penalized least squares, solved as an augmented system.

    The rows ``sqrt(penalty) I`` are stacked under the design matrix so
    the solve goes through the same orthogonal factorization as ols
    instead of the normal equations.  penalty = 0 reduces to ols.
    """
    if penalty < 0:
        raise ValueError(f"penalty must be >= 0, got {penalty}")
    a = _design(theta)
    y = np.asarray(target, dtype=float)
    _check_shapes(a, y)
    if penalty == 0:
        coef, *_ = np.linalg.lstsq(a, y, rcond=None)
        return coef
    m = a.shape[1]
    a_aug = np.vstack([a, np.sqrt(penalty) * np.eye(m)])
    y_aug = np.concatenate([y, np.zeros(m)])
    coef, *_ = np.linalg.lstsq(a_aug, y_aug, rcond=None)
    return coef


def _solve(a, y, penalty):
    if penalty > 0:
        return ridge(a, y, penalty)
    coef, *_ = np.linalg.lstsq(a, y, rcond=None)
    return coef


def _stlsq_sweeps(a: np.ndarray, y: np.ndarray, cfg: StlsqConfig):
    """Run the STLSQ iteration; returns (coef, support_history, iterations,
    converged) with coefficients in original units.
    """
    m = a.shape[1]
    norms = np.linalg.norm(a, axis=0)
    if cfg.normalize_columns:
        scale = np.where(norms > 0, norms, 1.0)
        an = a / scale
        support = norms > 0
    else:
        scale = np.ones(m)
        an = a
        support = np.ones(m, dtype=bool)

    def fit(mask):
        c = np.zeros(m)
        if mask.any():
            c[mask] = _solve(an[:, mask], y, cfg.ridge_penalty) / scale[mask]
        return c

    coef = fit(support)
    history = [support.copy()]
    converged = False
    iterations = 0
    for sweep in range(1, cfg.max_sweeps + 1):
        iterations = sweep
        keep = support & (np.abs(coef) >= cfg.threshold)
        if (keep == support).all():
            converged = True
            break
        support = keep
        history.append(support.copy())
        if not support.any():
            coef = np.zeros(m)
            converged = True
            break
        coef = fit(support)

    if cfg.ridge_penalty == 0 and support.any():
        # report the surviving support refit in original units directly
        coef = np.zeros(m)
        coef[support] = _solve(a[:, support], y, 0.0)
    return coef, history, iterations, converged


def stlsq(theta: LibraryMatrix, target, cfg: StlsqConfig,
          target_name: str = "w") -> SparseModel:
    """Sequentially thresholded least squares over a term library.

    Columns are scaled to unit norm for the solves when
    ``cfg.normalize_columns`` is set (zero-norm columns are dropped from
    the support permanently), but the threshold acts on coefficients in
    original units; ties at the threshold survive.  Failure to reach a
    support fixed point within ``max_sweeps`` is not an error: the model
    is returned with ``converged=False``.
    """
    a = theta.values
    y = np.asarray(target, dtype=float)
    _check_shapes(a, y)
    coef, _, iterations, converged = _stlsq_sweeps(a, y, cfg)
    return SparseModel(coefficients=coef, terms=theta.terms,
                       threshold=cfg.threshold, iterations=iterations,
                       target_name=target_name, converged=converged)

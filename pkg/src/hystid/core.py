"""Domain types shared by the whole package.

Signals use a fixed naming convention: ``u`` is the excitation (input
voltage), ``w`` the response (output displacement), ``y`` an optional
auxiliary response used by the two-stage butterfly pipeline.  Candidate
library terms are products of an optional derivative factor (u' or |u'|)
with integer powers of u, w, |w| and y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

GRID_RTOL = 1e-9
MIN_SAMPLES = 4


class HysteresisError(Exception):
    """Base class for all errors raised by this package."""


class TooShort(HysteresisError):
    def __init__(self, n, minimum=MIN_SAMPLES):
        super().__init__(f"need at least {minimum} samples, got {n}")
        self.n = n


class NonUniformGrid(HysteresisError):
    def __init__(self, index, message):
        super().__init__(f"{message} (sample index {index})")
        self.index = index


class NonFinite(HysteresisError):
    def __init__(self, name, index):
        super().__init__(f"non-finite value in '{name}' at index {index}")
        self.name = name
        self.index = index


class InvalidExcitation(HysteresisError):
    pass


class DivergedSimulation(HysteresisError):
    def __init__(self, step, value):
        super().__init__(f"state magnitude {value:.3e} exceeded 1e12 at step {step}")
        self.step = step


class MissingAux(HysteresisError):
    pass


class MissingAuxModel(HysteresisError):
    pass


class LengthMismatch(HysteresisError):
    pass


class ShapeMismatch(HysteresisError):
    pass


class ZeroReference(HysteresisError):
    pass


class ConstantReference(HysteresisError):
    pass


class ParseError(HysteresisError):
    def __init__(self, path, row, column, detail):
        super().__init__(f"{path}: row {row}, column {column}: {detail}")
        self.row = row
        self.column = column


def _readonly(x) -> np.ndarray:
    a = np.asarray(x, dtype=float).copy()
    a.setflags(write=False)
    return a


class DerivFactor(IntEnum):
    """Derivative factor of a library term: 1, u' or |u'|.

    Integer values define the canonical ordering NONE < SIGNED < ABSOLUTE.
    """

    NONE = 0
    SIGNED = 1
    ABSOLUTE = 2


@dataclass(frozen=True)
class TermDescriptor:
    """Symbolic identity of one candidate library term.

    The constructor normalizes to canonical form: even powers of |w| fold
    into powers of w, so ``pow_abs_w`` is always 0 or 1.  Two descriptors
    are equal iff all fields are equal.
    """

    deriv_factor: DerivFactor = DerivFactor.NONE
    pow_u: int = 0
    pow_w: int = 0
    pow_abs_w: int = 0
    pow_y: int = 0

    def __post_init__(self):
        for f in ("pow_u", "pow_w", "pow_abs_w", "pow_y"):
            v = getattr(self, f)
            if not isinstance(v, (int, np.integer)) or v < 0:
                raise ValueError(f"{f} must be a nonnegative integer, got {v!r}")
        object.__setattr__(self, "deriv_factor", DerivFactor(self.deriv_factor))
        if self.pow_abs_w > 1:
            # |w|^(2k) == w^(2k) and |w|^(2k+1) == w^(2k) * |w|
            object.__setattr__(self, "pow_w", self.pow_w + self.pow_abs_w - self.pow_abs_w % 2)
            object.__setattr__(self, "pow_abs_w", self.pow_abs_w % 2)

    @property
    def poly_degree(self) -> int:
        """Total polynomial degree over u, w and |w| (y excluded)."""
        return self.pow_u + self.pow_w + self.pow_abs_w

    def sort_key(self):
        """Canonical library order: graded lexicographic."""
        return (self.poly_degree, int(self.deriv_factor),
                self.pow_u, self.pow_w, self.pow_abs_w, self.pow_y)

    @property
    def name(self) -> str:
        parts = []
        if self.deriv_factor == DerivFactor.SIGNED:
            parts.append("u'")
        elif self.deriv_factor == DerivFactor.ABSOLUTE:
            parts.append("|u'|")
        for sym, p in (("u", self.pow_u), ("w", self.pow_w)):
            if p == 1:
                parts.append(sym)
            elif p > 1:
                parts.append(f"{sym}^{p}")
        if self.pow_abs_w:
            parts.append("|w|")
        if self.pow_y == 1:
            parts.append("y")
        elif self.pow_y > 1:
            parts.append(f"y^{self.pow_y}")
        return "*".join(parts) if parts else "1"

    def __str__(self):
        return self.name


def canonicalize(d: TermDescriptor) -> TermDescriptor:
    """Return the canonical form of a descriptor (idempotent)."""
    return TermDescriptor(d.deriv_factor, d.pow_u, d.pow_w, d.pow_abs_w, d.pow_y)


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled record of excitation u(t) and response w(t)."""

    t: np.ndarray
    u: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "t", _readonly(self.t))
        object.__setattr__(self, "u", _readonly(self.u))
        object.__setattr__(self, "w", _readonly(self.w))

    def __len__(self):
        return len(self.t)

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])


@dataclass(frozen=True)
class DerivedSeries:
    """Time derivatives u', w' aligned with a parent TimeSeries."""

    du: np.ndarray
    dw: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "du", _readonly(self.du))
        object.__setattr__(self, "dw", _readonly(self.dw))
        if len(self.du) != len(self.dw):
            raise LengthMismatch(f"du has {len(self.du)} samples, dw has {len(self.dw)}")

    def __len__(self):
        return len(self.du)


def validate_series(ts: TimeSeries) -> TimeSeries:
    """Check all TimeSeries invariants and return the series unchanged.

    Raises TooShort, NonUniformGrid or NonFinite; error messages carry the
    offending sample index.
    """
    n = len(ts.t)
    if n < MIN_SAMPLES:
        raise TooShort(n)
    if len(ts.u) != n or len(ts.w) != n:
        raise LengthMismatch(
            f"t has {n} samples, u has {len(ts.u)}, w has {len(ts.w)}")
    for name, arr in (("t", ts.t), ("u", ts.u), ("w", ts.w)):
        bad = ~np.isfinite(arr)
        if bad.any():
            raise NonFinite(name, int(np.argmax(bad)))
    dt = ts.t[1] - ts.t[0]
    if dt <= 0:
        raise NonUniformGrid(1, "time stamps are not strictly increasing")
    steps = np.diff(ts.t)
    off = np.abs(steps - dt) > GRID_RTOL * abs(dt)
    if off.any():
        i = int(np.argmax(off)) + 1
        raise NonUniformGrid(
            i, f"grid spacing {steps[i - 1]:.12g} differs from dt {dt:.12g}")
    return ts


@dataclass(frozen=True)
class LibraryMatrix:
    """Evaluation of m candidate terms on n samples, columns in canonical order."""

    values: np.ndarray
    terms: tuple[TermDescriptor, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", _readonly(self.values))
        object.__setattr__(self, "terms", tuple(self.terms))
        if self.values.ndim != 2 or self.values.shape[1] != len(self.terms):
            raise ShapeMismatch(
                f"matrix is {self.values.shape}, have {len(self.terms)} terms")
        if len(set(self.terms)) != len(self.terms):
            raise ValueError("duplicate term descriptors in library")
        if not np.isfinite(self.values).all():
            bad = np.argwhere(~np.isfinite(self.values))[0]
            raise NonFinite(self.terms[bad[1]].name, int(bad[0]))

    @property
    def n_samples(self):
        return self.values.shape[0]

    @property
    def n_terms(self):
        return self.values.shape[1]

    def column_of(self, d: TermDescriptor) -> int:
        return self.terms.index(canonicalize(d))


@dataclass(frozen=True)
class SparseModel:
    """Sparse coefficient vector over a term library.

    Off-support coefficients are exactly zero.  ``target_name`` is "w" or
    "y" depending on which derivative the model predicts.
    """

    coefficients: np.ndarray
    terms: tuple[TermDescriptor, ...]
    threshold: float
    iterations: int = 1
    target_name: str = "w"
    converged: bool = True

    def __post_init__(self):
        object.__setattr__(self, "coefficients", _readonly(self.coefficients))
        object.__setattr__(self, "terms", tuple(self.terms))
        if len(self.coefficients) != len(self.terms):
            raise ShapeMismatch(
                f"{len(self.coefficients)} coefficients for {len(self.terms)} terms")
        if self.threshold < 0:
            raise ValueError("threshold must be >= 0")
        if self.target_name not in ("w", "y"):
            raise ValueError(f"target_name must be 'w' or 'y', got {self.target_name!r}")

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(int(j) for j in np.nonzero(self.coefficients)[0])

    @property
    def support_names(self) -> tuple[str, ...]:
        return tuple(self.terms[j].name for j in self.support)

    def nonzero_items(self):
        """Yield (descriptor, coefficient) pairs in canonical order."""
        for j in sorted(self.support, key=lambda j: self.terms[j].sort_key()):
            yield self.terms[j], float(self.coefficients[j])

    def coefficient_of(self, d: TermDescriptor) -> float:
        d = canonicalize(d)
        for j, t in enumerate(self.terms):
            if t == d:
                return float(self.coefficients[j])
        raise KeyError(f"term {d.name} not in library")


@dataclass(frozen=True)
class FitReport:
    """Metrics and timings for one fitted experiment."""

    model: SparseModel
    r_percent: float
    nrmse: float
    r2: float
    fit_seconds: float
    simulate_seconds: float
    noise_percent: float = 0.0

    def __post_init__(self):
        if self.r_percent < 0 or self.nrmse < 0:
            raise ValueError("error metrics must be nonnegative")
        if self.r2 > 1 + 1e-12:
            raise ValueError(f"r2 must be <= 1, got {self.r2}")


def _format_coef(c: float, precision: int) -> str:
    s = f"{c:.{precision}g}"
    # normalize "-0" and exponent zero padding produced by %g
    if float(s) == 0:
        return "0"
    return s


def render_equation(model: SparseModel, precision: int = 3) -> str:
    """Render a model as a deterministic, machine-parseable equation string.

    Only nonzero terms appear, in canonical library order, with
    coefficients rounded to ``precision`` significant digits.
    """
    if precision < 1:
        raise ValueError("precision must be >= 1")
    lhs = f"d{model.target_name}/dt"
    parts = []
    for d, c in model.nonzero_items():
        mag = _format_coef(abs(c), precision)
        body = mag if d.name == "1" else f"{mag}*{d.name}"
        if not parts:
            parts.append(f"-{body}" if math.copysign(1, c) < 0 else body)
        else:
            parts.append(f"{'-' if math.copysign(1, c) < 0 else '+'} {body}")
    if not parts:
        return f"{lhs} = 0"
    return f"{lhs} = " + " ".join(parts)

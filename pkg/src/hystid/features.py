"""Candidate-term library construction.

The term grammar is the product of an optional derivative factor (u' or
|u'|) with monomials in u, w and |w| up to a total degree cap, optionally
multiplied by the auxiliary signal y for the two-stage butterfly fit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    DerivedSeries,
    DerivFactor,
    LengthMismatch,
    LibraryMatrix,
    MissingAux,
    TermDescriptor,
    TimeSeries,
)

ALL_FACTORS = frozenset((DerivFactor.NONE, DerivFactor.SIGNED, DerivFactor.ABSOLUTE))
MAX_DEGREE_CAP = 4


@dataclass(frozen=True)
class LibrarySpec:
    """Describes which candidate terms to generate.

    include_abs_output controls whether |w| may appear as a factor; the
    butterfly preset disables it because a squared output is nonnegative,
    which would make every |w| column an exact duplicate of its w column.
    """

    max_poly_degree: int = 2
    include_deriv_factors: frozenset = ALL_FACTORS
    include_aux: bool = False
    include_abs_output: bool = True
    preset_name: str = "custom"

    def __post_init__(self):
        factors = frozenset(DerivFactor(f) for f in self.include_deriv_factors)
        if not factors:
            raise ValueError("at least one derivative factor must be enabled")
        object.__setattr__(self, "include_deriv_factors", factors)
        if not 0 <= self.max_poly_degree <= MAX_DEGREE_CAP:
            raise ValueError(
                f"max_poly_degree must be in [0, {MAX_DEGREE_CAP}], got {self.max_poly_degree}")


PRESETS = {
    "duhem-bouc-wen-poly": LibrarySpec(preset_name="duhem-bouc-wen-poly"),
    "butterfly-aux": LibrarySpec(include_aux=True, include_abs_output=False,
                                 preset_name="butterfly-aux"),
}


def preset(name: str) -> LibrarySpec:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(
            f"unknown library preset {name!r}; available: {sorted(PRESETS)}") from None


def enumerate_terms(spec: LibrarySpec) -> tuple[TermDescriptor, ...]:
    """All canonical descriptors admitted by the spec, in library order.

    Order is graded lexicographic: total polynomial degree, then the
    derivative factor (none < signed < absolute), then the individual
    powers.  Canonicalization removes duplicates such as |w|^2 vs w^2.
    """
    degree = spec.max_poly_degree
    abs_powers = range(degree + 1) if spec.include_abs_output else (0,)
    y_powers = (0, 1) if spec.include_aux else (0,)
    seen = set()
    for factor in spec.include_deriv_factors:
        for pu in range(degree + 1):
            for pw in range(degree + 1 - pu):
                for paw in abs_powers:
                    if pu + pw + paw > degree:
                        continue
                    for py in y_powers:
                        seen.add(TermDescriptor(factor, pu, pw, paw, py))
    return tuple(sorted(seen, key=TermDescriptor.sort_key))


def evaluate_term(d: TermDescriptor, u, du, w, y=None):
    """Pointwise value of one term; accepts scalars or aligned arrays."""
    if d.pow_y > 0 and y is None:
        raise MissingAux(f"term {d.name} needs the auxiliary signal y")
    v = np.ones_like(np.asarray(u, dtype=float))
    if d.deriv_factor == DerivFactor.SIGNED:
        v = v * du
    elif d.deriv_factor == DerivFactor.ABSOLUTE:
        v = v * np.abs(du)
    if d.pow_u:
        v = v * np.asarray(u, dtype=float) ** d.pow_u
    if d.pow_w:
        v = v * np.asarray(w, dtype=float) ** d.pow_w
    if d.pow_abs_w:
        v = v * np.abs(w)
    if d.pow_y:
        v = v * np.asarray(y, dtype=float) ** d.pow_y
    return v


def build_library(spec: LibrarySpec, ts: TimeSeries, ds: DerivedSeries,
                  aux=None) -> LibraryMatrix:
    """Evaluate every admitted term on the data.

    ``aux`` must be supplied exactly when the spec enables auxiliary
    terms; it is the measured y sequence of the butterfly pipeline.
    """
    n = len(ts)
    if len(ds) != n:
        raise LengthMismatch(f"series has {n} samples, derivatives have {len(ds)}")
    if spec.include_aux:
        if aux is None:
            raise MissingAux(f"preset {spec.preset_name!r} requires the auxiliary signal y")
        aux = np.asarray(aux, dtype=float)
        if len(aux) != n:
            raise LengthMismatch(f"series has {n} samples, aux has {len(aux)}")
    terms = enumerate_terms(spec)
    values = np.empty((n, len(terms)))
    for j, d in enumerate(terms):
        values[:, j] = evaluate_term(d, ts.u, ds.du, ts.w, aux)
    return LibraryMatrix(values, terms)

"""CSV ingestion and export, plus the line-oriented model file format.

Floats are written with shortest round-trip formatting (``repr``), so all
writers are byte-deterministic and files re-read to the values that were
written.  File-system failures surface as the built-in OSError family.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .core import (
    DerivFactor,
    FitReport,
    ParseError,
    SparseModel,
    TermDescriptor,
    TimeSeries,
    render_equation,
    validate_series,
)
from .simulate import Prediction

SERIES_HEADER = ("t", "u", "w")
PREDICTION_HEADER = ("t", "u", "w", "w_pred", "abs_err")


@dataclass(frozen=True)
class CsvSchema:
    """Column layout of a dataset file.

    Either ``time_col`` points at an explicit time column, or ``dt`` is a
    constant sampling period and t = i * dt is synthesized (for sources
    that ship uniformly sampled data with no time stamps).
    """

    time_col: int | None = 0
    input_col: int = 1
    output_col: int = 2
    has_header: bool = True
    delimiter: str = ","
    dt: float | None = None

    def __post_init__(self):
        if (self.time_col is None) == (self.dt is None):
            raise ValueError("exactly one of time_col and dt must be set")
        if self.dt is not None and self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        cols = [c for c in (self.time_col, self.input_col, self.output_col)
                if c is not None]
        if any(c < 0 for c in cols):
            raise ValueError("column indices must be nonnegative")
        if len(set(cols)) != len(cols):
            raise ValueError(f"column indices must be distinct, got {cols}")
        if len(self.delimiter) != 1:
            raise ValueError("delimiter must be a single character")


def read_csv(path, schema: CsvSchema = CsvSchema(),
             max_points: int | None = None) -> TimeSeries:
    """Load a dataset file into a validated TimeSeries.

    When ``max_points`` is given, only the first rows are kept
    (truncation, no resampling).
    """
    needed = max(c for c in (schema.time_col, schema.input_col, schema.output_col)
                 if c is not None)
    t, u, w = [], [], []

    def cell(row, line_no, col):
        if col >= len(row):
            raise ParseError(path, line_no, col, f"row has only {len(row)} columns")
        text = row[col].strip()
        try:
            return float(text)
        except ValueError:
            raise ParseError(path, line_no, col, f"not a number: {text!r}") from None

    with open(path, newline="") as fh:
        reader = csv.reader(fh, delimiter=schema.delimiter)
        for line_no, row in enumerate(reader, start=1):
            if schema.has_header and line_no == 1:
                continue
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) <= needed:
                raise ParseError(path, line_no, needed,
                                 f"row has only {len(row)} columns")
            if schema.time_col is not None:
                t.append(cell(row, line_no, schema.time_col))
            u.append(cell(row, line_no, schema.input_col))
            w.append(cell(row, line_no, schema.output_col))
            if max_points is not None and len(u) >= max_points:
                break
    if schema.dt is not None:
        t = np.arange(len(u)) * schema.dt
    return validate_series(TimeSeries(np.asarray(t), np.asarray(u), np.asarray(w)))


def write_series_csv(path, ts: TimeSeries, prediction: Prediction | None = None):
    """Write a series (plus optional prediction columns) as CSV."""
    with open(path, "w", newline="") as fh:
        if prediction is None:
            fh.write(",".join(SERIES_HEADER) + "\n")
            cols = (ts.t, ts.u, ts.w)
        else:
            if len(prediction.w_pred) != len(ts):
                raise ValueError("prediction length does not match series")
            fh.write(",".join(PREDICTION_HEADER) + "\n")
            cols = (ts.t, ts.u, ts.w, prediction.w_pred, prediction.abs_err)
        for row in zip(*cols):
            fh.write(",".join(repr(float(x)) for x in row) + "\n")


def parse_term_name(name: str) -> TermDescriptor:
    """Inverse of TermDescriptor.name."""
    factor = DerivFactor.NONE
    pu = pw = paw = py = 0
    for tok in name.split("*"):
        tok = tok.strip()
        if tok == "1" or not tok:
            continue
        if tok == "u'":
            factor = DerivFactor.SIGNED
        elif tok == "|u'|":
            factor = DerivFactor.ABSOLUTE
        elif tok == "|w|":
            paw += 1
        else:
            sym, _, p = tok.partition("^")
            try:
                power = int(p) if p else 1
            except ValueError:
                raise ValueError(f"cannot parse term factor {tok!r}") from None
            if sym == "u":
                pu += power
            elif sym == "w":
                pw += power
            elif sym == "y":
                py += power
            else:
                raise ValueError(f"cannot parse term factor {tok!r}")
    return TermDescriptor(factor, pu, pw, paw, py)


def write_model(path, model: SparseModel, report: FitReport | None = None,
                precision: int = 3):
    """Write a fitted model (and its report metrics) as a text file.

    Format: ``key = value`` metadata lines, one ``coefficient<TAB>name``
    line per nonzero term in canonical order, then the rendered equation.
    """
    lines = [
        f"threshold = {float(model.threshold)!r}",
        f"iterations = {model.iterations}",
        f"converged = {model.converged}",
        f"target = {model.target_name}",
    ]
    if report is not None:
        lines += [
            f"r_percent = {float(report.r_percent)!r}",
            f"nrmse = {float(report.nrmse)!r}",
            f"r2 = {float(report.r2)!r}",
            f"fit_seconds = {float(report.fit_seconds)!r}",
            f"simulate_seconds = {float(report.simulate_seconds)!r}",
            f"noise_percent = {float(report.noise_percent)!r}",
        ]
    for d, c in model.nonzero_items():
        lines.append(f"{c!r}\t{d.name}")
    lines.append(render_equation(model, precision))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_model(path):
    """Parse a model file back into (SparseModel, metadata dict).

    The reconstructed model carries exactly the nonzero terms of the file;
    coefficients round-trip through repr, far beyond 12 significant
    digits.
    """
    meta = {}
    terms = []
    coefs = []
    with open(path) as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if not line:
                continue
            if "\t" in line:
                c_text, name = line.split("\t", 1)
                terms.append(parse_term_name(name))
                coefs.append(float(c_text))
            elif line.startswith(("dw/dt", "dy/dt")):
                continue
            elif " = " in line:
                key, value = line.split(" = ", 1)
                meta[key.strip()] = value.strip()
    model = SparseModel(
        coefficients=np.asarray(coefs, dtype=float),
        terms=tuple(terms),
        threshold=float(meta.get("threshold", 0.0)),
        iterations=int(meta.get("iterations", 1)),
        target_name=meta.get("target", "w"),
        converged=meta.get("converged", "True") == "True",
    )
    return model, meta

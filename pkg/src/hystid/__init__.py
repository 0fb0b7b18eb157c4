"""hystid: sparse identification of white-box hysteresis ODE models.

Workflow: simulate or load (t, u, w) data, differentiate it, build a
candidate term library, run sequentially thresholded least squares, and
validate the discovered equation by forward simulation.
"""

from .core import (
    ConstantReference,
    DerivedSeries,
    DerivFactor,
    DivergedSimulation,
    FitReport,
    HysteresisError,
    InvalidExcitation,
    LengthMismatch,
    LibraryMatrix,
    MissingAux,
    MissingAuxModel,
    NonFinite,
    NonUniformGrid,
    ParseError,
    ShapeMismatch,
    SparseModel,
    TermDescriptor,
    TimeSeries,
    TooShort,
    ZeroReference,
    canonicalize,
    render_equation,
    validate_series,
)
from .diff import central_difference, differentiate_series
from .features import LibrarySpec, PRESETS, build_library, enumerate_terms, evaluate_term, preset
from .generators import (
    BoucWenParams,
    DuhemParams,
    HarmonicExcitation,
    add_gaussian_noise,
    excitation_signal,
    simulate_bouc_wen,
    simulate_butterfly,
    simulate_duhem,
)
from .io import CsvSchema, parse_term_name, read_csv, read_model, write_model, write_series_csv
from .regress import StlsqConfig, ols, ridge, stlsq
from .simulate import Prediction, integrate_model, nrmse, r2_score, relative_percent_error

__version__ = "0.1.0"

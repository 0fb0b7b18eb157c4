"""Command-line driver and script-level pipeline helpers.

Commands: gen, fit, predict, bench, butterfly.  Exit codes: 0 success,
1 runtime failure, 2 invalid arguments.  Paper-style experiment defaults
are baked into the EXPERIMENTS table so each reference dataset can be
regenerated with ``gen --defaults-from <name>``.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from time import perf_counter

import numpy as np

from .core import (
    FitReport,
    HysteresisError,
    InvalidExcitation,
    MissingAux,
    SparseModel,
    TermDescriptor,
    DerivFactor,
    TimeSeries,
    TooShort,
    canonicalize,
    render_equation,
    validate_series,
)
from .diff import differentiate_series
from .features import LibrarySpec, PRESETS, build_library, evaluate_term, preset
from .generators import (
    BoucWenParams,
    DuhemParams,
    HarmonicExcitation,
    add_gaussian_noise,
    simulate_bouc_wen,
    simulate_duhem,
    simulate_butterfly,
)
from .io import CsvSchema, read_csv, read_model, write_model, write_series_csv
from .regress import StlsqConfig, ols, ridge, stlsq
from .core import LibraryMatrix
from .simulate import (
    Prediction,
    integrate_model,
    nrmse,
    r2_score,
    relative_percent_error,
)

# Defaults shared by the simulated experiments.  10000 samples at 0.3 ms
# cover three full periods of the default 1 Hz excitation.
DEFAULT_EXCITATION = HarmonicExcitation(amplitude=1.0, frequency=1.0, phase=0.0, decay=0.0)
DEFAULT_POINTS = 10_000
DEFAULT_DT = 3e-4
DEFAULT_THRESHOLD = 0.1
REAL_DATA_THRESHOLD = 0.01

DUHEM_PARAMS = DuhemParams(0.4, 0.5, 0.25)
BOUC_WEN_PARAMS = BoucWenParams(5.0, 0.25, 0.5, 1)
BOUC_WEN_NOISE_PARAMS = BoucWenParams(0.4, 0.5, 0.25, 1)
BOUC_WEN_SWEEP_PARAMS = BoucWenParams(1.0, 0.5, 2.0, 1)
BUTTERFLY_PARAMS = DuhemParams(3.2, 1.7, 0.4)

# Benchmark protocols.  The size sweep refines a fixed two-period window,
# so the finite-difference error (the only error source on clean data)
# shrinks quadratically with the training size.  The noise study needs a
# different regime: differencing amplifies output noise by 1/dt, so it
# uses a coarser step and a long record for averaging, and it drives the
# loop hard (large decaying amplitude) because a single thin steady loop
# leaves the static library terms mutually collinear and the support
# unidentifiable under noise.  Errors of noisy fits are reported against
# the clean trajectory; a noisy reference would floor R at the noise
# level itself.
SWEEP_PERIODS = 2.0
NOISE_STUDY_POINTS = 100_000
NOISE_STUDY_DT = 5e-3
NOISE_STUDY_EXCITATION = HarmonicExcitation(
    amplitude=3.0, frequency=1.0, phase=0.0,
    decay=2.0 / (NOISE_STUDY_POINTS * NOISE_STUDY_DT))
BENCH_RIDGE_PENALTY = 1.0


def duhem_feature_terms() -> tuple[TermDescriptor, ...]:
    """The exact candidate terms of the Duhem right-hand side."""
    terms = (
        TermDescriptor(DerivFactor.ABSOLUTE, pow_u=1),
        TermDescriptor(DerivFactor.ABSOLUTE, pow_w=1),
        TermDescriptor(DerivFactor.SIGNED),
    )
    return tuple(sorted(terms, key=TermDescriptor.sort_key))


def bouc_wen_feature_terms(n: int = 1) -> tuple[TermDescriptor, ...]:
    """The exact candidate terms of the Bouc-Wen right-hand side."""
    terms = (
        TermDescriptor(DerivFactor.SIGNED),
        TermDescriptor(DerivFactor.ABSOLUTE, pow_w=1, pow_abs_w=n - 1),
        TermDescriptor(DerivFactor.SIGNED, pow_abs_w=n),
    )
    return tuple(sorted(terms, key=TermDescriptor.sort_key))


def discover_model(ts: TimeSeries, *, preset_name: str = "duhem-bouc-wen-poly",
                   threshold: float = DEFAULT_THRESHOLD, max_sweeps: int = 10,
                   ridge_penalty: float = 0.0, normalize_columns: bool = True,
                   aux=None, target_name: str = "w"):
    """Differentiate, build the library, and run STLSQ.

    Returns (model, fit_seconds); the timing covers the regression only.
    """
    validate_series(ts)
    ds = differentiate_series(ts)
    lib = build_library(preset(preset_name), ts, ds, aux)
    cfg = StlsqConfig(threshold=threshold, max_sweeps=max_sweeps,
                      ridge_penalty=ridge_penalty,
                      normalize_columns=normalize_columns)
    start = perf_counter()
    model = stlsq(lib, ds.dw, cfg, target_name=target_name)
    return model, perf_counter() - start


def evaluate_model(model: SparseModel, eval_ts: TimeSeries, *,
                   aux_model: SparseModel | None = None, y0: float = 0.0,
                   fit_seconds: float = 0.0, noise_percent: float = 0.0):
    """Forward-simulate a model over a series and score it.

    Returns (FitReport, Prediction).  The simulation timing covers the
    integration only.
    """
    eval_ds = differentiate_series(eval_ts)
    start = perf_counter()
    pred = integrate_model(model, eval_ts, eval_ds, w0=float(eval_ts.w[0]),
                           aux_model=aux_model, y0=y0)
    simulate_seconds = perf_counter() - start
    report = FitReport(
        model=model,
        r_percent=relative_percent_error(eval_ts.w, pred.w_pred),
        nrmse=nrmse(eval_ts.w, pred.w_pred),
        r2=r2_score(eval_ts.w, pred.w_pred),
        fit_seconds=fit_seconds,
        simulate_seconds=simulate_seconds,
        noise_percent=noise_percent,
    )
    return report, pred


def fit_series(ts: TimeSeries, *, eval_ts: TimeSeries | None = None,
               noise_percent: float = 0.0, **kwargs):
    """discover_model + evaluate_model in one call.

    ``eval_ts`` selects the reference trajectory for the error metrics;
    by default the model is scored against its own training series.
    """
    model, fit_seconds = discover_model(ts, **kwargs)
    return evaluate_model(model, eval_ts if eval_ts is not None else ts,
                          fit_seconds=fit_seconds, noise_percent=noise_percent)


def fit_fixed_features(ts: TimeSeries, terms, *, method: str = "ols",
                       ridge_penalty: float = BENCH_RIDGE_PENALTY,
                       eval_ts: TimeSeries | None = None,
                       noise_percent: float = 0.0):
    """Baseline fit on a fixed, fully dense feature set (no thresholding)."""
    validate_series(ts)
    ds = differentiate_series(ts)
    terms = tuple(sorted({canonicalize(d) for d in terms},
                         key=TermDescriptor.sort_key))
    values = np.column_stack(
        [evaluate_term(d, ts.u, ds.du, ts.w) for d in terms])
    lib = LibraryMatrix(values, terms)
    start = perf_counter()
    if method == "ols":
        coef = ols(lib, ds.dw)
    elif method == "ridge":
        coef = ridge(lib, ds.dw, ridge_penalty)
    else:
        raise ValueError(f"unknown baseline method {method!r}")
    fit_seconds = perf_counter() - start
    model = SparseModel(coefficients=coef, terms=terms, threshold=0.0,
                        iterations=1, target_name="w")
    return evaluate_model(model, eval_ts if eval_ts is not None else ts,
                          fit_seconds=fit_seconds, noise_percent=noise_percent)


@dataclass(frozen=True)
class ButterflyResult:
    inner: FitReport
    outer: FitReport
    ratios: dict
    prediction: Prediction


def butterfly_coefficient_ratios(inner: SparseModel, outer: SparseModel) -> dict:
    """Outer/inner coefficient ratio per inner support term.

    Multiplying an inner term by y and folding even y powers through
    w = y^2 gives the matching outer descriptor; the ratio is 2 exactly
    when the identity w' = 2 y y' holds.
    """
    ratios = {}
    for d, c in inner.nonzero_items():
        if d.pow_abs_w or d.pow_y:
            continue
        k = d.pow_w + 1
        mapped = TermDescriptor(d.deriv_factor, d.pow_u, k // 2, 0, k % 2)
        try:
            ratios[d.name] = outer.coefficient_of(mapped) / c
        except KeyError:
            ratios[d.name] = 0.0
    return ratios


def fit_butterfly(ts: TimeSeries, y, *, threshold: float = DEFAULT_THRESHOLD,
                  max_sweeps: int = 10, normalize_columns: bool = True) -> ButterflyResult:
    """Two-stage butterfly fit.

    Stage 1 discovers the inner dynamics y' from (u, y); stage 2
    discovers w' over the base terms augmented with the measured y.  The
    outer model is then scored by coupled forward simulation, with y
    re-integrated from its own discovered model.
    """
    y = np.asarray(y, dtype=float)
    if len(y) != len(ts):
        raise MissingAux(f"aux series has {len(y)} samples, data has {len(ts)}")
    ts_inner = TimeSeries(ts.t, ts.u, y)
    inner_model, fs1 = discover_model(
        ts_inner, preset_name="duhem-bouc-wen-poly", threshold=threshold,
        max_sweeps=max_sweeps, normalize_columns=normalize_columns,
        target_name="y")
    inner_report, _ = evaluate_model(inner_model, ts_inner, fit_seconds=fs1)

    outer_model, fs2 = discover_model(
        ts, preset_name="butterfly-aux", threshold=threshold,
        max_sweeps=max_sweeps, normalize_columns=normalize_columns,
        aux=y, target_name="w")
    outer_report, pred = evaluate_model(
        outer_model, ts, aux_model=inner_model, y0=float(y[0]), fit_seconds=fs2)
    return ButterflyResult(inner=inner_report, outer=outer_report,
                           ratios=butterfly_coefficient_ratios(inner_model, outer_model),
                           prediction=pred)


# ---------------------------------------------------------------------------
# benchmark harness


@dataclass(frozen=True)
class BenchRow:
    method: str
    size: int
    noise: float
    threshold: float
    r_percent: float
    fit_seconds: float
    seed: int


@lru_cache(maxsize=32)
def _cached_series(kind: str, params, exc: HarmonicExcitation, n: int, dt: float):
    if kind == "duhem":
        return simulate_duhem(params, exc, n, dt)
    return simulate_bouc_wen(params, exc, n, dt)


def _bench_cell(ts_fit: TimeSeries, ts_eval: TimeSeries, method: str, *,
                feature_terms, threshold: float, ridge_penalty: float,
                noise_percent: float):
    if method == "stlsq":
        report, _ = fit_series(ts_fit, eval_ts=ts_eval, threshold=threshold,
                               noise_percent=noise_percent)
    elif method in ("ols", "ridge"):
        report, _ = fit_fixed_features(ts_fit, feature_terms, method=method,
                                       ridge_penalty=ridge_penalty,
                                       eval_ts=ts_eval,
                                       noise_percent=noise_percent)
    else:
        raise ValueError(f"unknown method {method!r}")
    return report


def bench_size_sweep(sizes=(1000, 5000, 10000), methods=("stlsq", "ols", "ridge"),
                     n_seeds: int = 1, base_seed: int = 0, *,
                     params: BoucWenParams = BOUC_WEN_SWEEP_PARAMS,
                     threshold: float = DEFAULT_THRESHOLD,
                     ridge_penalty: float = BENCH_RIDGE_PENALTY,
                     exc: HarmonicExcitation = DEFAULT_EXCITATION,
                     mismatched_library: bool = False,
                     duhem_params: DuhemParams = DUHEM_PARAMS) -> list[BenchRow]:
    """Clean-data training-size sweep.

    A fixed window of SWEEP_PERIODS excitation periods is sampled with n
    points, so larger n means a finer grid.  In mismatched mode the data
    come from the Duhem model while the dense baselines keep the Bouc-Wen
    feature set; the sparse method always searches the full library.
    """
    if not methods:
        raise ValueError("method list is empty")
    rows = []
    for size in sizes:
        dt = SWEEP_PERIODS / (exc.frequency * size)
        if mismatched_library:
            ts = _cached_series("duhem", duhem_params, exc, size, dt)
        else:
            ts = _cached_series("bouc-wen", params, exc, size, dt)
        features = bouc_wen_feature_terms(params.n)
        for rep in range(n_seeds):
            seed = base_seed + rep
            for method in methods:
                report = _bench_cell(ts, ts, method, feature_terms=features,
                                     threshold=threshold,
                                     ridge_penalty=ridge_penalty,
                                     noise_percent=0.0)
                rows.append(BenchRow(method, size, 0.0, threshold,
                                     report.r_percent, report.fit_seconds, seed))
    return rows


def bench_noise_sweep(noises=(1.0, 5.0), methods=("stlsq", "ols", "ridge"),
                      n_seeds: int = 1, base_seed: int = 0, *,
                      params: BoucWenParams = BOUC_WEN_NOISE_PARAMS,
                      threshold: float = DEFAULT_THRESHOLD,
                      ridge_penalty: float = BENCH_RIDGE_PENALTY,
                      exc: HarmonicExcitation = DEFAULT_EXCITATION,
                      n_points: int = NOISE_STUDY_POINTS,
                      dt: float = NOISE_STUDY_DT) -> list[BenchRow]:
    """Gaussian-noise robustness study.

    The fit sees the corrupted output; the reported error compares the
    simulated trajectory against the clean series, which is the only
    reference under which sub-noise-floor errors are meaningful.
    """
    if not methods:
        raise ValueError("method list is empty")
    clean = _cached_series("bouc-wen", params, exc, n_points, dt)
    features = bouc_wen_feature_terms(params.n)
    rows = []
    for noise in noises:
        for rep in range(n_seeds):
            seed = base_seed + rep
            noisy = add_gaussian_noise(clean, noise, seed)
            for method in methods:
                report = _bench_cell(noisy, clean, method,
                                     feature_terms=features,
                                     threshold=threshold,
                                     ridge_penalty=ridge_penalty,
                                     noise_percent=noise)
                rows.append(BenchRow(method, n_points, noise, threshold,
                                     report.r_percent, report.fit_seconds, seed))
    return rows


def write_bench_csv(path, rows):
    with open(path, "w") as fh:
        fh.write("method,size,noise,threshold,R_percent,fit_seconds\n")
        for r in rows:
            fh.write(f"{r.method},{r.size},{float(r.noise)!r},"
                     f"{float(r.threshold)!r},{float(r.r_percent)!r},"
                     f"{float(r.fit_seconds)!r}\n")


# ---------------------------------------------------------------------------
# experiment defaults

EXPERIMENTS = {
    "duhem": dict(model="duhem", alpha=0.4, beta=0.5, gamma=0.25,
                  threshold=DEFAULT_THRESHOLD),
    "bouc-wen": dict(model="bouc-wen", alpha=5.0, beta=0.25, gamma=0.5, n=1,
                     threshold=DEFAULT_THRESHOLD),
    "bouc-wen-noise": dict(model="bouc-wen", alpha=0.4, beta=0.5, gamma=0.25,
                           n=1, noise=5.0, threshold=DEFAULT_THRESHOLD,
                           points=NOISE_STUDY_POINTS, dt=NOISE_STUDY_DT),
    "size-sweep": dict(model="bouc-wen", alpha=1.0, beta=0.5, gamma=2.0, n=1,
                       threshold=DEFAULT_THRESHOLD),
    "butterfly": dict(model="butterfly", alpha=3.2, beta=1.7, gamma=0.4,
                      threshold=DEFAULT_THRESHOLD),
    "actuator": dict(threshold=REAL_DATA_THRESHOLD, max_points=15000),
}


# ---------------------------------------------------------------------------
# argparse plumbing


def _add_excitation_flags(p):
    p.add_argument("--amplitude", type=float, default=None, help="excitation amplitude [V]")
    p.add_argument("--frequency", type=float, default=None, help="excitation frequency [Hz]")
    p.add_argument("--phase", type=float, default=None, help="excitation phase [rad]")
    p.add_argument("--decay", type=float, default=None, help="exponential decay rate [1/s]")


def _add_schema_flags(p):
    p.add_argument("--time-col", type=int, default=0)
    p.add_argument("--input-col", type=int, default=1)
    p.add_argument("--output-col", type=int, default=2)
    p.add_argument("--no-header", action="store_true", help="file has no header row")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--csv-dt", type=float, default=None,
                   help="synthesize t = i*dt instead of reading a time column")


def _schema_from(args) -> CsvSchema:
    if args.csv_dt is not None:
        return CsvSchema(time_col=None, input_col=args.input_col,
                         output_col=args.output_col, has_header=not args.no_header,
                         delimiter=args.delimiter, dt=args.csv_dt)
    return CsvSchema(time_col=args.time_col, input_col=args.input_col,
                     output_col=args.output_col, has_header=not args.no_header,
                     delimiter=args.delimiter)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hystid",
        description="Discover sparse white-box hysteresis ODE models from "
                    "input-output time series.")
    parser.add_argument("--seed", type=int, default=0, help="base RNG seed")
    parser.add_argument("--out-dir", default=".", help="directory for output files")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a synthetic hysteresis dataset")
    g.add_argument("model", choices=("duhem", "bouc-wen", "butterfly"))
    g.add_argument("--defaults-from", choices=sorted(EXPERIMENTS),
                   help="load parameter defaults of a named experiment")
    g.add_argument("--alpha", type=float, default=None)
    g.add_argument("--beta", type=float, default=None)
    g.add_argument("--gamma", type=float, default=None)
    g.add_argument("--n", type=int, default=None, help="Bouc-Wen shape exponent")
    g.add_argument("--w0", type=float, default=0.0, help="initial output")
    g.add_argument("--offset", type=float, default=0.0,
                   help="butterfly output offset c in w = y^2 + c")
    g.add_argument("--points", type=int, default=None)
    g.add_argument("--dt", type=float, default=None)
    g.add_argument("--noise", type=float, default=None, help="output noise percent")
    _add_excitation_flags(g)
    g.add_argument("--out", default=None, help="output CSV (default <model>.csv)")
    g.set_defaults(func=cmd_gen)

    f = sub.add_parser("fit", help="fit a sparse model to a dataset CSV")
    f.add_argument("--input", required=True)
    f.add_argument("--library", default="duhem-bouc-wen-poly",
                   help=f"library preset, one of {sorted(PRESETS)}")
    f.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    f.add_argument("--max-sweeps", type=int, default=10)
    f.add_argument("--ridge-penalty", type=float, default=0.0)
    f.add_argument("--no-normalize", action="store_true",
                   help="disable library column normalization")
    f.add_argument("--max-points", type=int, default=None)
    f.add_argument("--aux", default=None,
                   help="series CSV holding the auxiliary y signal in its output column")
    f.add_argument("--out", default=None, help="model file (default model.txt)")
    _add_schema_flags(f)
    f.set_defaults(func=cmd_fit)

    p = sub.add_parser("predict", help="simulate a fitted model over a dataset")
    p.add_argument("--model", required=True, help="model file from fit")
    p.add_argument("--input", required=True)
    p.add_argument("--aux-model", default=None,
                   help="inner model file for coupled butterfly prediction")
    p.add_argument("--y0", type=float, default=None,
                   help="initial aux value (default: first aux sample, else 0)")
    p.add_argument("--max-points", type=int, default=None)
    p.add_argument("--out", default=None, help="prediction CSV (default prediction.csv)")
    _add_schema_flags(p)
    p.set_defaults(func=cmd_predict)

    b = sub.add_parser("bench", help="benchmark stlsq against dense baselines")
    b.add_argument("--sizes", default="1000,5000,10000",
                   help="comma list of training sizes for the clean sweep; "
                        "empty to skip")
    b.add_argument("--noise", default="",
                   help="comma list of noise percents for the noise study; "
                        "empty to skip")
    b.add_argument("--methods", default="stlsq,ols,ridge")
    b.add_argument("--seeds", type=int, default=1, help="repetitions per cell")
    b.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    b.add_argument("--ridge-penalty", type=float, default=BENCH_RIDGE_PENALTY)
    b.add_argument("--mismatched-library", action="store_true",
                   help="Duhem data with Bouc-Wen features for the baselines")
    b.add_argument("--out", default=None, help="results CSV (default bench.csv)")
    b.set_defaults(func=cmd_bench)

    bf = sub.add_parser("butterfly", help="two-stage butterfly hysteresis fit")
    bf.add_argument("--input", default=None, help="butterfly series CSV")
    bf.add_argument("--aux", default=None, help="aux series CSV (y in its output column)")
    bf.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    bf.add_argument("--alpha", type=float, default=BUTTERFLY_PARAMS.alpha)
    bf.add_argument("--beta", type=float, default=BUTTERFLY_PARAMS.beta)
    bf.add_argument("--gamma", type=float, default=BUTTERFLY_PARAMS.gamma)
    bf.add_argument("--offset", type=float, default=0.0)
    bf.add_argument("--points", type=int, default=None)
    bf.add_argument("--dt", type=float, default=None)
    _add_excitation_flags(bf)
    bf.add_argument("--out-prefix", default="butterfly",
                    help="prefix for the two model files")
    _add_schema_flags(bf)
    bf.set_defaults(func=cmd_butterfly)

    return parser


def _excitation_from(args) -> HarmonicExcitation:
    return HarmonicExcitation(
        amplitude=args.amplitude if args.amplitude is not None else DEFAULT_EXCITATION.amplitude,
        frequency=args.frequency if args.frequency is not None else DEFAULT_EXCITATION.frequency,
        phase=args.phase if args.phase is not None else DEFAULT_EXCITATION.phase,
        decay=args.decay if args.decay is not None else DEFAULT_EXCITATION.decay,
    )


def _out_path(args, name) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out / name


def cmd_gen(args) -> int:
    if args.defaults_from:
        defaults = EXPERIMENTS[args.defaults_from]
        if defaults.get("model") not in (None, args.model):
            raise ValueError(
                f"experiment {args.defaults_from!r} is a {defaults['model']} "
                f"experiment, not {args.model}")
        for key, value in defaults.items():
            if key in ("model", "threshold", "max_points"):
                continue
            if getattr(args, key, None) is None:
                setattr(args, key, value)
    base = {"duhem": DUHEM_PARAMS, "bouc-wen": BOUC_WEN_PARAMS,
            "butterfly": BUTTERFLY_PARAMS}[args.model]
    alpha = args.alpha if args.alpha is not None else base.alpha
    beta = args.beta if args.beta is not None else base.beta
    gamma = args.gamma if args.gamma is not None else base.gamma
    points = args.points if args.points is not None else DEFAULT_POINTS
    dt = args.dt if args.dt is not None else DEFAULT_DT
    noise = args.noise if args.noise is not None else 0.0
    exc = _excitation_from(args)

    aux = None
    if args.model == "duhem":
        ts = simulate_duhem(DuhemParams(alpha, beta, gamma), exc, points, dt, args.w0)
    elif args.model == "bouc-wen":
        n = args.n if args.n is not None else base.n
        ts = simulate_bouc_wen(BoucWenParams(alpha, beta, gamma, n), exc,
                               points, dt, args.w0)
    else:
        ts, aux = simulate_butterfly(DuhemParams(alpha, beta, gamma), exc,
                                     points, dt, args.w0, args.offset)
    if noise > 0:
        ts = add_gaussian_noise(ts, noise, args.seed)

    out = _out_path(args, args.out or f"{args.model}.csv")
    write_series_csv(out, ts)
    print(f"wrote {len(ts)} samples to {out}")
    if aux is not None:
        aux_path = out.with_name(out.stem + ".aux" + out.suffix)
        write_series_csv(aux_path, TimeSeries(ts.t, ts.u, aux))
        print(f"wrote auxiliary series to {aux_path}")
    return 0


def cmd_fit(args) -> int:
    if args.library not in PRESETS:
        raise ValueError(
            f"unknown library preset {args.library!r}; available: {sorted(PRESETS)}")
    schema = _schema_from(args)
    ts = read_csv(args.input, schema, args.max_points)
    aux = None
    if args.aux is not None:
        aux = read_csv(args.aux, schema, args.max_points).w
    report, _ = fit_series(ts, preset_name=args.library, threshold=args.threshold,
                           max_sweeps=args.max_sweeps,
                           ridge_penalty=args.ridge_penalty,
                           normalize_columns=not args.no_normalize, aux=aux)
    out = _out_path(args, args.out or "model.txt")
    write_model(out, report.model, report)
    print(render_equation(report.model))
    print(f"R = {report.r_percent:.6g} %   (NRMSE {report.nrmse:.4g}, "
          f"R2 {report.r2:.6g}, fit {report.fit_seconds:.4g} s)")
    print(f"wrote model to {out}")
    return 0


def cmd_predict(args) -> int:
    model, _ = read_model(args.model)
    aux_model = None
    if args.aux_model is not None:
        aux_model, _ = read_model(args.aux_model)
    ts = read_csv(args.input, _schema_from(args), args.max_points)
    ds = differentiate_series(ts)
    y0 = args.y0 if args.y0 is not None else 0.0
    pred = integrate_model(model, ts, ds, w0=float(ts.w[0]),
                           aux_model=aux_model, y0=y0)
    out = _out_path(args, args.out or "prediction.csv")
    write_series_csv(out, ts, pred)
    print(f"R = {relative_percent_error(ts.w, pred.w_pred):.6g} %")
    print(f"NRMSE = {nrmse(ts.w, pred.w_pred):.6g}")
    print(f"R2 = {r2_score(ts.w, pred.w_pred):.6g}")
    print(f"wrote prediction to {out}")
    return 0


def _int_list(text):
    return [int(x) for x in text.split(",") if x.strip()]


def _float_list(text):
    return [float(x) for x in text.split(",") if x.strip()]


def cmd_bench(args) -> int:
    methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    if not methods:
        raise ValueError("method list is empty")
    for m in methods:
        if m not in ("stlsq", "ols", "ridge"):
            raise ValueError(f"unknown method {m!r}")
    sizes = _int_list(args.sizes)
    noises = _float_list(args.noise)
    if not sizes and not noises:
        raise ValueError("nothing to run: both size and noise sweeps are empty")
    rows = []
    if sizes:
        rows += bench_size_sweep(sizes, methods, args.seeds, args.seed,
                                 threshold=args.threshold,
                                 ridge_penalty=args.ridge_penalty,
                                 mismatched_library=args.mismatched_library)
    if noises:
        rows += bench_noise_sweep(noises, methods, args.seeds, args.seed,
                                  threshold=args.threshold,
                                  ridge_penalty=args.ridge_penalty)
    out = _out_path(args, args.out or "bench.csv")
    write_bench_csv(out, rows)
    for r in rows:
        print(f"{r.method:6s} size={r.size:<7d} noise={r.noise:<4g} "
              f"R={r.r_percent:.6g} %  fit={r.fit_seconds:.4g} s")
    print(f"wrote {len(rows)} rows to {out}")
    return 0


def cmd_butterfly(args) -> int:
    schema = _schema_from(args)
    if args.input is not None:
        if args.aux is None:
            raise MissingAux("butterfly fitting needs --aux with the y series")
        ts = read_csv(args.input, schema)
        y = read_csv(args.aux, schema).w
    else:
        points = args.points if args.points is not None else DEFAULT_POINTS
        dt = args.dt if args.dt is not None else DEFAULT_DT
        ts, y = simulate_butterfly(
            DuhemParams(args.alpha, args.beta, args.gamma),
            _excitation_from(args), points, dt, 0.0, args.offset)
    result = fit_butterfly(ts, y, threshold=args.threshold)

    inner_path = _out_path(args, f"{args.out_prefix}_inner.txt")
    outer_path = _out_path(args, f"{args.out_prefix}_outer.txt")
    write_model(inner_path, result.inner.model, result.inner)
    write_model(outer_path, result.outer.model, result.outer)
    print(render_equation(result.inner.model))
    print(render_equation(result.outer.model))
    for name, ratio in result.ratios.items():
        print(f"outer/inner ratio for {name}: {ratio:.4f}")
    print(f"coupled simulation R = {result.outer.r_percent:.6g} %")
    print(f"wrote models to {inner_path} and {outer_path}")
    return 0


USAGE_ERRORS = (TooShort, InvalidExcitation, MissingAux, ValueError)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (HysteresisError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line surface: compute once, plot many.

Subcommands: ``score``, ``plot``, ``render``, ``cooks``, ``halfnormal``,
``generate-data``. Input is the wide CSV convention (see :mod:`resaudit.io`),
output is JSON plot/score documents or SVG. Exit codes: 0 ok, 2 user or
validation error, 3 adapter/protocol failure. ``RESAUDIT_SEED`` is used when
no ``--seed`` is given.
"""
from __future__ import annotations

import argparse
import os
import shlex
import sys

import numpy as np

from . import curves, scores
from .datasets import DEFAULT_SEED, generate_auditor_data
from .errors import AdapterError, DegenerateError, ValidationError
from .frame import (PLOT_KINDS, SCORE_KINDS, AuditFrame, ORDER_FITTED,
                    ORDER_OBSERVED, make_classification_frame,
                    make_residual_frame)
from .influence import cooks_distance, halfnormal, score_halfnormal
from .io import (PlotDataDocument, ScoreReport, dataset_sha256, ingest_csv,
                 make_metadata, parse_plot_document, serialize_score,
                 table_csv_text)
from .models import make_handle
from .multimodel import (DEFAULT_RANKING_SCORES, model_correlation, model_pca,
                         pca_series, ranking, ranking_series)
from .svg import render_svg

RESIDUAL_SCORES = {
    "mae": scores.score_mae, "mse": scores.score_mse, "rmse": scores.score_rmse,
    "dw": scores.score_dw, "runs": scores.score_runs, "peak": scores.score_peak,
    "rec": scores.score_rec, "rroc": scores.score_rroc,
}
CLASSIFICATION_SCORES = {"auc": scores.score_auc, "auprc": scores.score_auprc}


def _write_output(text: str, path: str | None):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("RESAUDIT_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ValidationError(f"RESAUDIT_SEED must be an integer, got {env!r}")
    return DEFAULT_SEED


def _design_matrix(frame: AuditFrame, design: str | None):
    if not design:
        raise ValidationError("this operation requires --design with a "
                              "comma-separated list of numeric variable columns")
    names = [c.strip() for c in design.split(",") if c.strip()]
    cols = []
    for name in names:
        if name not in frame.variables:
            raise ValidationError(f"design column {name!r} not found")
        if not frame.is_numeric_variable(name):
            raise ValidationError(f"design column {name!r} is categorical")
        cols.append(frame.variables[name])
    return np.column_stack(cols), names


def _model_handle(args):
    command = shlex.split(args.adapter_cmd) if getattr(args, "adapter_cmd", None) \
        else None
    model = getattr(args, "model", "builtin-ols")
    if command and model == "builtin-ols":
        model = "adapter"
    return make_handle(model, adapter_command=command)


def _close_handle(handle):
    close = getattr(handle, "close", None)
    if close is not None:
        close()


# -- score ---------------------------------------------------------------

def cmd_score(args) -> int:
    frame = ingest_csv(args.input, y_column=args.y_column)
    ids = args.type
    unknown = [i for i in ids if i not in SCORE_KINDS]
    if unknown:
        raise ValidationError(
            f"unknown score type(s) {unknown}; valid: {sorted(SCORE_KINDS)}")

    results = []
    warnings: list[str] = []
    seed_used = None
    for score_id in ids:
        if score_id in RESIDUAL_SCORES:
            if not frame.labels:
                raise ValidationError(
                    f"score {score_id!r} needs yhat:<label> prediction columns")
            for label in frame.labels:
                rf = make_residual_frame(frame, label, order_key=args.variable)
                results.append(RESIDUAL_SCORES[score_id](rf))
        elif score_id in CLASSIFICATION_SCORES:
            if not args.label_column:
                raise ValidationError(
                    f"score {score_id!r} requires --label-column")
            if not frame.labels:
                raise ValidationError(
                    f"score {score_id!r} needs yhat:<label> prediction columns")
            for label in frame.labels:
                cf = make_classification_frame(frame, args.label_column, label)
                results.append(CLASSIFICATION_SCORES[score_id](cf))
        else:  # refit-based
            X, names = _design_matrix(frame, args.design)
            handle = _model_handle(args)
            try:
                if score_id == "cooksdistance":
                    res = cooks_distance(handle, X, frame.y,
                                         top_k=args.top_k, column_names=names)
                    results.append(_cooks_score_entry(res, handle.name))
                    warnings.extend(res.warnings)
                else:
                    seed_used = _resolve_seed(args)
                    hn = halfnormal(handle, X, frame.y, m=args.sims,
                                    seed=seed_used)
                    results.append(score_halfnormal(hn))
                    if not hn.deterministic:
                        warnings.append(
                            "adapter declared nondeterministic simulation")
            finally:
                _close_handle(handle)

    report = ScoreReport(
        scores=tuple(results),
        metadata=make_metadata(dataset_sha256(args.input), seed_used, warnings))
    _write_output(report.to_json(), args.output)
    return 0


# -- plot ------------------------------------------------------------------

def _residual_frames(frame: AuditFrame, order_key: str):
    if not frame.labels:
        raise ValidationError("dataset has no yhat:<label> prediction columns")
    return [make_residual_frame(frame, label, order_key=order_key)
            for label in frame.labels]


def build_plot_document(frame: AuditFrame, plot_type: str, *, order_key=None,
                        group_by=None, label_column=None, smooth=False,
                        max_lag=None, dataset_hash=None, seed=None,
                        design=None, model_args=None, sims=100,
                        top_k=3) -> PlotDataDocument:
    """Assemble the multi-model plot document for one plot type."""
    series = []
    extra: dict = {}
    warnings: list[str] = []
    seed_used = None

    if plot_type == "residual":
        for rf in _residual_frames(frame, order_key or ORDER_FITTED):
            series.append(curves.residual_scatter(rf))
    elif plot_type == "autocorrelation":
        for rf in _residual_frames(frame, order_key or ORDER_FITTED):
            series.append(curves.autocorrelation_scatter(rf))
    elif plot_type == "scalelocation":
        for rf in _residual_frames(frame, order_key or ORDER_FITTED):
            series.extend(curves.scale_location(rf))
    elif plot_type == "residual_boxplot":
        for rf in _residual_frames(frame, order_key or ORDER_FITTED):
            series.extend(curves.boxplot_series(curves.residual_boxplot(rf)))
    elif plot_type == "residual_density":
        group_values = None
        if group_by:
            if group_by not in frame.variables:
                raise ValidationError(f"group variable {group_by!r} not found")
            group_values = frame.variables[group_by]
        for rf in _residual_frames(frame, order_key or ORDER_FITTED):
            grp, warn = curves.residual_density(rf, group_values, group_by)
            series.extend(grp)
            warnings.extend(warn)
    elif plot_type == "tsecdf":
        for rf in _residual_frames(frame, order_key or ORDER_FITTED):
            series.extend(curves.tsecdf(rf))
    elif plot_type == "rec":
        for rf in _residual_frames(frame, order_key or ORDER_FITTED):
            series.append(curves.rec_curve(rf))
    elif plot_type == "rroc":
        for rf in _residual_frames(frame, order_key or ORDER_FITTED):
            series.append(curves.rroc_curve(rf))
    elif plot_type == "performance":
        for rf in _residual_frames(frame, order_key or ORDER_OBSERVED):
            series.extend(curves.predicted_response(rf, smooth=smooth))
    elif plot_type == "acf":
        conf = {}
        for rf in _residual_frames(frame, order_key or ORDER_FITTED):
            acf_series = scores.acf(rf, max_lag=max_lag)
            conf[rf.label] = acf_series.conf
            series.append(curves.CurveSeries(
                kind="acf", label=rf.label,
                xs=acf_series.lags.astype(float), ys=acf_series.rho_hat,
                aux={"gamma": tuple(acf_series.gamma_hat.tolist())}))
        extra["conf"] = conf
    elif plot_type in ("roc", "lift", "prc"):
        if not label_column:
            raise ValidationError(f"plot {plot_type!r} requires --label-column")
        for label in frame.labels:
            cf = make_classification_frame(frame, label_column, label)
            if plot_type == "roc":
                series.append(curves.roc_curve(cf))
            elif plot_type == "prc":
                series.append(curves.prc_curve(cf))
            else:
                series.extend(curves.lift_chart(cf))
        if plot_type == "lift":  # drop duplicated reference curves
            seen = set()
            series = [s for s in series
                      if not (s.label in ("ideal", "random")
                              and (s.label in seen or seen.add(s.label)))]
    elif plot_type == "pca":
        frames = _residual_frames(frame, order_key or ORDER_FITTED)
        biplot = model_pca(frames)
        series.extend(pca_series(biplot))
        extra["explained"] = list(biplot.explained)
    elif plot_type == "correlation":
        result = model_correlation(frame)
        series.extend(result.series)
        extra["columns"] = list(result.columns)
        extra["matrix"] = [[float(v) for v in row] for row in result.matrix]
    elif plot_type == "radar":
        frames = _residual_frames(frame, order_key or ORDER_FITTED)
        raw = {sid: {rf.label: RESIDUAL_SCORES[sid](rf).value for rf in frames}
               for sid in DEFAULT_RANKING_SCORES}
        table = ranking(raw)
        series.extend(ranking_series(table))
        extra["reference"] = table.reference_label
        extra["entries"] = [
            {"label": e.label, "score": e.score_name, "raw": e.raw,
             "invscore": e.invscore, "scaled": e.scaled}
            for e in table.entries]
    elif plot_type == "cooksdistance":
        doc_series, extra, warnings, _ = _cooks_payload(
            frame, design, model_args, top_k)
        series.extend(doc_series)
    elif plot_type == "halfnormal":
        seed_used = seed
        doc_series, extra, warnings = _halfnormal_payload(
            frame, design, model_args, sims, seed)
        series.extend(doc_series)
    else:
        raise ValidationError(
            f"unknown plot type {plot_type!r}; valid: {sorted(PLOT_KINDS)}")

    return PlotDataDocument(
        plot_type=plot_type, series=tuple(series),
        metadata=make_metadata(dataset_hash, seed_used, warnings),
        extra=extra)


def _cooks_score_entry(res, label):
    """Scalar summary of a Cook's distance vector: the largest finite D."""
    finite = np.flatnonzero(np.isfinite(res.D))
    if finite.size == 0:
        raise ValidationError("all Cook's distances are non-finite")
    argmax = int(finite[np.argmax(res.D[finite])])
    return scores.ScoreResult(
        "cooksdistance", label, float(res.D[argmax]),
        components={"argmax": float(argmax), "p": res.p, "s2": res.s2})


def _cooks_payload(frame, design, model_args, top_k):
    X, names = _design_matrix(frame, design)
    handle = _model_handle(model_args)
    try:
        res = cooks_distance(handle, X, frame.y, top_k=top_k,
                             column_names=names)
    finally:
        _close_handle(handle)
    warnings = list(res.warnings)
    finite = np.isfinite(res.D)
    if not np.all(finite):
        warnings.append("non-finite Cook's distances omitted from the series")
    idx = np.flatnonzero(finite)
    top_set = set(res.top_k)
    series = [curves.CurveSeries(
        kind="cooksdistance", label=handle.name,
        xs=idx.astype(float), ys=res.D[idx],
        aux={"top": tuple(bool(i in top_set) for i in idx)})]
    extra = {"method": res.method, "p": res.p, "s2": res.s2,
             "top_k": list(res.top_k),
             "scores": [serialize_score(_cooks_score_entry(res, handle.name))]}
    return series, extra, warnings, res


def _halfnormal_payload(frame, design, model_args, sims, seed):
    X, names = _design_matrix(frame, design)
    handle = _model_handle(model_args)
    try:
        result = halfnormal(handle, X, frame.y, m=sims, seed=seed)
    finally:
        _close_handle(handle)
    warnings = [] if result.deterministic else \
        ["adapter declared nondeterministic simulation"]
    qs = result.theoretical_q
    series = [
        curves.CurveSeries(kind="halfnormal", label=handle.name,
                           xs=qs, ys=result.sorted_abs_diag,
                           aux={"part": ("points",) * result.n,
                                "S": tuple(int(s) for s in result.S)}),
        curves.CurveSeries(kind="halfnormal", label=handle.name, xs=qs,
                           ys=result.env_lo,
                           aux={"part": ("env_lo",) * result.n}),
        curves.CurveSeries(kind="halfnormal", label=handle.name, xs=qs,
                           ys=result.env_hi,
                           aux={"part": ("env_hi",) * result.n}),
    ]
    extra = {"m": result.m, "hn_score": result.hn_score,
             "scores": [serialize_score(score_halfnormal(result))]}
    return series, extra, warnings


def cmd_plot(args) -> int:
    frame = ingest_csv(args.input, y_column=args.y_column)
    ids = args.type
    unknown = [i for i in ids if i not in PLOT_KINDS]
    if unknown:
        raise ValidationError(
            f"unknown plot type(s) {unknown}; valid: {sorted(PLOT_KINDS)}")
    dataset_hash = dataset_sha256(args.input)
    seed = _resolve_seed(args)

    documents = [build_plot_document(
        frame, plot_type, order_key=args.variable, group_by=args.group_by,
        label_column=args.label_column, smooth=args.smooth,
        max_lag=args.max_lag, dataset_hash=dataset_hash, seed=seed,
        design=args.design, model_args=args, sims=args.sims,
        top_k=args.top_k) for plot_type in ids]

    if args.output and len(documents) > 1:
        os.makedirs(args.output, exist_ok=True)
        for doc in documents:
            with open(os.path.join(args.output, f"{doc.plot_type}.json"),
                      "w", encoding="utf-8") as fh:
                fh.write(doc.to_json())
    else:
        _write_output("".join(doc.to_json() for doc in documents), args.output)
    return 0


# -- other commands -----------------------------------------------------------

def cmd_render(args) -> int:
    with open(args.input, "r", encoding="utf-8") as fh:
        document = parse_plot_document(fh.read())
    _write_output(render_svg(document), args.output)
    return 0


def cmd_cooks(args) -> int:
    frame = ingest_csv(args.input, y_column=args.y_column)
    series, extra, warnings, _ = _cooks_payload(frame, args.design, args,
                                                args.top_k)
    doc = PlotDataDocument(
        plot_type="cooksdistance", series=tuple(series),
        metadata=make_metadata(dataset_sha256(args.input), None, warnings),
        extra=extra)
    _write_output(doc.to_json(), args.output)
    return 0


def cmd_halfnormal(args) -> int:
    frame = ingest_csv(args.input, y_column=args.y_column)
    seed = _resolve_seed(args)
    series, extra, warnings = _halfnormal_payload(frame, args.design, args,
                                                  args.sims, seed)
    doc = PlotDataDocument(
        plot_type="halfnormal", series=tuple(series),
        metadata=make_metadata(dataset_sha256(args.input), seed, warnings),
        extra=extra)
    _write_output(doc.to_json(), args.output)
    return 0


def cmd_generate_data(args) -> int:
    table = generate_auditor_data(seed=_resolve_seed(args))
    _write_output(table_csv_text(table), args.output)
    return 0


# -- parser ------------------------------------------------------------------

def _add_common(p, with_seed=True):
    p.add_argument("--input", required=True, help="input CSV path")
    p.add_argument("--output", default=None, help="output path (default stdout)")
    p.add_argument("--y-column", default="y", help="response column name")
    if with_seed:
        p.add_argument("--seed", type=int, default=None,
                       help="random seed (fallback: RESAUDIT_SEED)")


def _add_model_flags(p):
    p.add_argument("--design", default=None,
                   help="comma-separated numeric design columns for refitting")
    p.add_argument("--model", default="builtin-ols",
                   choices=["builtin-ols", "builtin-constant", "adapter"])
    p.add_argument("--adapter-cmd", default=None,
                   help="adapter command line (implies --model adapter)")
    p.add_argument("--sims", type=int, default=100,
                   help="half-normal simulation count")
    p.add_argument("--top-k", type=int, default=3,
                   help="number of largest Cook's distances to flag")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="resaudit",
        description="Model-agnostic residual diagnostics: scores, plot data, "
                    "and SVG charts from observed/predicted CSV data.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="compute diagnostic scores")
    _add_common(p)
    p.add_argument("--type", action="append", required=True,
                   help="score id (repeatable): " + ", ".join(sorted(SCORE_KINDS)))
    p.add_argument("--variable", default=ORDER_FITTED,
                   help="ordering axis for order-sensitive scores")
    p.add_argument("--label-column", default=None,
                   help="binary label column for classification scores")
    _add_model_flags(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("plot", help="compute plot-data documents")
    _add_common(p)
    p.add_argument("--type", action="append", required=True,
                   help="plot id (repeatable): " + ", ".join(sorted(PLOT_KINDS)))
    p.add_argument("--variable", default=None,
                   help="ordering axis (default depends on the plot)")
    p.add_argument("--group-by", default=None,
                   help="grouping variable for residual_density")
    p.add_argument("--label-column", default=None,
                   help="binary label column for classification plots")
    p.add_argument("--smooth", action="store_true",
                   help="add a LOWESS smoother where supported")
    p.add_argument("--max-lag", type=int, default=None, help="acf max lag")
    _add_model_flags(p)
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("render", help="render a plot document to SVG")
    p.add_argument("--input", required=True, help="plot document JSON path")
    p.add_argument("--output", default=None, help="SVG output path")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("cooks", help="Cook's distances via refitting")
    _add_common(p, with_seed=False)
    _add_model_flags(p)
    p.set_defaults(func=cmd_cooks)

    p = sub.add_parser("halfnormal", help="half-normal envelope via simulation")
    _add_common(p)
    _add_model_flags(p)
    p.set_defaults(func=cmd_halfnormal)

    p = sub.add_parser("generate-data", help="emit the synthetic demo dataset")
    p.add_argument("--seed", type=int, default=None,
                   help="random seed (fallback: RESAUDIT_SEED)")
    p.add_argument("--output", default=None, help="CSV output path")
    p.set_defaults(func=cmd_generate_data)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except AdapterError as exc:
        print(f"resaudit: adapter error: {exc}", file=sys.stderr)
        return 3
    except (ValidationError, DegenerateError) as exc:
        print(f"resaudit: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"resaudit: i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""resaudit: model-agnostic residual diagnostics.

Compute diagnostic scores and plot data from observed and predicted values
of any regression or binary-classification model; refitting diagnostics
(Cook's distance, half-normal envelopes) run against built-in models or an
external model adapter speaking a JSON-lines protocol.
"""
from .errors import AdapterError, AuditError, DegenerateError, ValidationError
from .frame import (AuditFrame, ClassificationFrame, CurveSeries,
                    ResidualFrame, ScoreResult, make_classification_frame,
                    make_residual_frame, sort_by_order)
from .numerics import (LinearModelFit, ecdf, kde_gaussian, lowess, make_rng,
                       normal_quantile, normal_sample, ols_fit, sym_eigen_2pc)
from .models import (AdapterHandle, BuiltinConstant, BuiltinOls,
                     adapter_handshake, make_handle)
from .scores import (acf, custom_score, score_auc, score_auprc, score_dw,
                     score_mae, score_mse, score_peak, score_rec, score_rmse,
                     score_rroc, score_runs)
from .curves import (BoxplotStats, autocorrelation_scatter, lift_chart,
                     prc_curve, predicted_response, rec_curve,
                     residual_boxplot, residual_density, residual_scatter,
                     roc_curve, rroc_curve, scale_location, tsecdf)
from .influence import (CooksResult, HalfNormalResult, cooks_distance,
                        halfnormal, score_halfnormal)
from .multimodel import (PcaBiplot, RankingTable, model_correlation,
                         model_pca, ranking)
from .datasets import generate_auditor_data
from .io import PlotDataDocument, ScoreReport, ingest_csv
from .svg import render_svg

__version__ = "0.1.0"

__all__ = [
    "AdapterError", "AuditError", "DegenerateError", "ValidationError",
    "AuditFrame", "ClassificationFrame", "CurveSeries", "ResidualFrame",
    "ScoreResult", "make_classification_frame", "make_residual_frame",
    "sort_by_order",
    "LinearModelFit", "ecdf", "kde_gaussian", "lowess", "make_rng",
    "normal_quantile", "normal_sample", "ols_fit", "sym_eigen_2pc",
    "AdapterHandle", "BuiltinConstant", "BuiltinOls", "adapter_handshake",
    "make_handle",
    "acf", "custom_score", "score_auc", "score_auprc", "score_dw",
    "score_mae", "score_mse", "score_peak", "score_rec", "score_rmse",
    "score_rroc", "score_runs",
    "BoxplotStats", "autocorrelation_scatter", "lift_chart", "prc_curve",
    "predicted_response", "rec_curve", "residual_boxplot", "residual_density",
    "residual_scatter", "roc_curve", "rroc_curve", "scale_location", "tsecdf",
    "CooksResult", "HalfNormalResult", "cooks_distance", "halfnormal",
    "score_halfnormal",
    "PcaBiplot", "RankingTable", "model_correlation", "model_pca", "ranking",
    "generate_auditor_data",
    "PlotDataDocument", "ScoreReport", "ingest_csv", "render_svg",
    "__version__",
]

"""Core data model shared by every diagnostic.

An :class:`AuditFrame` holds one dataset: the observed response, one
prediction vector per model, and the remaining columns as variables.
Residual-based diagnostics consume a :class:`ResidualFrame` (one model's
residuals plus the axis they should be ordered by), classification
diagnostics a :class:`ClassificationFrame`. Every plot builder emits
:class:`CurveSeries`, every scalar diagnostic a :class:`ScoreResult`.

All containers are immutable after construction (frozen dataclasses over
read-only numpy arrays), so they are safe to share across threads.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import ValidationError

ORDER_INDEX = "_index_"
ORDER_OBSERVED = "_y_"
ORDER_FITTED = "_y_hat_"

#: plot-type identifiers accepted in CurveSeries.kind and plot documents
PLOT_KINDS = frozenset({
    "acf", "autocorrelation", "cooksdistance", "correlation", "halfnormal",
    "lift", "pca", "performance", "prc", "radar", "rec", "residual",
    "residual_boxplot", "residual_density", "roc", "rroc", "scalelocation",
    "tsecdf",
})

#: score-type identifiers accepted in score reports
SCORE_KINDS = frozenset({
    "dw", "runs", "peak", "mae", "mse", "rmse", "rec", "rroc", "auc",
    "auprc", "halfnormal", "cooksdistance",
})

#: kinds whose x coordinate must be non-decreasing within a series
_MONOTONE_KINDS = frozenset({"roc", "rec", "lift", "tsecdf", "rroc"})


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def as_float_vector(values, name: str) -> np.ndarray:
    """Coerce to a 1-d float array, rejecting NaN/Inf up front."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be a 1-d vector, got shape {arr.shape}")
    if arr.size == 0:
        raise ValidationError(f"{name} must not be empty")
    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise ValidationError(f"{name} contains a non-finite value at position {bad}")
    return _freeze(arr.copy())


@dataclass(frozen=True)
class AuditFrame:
    """One ingested dataset: observed response, model predictions, variables.

    ``variables`` maps column names to either float arrays (numeric) or
    string arrays (categorical). Categorical columns are kept as strings;
    operations requiring a numeric ordering reject them instead of coercing.
    """

    y: np.ndarray
    models: tuple[tuple[str, np.ndarray], ...]
    variables: Mapping[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        y = as_float_vector(self.y, "y")
        object.__setattr__(self, "y", y)
        n = y.size
        seen: set[str] = set()
        norm_models = []
        for label, y_hat in self.models:
            if not label:
                raise ValidationError("model labels must be non-empty")
            if label in seen:
                raise ValidationError(f"duplicate model label {label!r}")
            seen.add(label)
            pred = as_float_vector(y_hat, f"prediction {label!r}")
            if pred.size != n:
                raise ValidationError(
                    f"prediction {label!r} has length {pred.size}, expected {n}")
            norm_models.append((label, pred))
        object.__setattr__(self, "models", tuple(norm_models))

        norm_vars: dict[str, np.ndarray] = {}
        for name, col in self.variables.items():
            arr = np.asarray(col)
            if arr.ndim != 1 or arr.size != n:
                raise ValidationError(
                    f"variable {name!r} has shape {arr.shape}, expected ({n},)")
            if np.issubdtype(arr.dtype, np.number):
                norm_vars[name] = as_float_vector(arr, f"variable {name!r}")
            else:
                norm_vars[name] = _freeze(arr.astype(str))
        object.__setattr__(self, "variables", norm_vars)

    @property
    def n(self) -> int:
        return self.y.size

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.models)

    def prediction(self, label: str) -> np.ndarray:
        for lbl, y_hat in self.models:
            if lbl == label:
                return y_hat
        raise ValidationError(
            f"unknown model label {label!r}; available: {list(self.labels)}")

    def is_numeric_variable(self, name: str) -> bool:
        col = self.variables.get(name)
        return col is not None and np.issubdtype(col.dtype, np.floating)


@dataclass(frozen=True)
class ResidualFrame:
    """Per-model residuals with the axis used to order them.

    ``order_key`` is one of the sentinels ``"_y_"``, ``"_y_hat_"``,
    ``"_index_"`` or the name of a numeric variable; ``order_values`` is the
    corresponding column. Rows are kept in ingestion order; diagnostics that
    need sorted rows call :func:`sort_by_order` themselves.
    """

    label: str
    y: np.ndarray
    y_hat: np.ndarray
    r: np.ndarray
    order_key: str
    order_values: np.ndarray

    def __post_init__(self):
        for name in ("y", "y_hat", "r", "order_values"):
            object.__setattr__(self, name, as_float_vector(getattr(self, name), name))
        n = self.y.size
        if not (self.y_hat.size == self.r.size == self.order_values.size == n):
            raise ValidationError("ResidualFrame vectors must share one length")
        if np.max(np.abs(self.y - self.y_hat - self.r)) != 0.0:
            raise ValidationError("residuals must equal y - y_hat exactly")

    @property
    def n(self) -> int:
        return self.y.size


def make_residual_frame(frame: AuditFrame, label: str,
                        order_key: str = ORDER_FITTED) -> ResidualFrame:
    """Build the residual frame for one model of ``frame``.

    Residuals are the exact difference observed minus predicted. The rows
    are not sorted here; sorting is per-diagnostic.
    """
    y_hat = frame.prediction(label)
    if order_key == ORDER_INDEX:
        order_values = np.arange(frame.n, dtype=float)
    elif order_key == ORDER_OBSERVED:
        order_values = frame.y
    elif order_key == ORDER_FITTED:
        order_values = y_hat
    elif order_key in frame.variables:
        if not frame.is_numeric_variable(order_key):
            raise ValidationError(
                f"variable {order_key!r} is categorical; ordering requires a numeric column")
        order_values = frame.variables[order_key]
    else:
        raise ValidationError(
            f"unknown order key {order_key!r}; use '_y_', '_y_hat_', '_index_' "
            f"or a numeric variable name")
    return ResidualFrame(label=label, y=frame.y, y_hat=y_hat,
                         r=frame.y - y_hat, order_key=order_key,
                         order_values=order_values)


def sort_by_order(rf: ResidualFrame) -> ResidualFrame:
    """Return ``rf`` with rows permuted into non-decreasing order values.

    Ties are broken by original index (stable sort), so the result is
    deterministic and the operation idempotent.
    """
    perm = np.argsort(rf.order_values, kind="stable")
    return ResidualFrame(label=rf.label, y=rf.y[perm], y_hat=rf.y_hat[perm],
                         r=rf.r[perm], order_key=rf.order_key,
                         order_values=rf.order_values[perm])


@dataclass(frozen=True)
class ClassificationFrame:
    """Binary labels with one model's predicted scores."""

    labels: np.ndarray
    scores: np.ndarray
    model_label: str = "model"

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=float)
        if labels.ndim != 1 or labels.size == 0:
            raise ValidationError("labels must be a non-empty 1-d vector")
        if not np.all(np.isin(labels, (0.0, 1.0))):
            raise ValidationError("labels must contain only 0 and 1")
        object.__setattr__(self, "labels", _freeze(labels.astype(int)))
        scores = as_float_vector(self.scores, "scores")
        if scores.size != labels.size:
            raise ValidationError("labels and scores must share one length")
        object.__setattr__(self, "scores", scores)

    @property
    def n(self) -> int:
        return self.labels.size

    @property
    def positives(self) -> int:
        return int(np.sum(self.labels == 1))

    @property
    def negatives(self) -> int:
        return int(np.sum(self.labels == 0))

    def require_both_classes(self):
        if self.positives == 0 or self.negatives == 0:
            raise ValidationError(
                "both classes must be present (got "
                f"{self.positives} positives, {self.negatives} negatives)")


def make_classification_frame(frame: AuditFrame, label_column: str,
                              model_label: str) -> ClassificationFrame:
    """Pair a binary label column of ``frame`` with one model's scores."""
    if label_column == ORDER_OBSERVED:
        labels = frame.y
    elif label_column in frame.variables:
        if not frame.is_numeric_variable(label_column):
            raise ValidationError(f"label column {label_column!r} is categorical")
        labels = frame.variables[label_column]
    else:
        raise ValidationError(f"unknown label column {label_column!r}")
    return ClassificationFrame(labels=labels, scores=frame.prediction(model_label),
                               model_label=model_label)


@dataclass(frozen=True)
class CurveSeries:
    """A labelled polyline: the universal plot-data product.

    ``aux`` holds optional per-point vectors (thresholds, indices, flags)
    aligned with the points.
    """

    kind: str
    label: str
    xs: np.ndarray
    ys: np.ndarray
    aux: Mapping[str, tuple] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in PLOT_KINDS:
            raise ValidationError(f"unknown plot kind {self.kind!r}")
        xs = as_float_vector(self.xs, "xs")
        ys = as_float_vector(self.ys, "ys")
        if xs.size != ys.size:
            raise ValidationError("xs and ys must share one length")
        if self.kind in _MONOTONE_KINDS and np.any(np.diff(xs) < 0):
            raise ValidationError(f"{self.kind} series must have non-decreasing x")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        aux = {}
        for name, col in self.aux.items():
            values = tuple(col)
            if len(values) != xs.size:
                raise ValidationError(
                    f"aux vector {name!r} has length {len(values)}, expected {xs.size}")
            aux[name] = values
        object.__setattr__(self, "aux", aux)

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.xs.tolist(), self.ys.tolist()))


@dataclass(frozen=True)
class ScoreResult:
    """A named scalar diagnostic plus its intermediate components."""

    name: str
    label: str
    value: float
    components: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        value = float(self.value)
        if not np.isfinite(value):
            raise ValidationError(f"score {self.name!r} produced non-finite value")
        object.__setattr__(self, "value", value)
        object.__setattr__(
            self, "components",
            {k: float(v) for k, v in self.components.items()})

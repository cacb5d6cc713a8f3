"""Builders for every plot-data series.

Each operation turns a :class:`ResidualFrame` or :class:`ClassificationFrame`
into one or more :class:`CurveSeries`. Ordering-sensitive builders sort rows
by the frame's order key themselves, so callers can pass frames in ingestion
order. Where a plot has several visual layers (points + smoother, box +
outliers, curve + envelope) each layer is emitted as its own series tagged
with a constant ``part`` aux vector.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateError, ValidationError
from .frame import ClassificationFrame, CurveSeries, ResidualFrame, sort_by_order
from .numerics import kde_gaussian, lowess, silverman_bandwidth

DENSITY_GRID_POINTS = 512
DENSITY_BANDWIDTHS_PADDING = 3.0
WHISKER_SPAN = 1.5


def _part(name: str, m: int) -> dict:
    return {"part": (name,) * m}


def _order_permutation(rf: ResidualFrame) -> np.ndarray:
    return np.argsort(rf.order_values, kind="stable")


def residual_scatter(rf: ResidualFrame) -> CurveSeries:
    """Residuals against the ordering axis, sorted; aux carries row indices."""
    perm = _order_permutation(rf)
    return CurveSeries(kind="residual", label=rf.label,
                       xs=rf.order_values[perm], ys=rf.r[perm],
                       aux={"index": tuple(int(i) for i in perm)})


@dataclass(frozen=True)
class BoxplotStats:
    """Five-number summary of |residuals| plus the RMSE marker."""

    label: str
    q1: float
    median: float
    q3: float
    whisker_lo: float
    whisker_hi: float
    outliers: tuple[float, ...]
    rmse_marker: float


def residual_boxplot(rf: ResidualFrame) -> BoxplotStats:
    """Tukey boxplot of absolute residuals; whiskers at 1.5 IQR."""
    abs_r = np.abs(rf.r)
    q1, med, q3 = np.percentile(abs_r, [25.0, 50.0, 75.0])
    iqr = q3 - q1
    lo_fence = q1 - WHISKER_SPAN * iqr
    hi_fence = q3 + WHISKER_SPAN * iqr
    inside = abs_r[(abs_r >= lo_fence) & (abs_r <= hi_fence)]
    whisker_lo = float(inside.min())
    whisker_hi = float(inside.max())
    outliers = abs_r[(abs_r < whisker_lo) | (abs_r > whisker_hi)]
    return BoxplotStats(label=rf.label, q1=float(q1), median=float(med),
                        q3=float(q3), whisker_lo=whisker_lo,
                        whisker_hi=whisker_hi,
                        outliers=tuple(sorted(float(v) for v in outliers)),
                        rmse_marker=float(np.sqrt(np.mean(rf.r ** 2))))


def boxplot_series(stats: BoxplotStats) -> list[CurveSeries]:
    """Serialize boxplot stats as plot series (box components, then outliers)."""
    roles = ("whisker_lo", "q1", "median", "q3", "whisker_hi", "rmse_marker")
    values = (stats.whisker_lo, stats.q1, stats.median, stats.q3,
              stats.whisker_hi, stats.rmse_marker)
    series = [CurveSeries(kind="residual_boxplot", label=stats.label,
                          xs=np.arange(len(roles), dtype=float),
                          ys=np.asarray(values),
                          aux={"part": ("box",) * len(roles), "role": roles})]
    if stats.outliers:
        m = len(stats.outliers)
        series.append(CurveSeries(kind="residual_boxplot", label=stats.label,
                                  xs=np.zeros(m), ys=np.asarray(stats.outliers),
                                  aux=_part("outliers", m)))
    return series


def autocorrelation_scatter(rf: ResidualFrame) -> CurveSeries:
    """Lag-1 scatter: i-th residual against (i+1)-th, in order-key order."""
    if rf.n < 2:
        raise ValidationError("autocorrelation plot requires n >= 2")
    r = sort_by_order(rf).r
    return CurveSeries(kind="autocorrelation", label=rf.label,
                       xs=r[:-1], ys=r[1:])


def running_peak_flags(abs_r: np.ndarray) -> np.ndarray:
    """True where |r_i| is >= every earlier |r_j| (first entry always True)."""
    return abs_r >= np.maximum.accumulate(abs_r)


def scale_location(rf: ResidualFrame,
                   span: float = 2.0 / 3.0) -> tuple[CurveSeries, CurveSeries]:
    """Square root of |standardized residuals| against the ordering axis.

    Standardization divides by the sample residual standard deviation
    (divisor n - 1). Returns the point series (peak flags in aux) and a
    LOWESS smoother series.
    """
    if rf.n < 3:
        raise ValidationError("scale-location requires n >= 3")
    s_r = float(np.std(rf.r, ddof=1))
    if s_r <= 0.0:
        raise DegenerateError("residual standard deviation is zero")
    perm = _order_permutation(rf)
    xs = rf.order_values[perm]
    abs_std = np.abs(rf.r[perm]) / s_r
    ys = np.sqrt(abs_std)
    peaks = running_peak_flags(np.abs(rf.r[perm]))
    points = CurveSeries(kind="scalelocation", label=rf.label, xs=xs, ys=ys,
                         aux={"part": ("points",) * rf.n,
                              "peak": tuple(bool(b) for b in peaks)})
    smooth = CurveSeries(kind="scalelocation", label=rf.label, xs=xs,
                         ys=lowess(xs, ys, span=span),
                         aux=_part("smoother", rf.n))
    return points, smooth


def residual_density(rf: ResidualFrame, group_values=None,
                     group_name: str | None = None
                     ) -> tuple[list[CurveSeries], list[str]]:
    """KDE of residuals, optionally one series per group of a variable.

    Groups with fewer than 2 distinct residuals are skipped; a warning
    string is returned for each. Rug (the raw residuals) is emitted as a
    separate ``part="rug"`` series per group.
    """
    if group_values is None:
        groups = {None: np.arange(rf.n)}
    else:
        values = np.asarray(group_values)
        if values.shape != (rf.n,):
            raise ValidationError("group variable must align with the frame rows")
        groups = {key: np.flatnonzero(values == key) for key in np.unique(values)}

    series: list[CurveSeries] = []
    warnings: list[str] = []
    for key, idx in sorted(groups.items(), key=lambda kv: str(kv[0])):
        r = rf.r[idx]
        suffix = "" if key is None else f" | {group_name or 'group'}={key}"
        if np.unique(r).size < 2:
            warnings.append(
                f"density group {rf.label}{suffix!s} skipped: "
                "fewer than 2 distinct residuals")
            continue
        bw = silverman_bandwidth(r)
        lo = r.min() - DENSITY_BANDWIDTHS_PADDING * bw
        hi = r.max() + DENSITY_BANDWIDTHS_PADDING * bw
        grid = np.linspace(lo, hi, DENSITY_GRID_POINTS)
        label = rf.label + suffix
        series.append(CurveSeries(kind="residual_density", label=label,
                                  xs=grid, ys=kde_gaussian(r, grid),
                                  aux=_part("density", DENSITY_GRID_POINTS)))
        series.append(CurveSeries(kind="residual_density", label=label,
                                  xs=np.sort(r), ys=np.zeros(r.size),
                                  aux=_part("rug", r.size)))
    return series, warnings


def tsecdf(rf: ResidualFrame) -> list[CurveSeries]:
    """Two-sided ECDF: separately normalized curves for each residual sign.

    Zeros count as positive. The negative side plots the scaled fraction of
    negative residuals >= t, so the outer ends of the two curves sum to 1.
    """
    r = rf.r
    n = r.size
    neg = np.sort(r[r < 0])
    pos = np.sort(r[r >= 0])
    series = []
    if neg.size:
        xs = np.unique(neg)
        at_least = neg.size - np.searchsorted(neg, xs, side="left")
        series.append(CurveSeries(
            kind="tsecdf", label=rf.label, xs=xs,
            ys=at_least / n, aux=_part("negative", xs.size)))
    if pos.size:
        xs = np.unique(pos)
        at_most = np.searchsorted(pos, xs, side="right")
        series.append(CurveSeries(
            kind="tsecdf", label=rf.label, xs=xs,
            ys=at_most / n, aux=_part("positive", xs.size)))
    return series


def rec_curve(rf: ResidualFrame) -> CurveSeries:
    """Regression error characteristic: accuracy against error tolerance."""
    abs_r = np.abs(rf.r)
    eps = np.unique(abs_r)
    acc = np.searchsorted(np.sort(abs_r), eps, side="right") / rf.n
    if eps[0] > 0.0:
        eps = np.concatenate([[0.0], eps])
        acc = np.concatenate([[0.0], acc])
    return CurveSeries(kind="rec", label=rf.label, xs=eps, ys=acc)


def rroc_vertices(r: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """RROC vertices (shift, total over-estimation, total under-estimation).

    Shifts run over the sorted residual values plus the zero shift; between
    consecutive shifts both totals are linear, so these vertices describe
    the curve exactly.
    """
    shifts = np.unique(np.concatenate([r, [0.0]]))
    over = np.maximum(shifts[:, None] - r[None, :], 0.0).sum(axis=1)
    under = np.minimum(shifts[:, None] - r[None, :], 0.0).sum(axis=1)
    return shifts, over, under


def rroc_curve(rf: ResidualFrame) -> CurveSeries:
    """Under-estimation against over-estimation swept over a prediction shift."""
    if rf.n < 2:
        raise ValidationError("rroc requires n >= 2")
    shifts, over, under = rroc_vertices(rf.r)
    return CurveSeries(kind="rroc", label=rf.label, xs=over, ys=under,
                       aux={"shift": tuple(shifts.tolist()),
                            "origin": tuple(bool(s == 0.0) for s in shifts)})


def _threshold_sweep(cf: ClassificationFrame) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Descending unique thresholds with cumulative TP and FP at each."""
    order = np.argsort(-cf.scores, kind="stable")
    scores = cf.scores[order]
    labels = cf.labels[order]
    tp = np.cumsum(labels == 1)
    fp = np.cumsum(labels == 0)
    # one vertex per unique score: keep the last row of each tie block
    last = np.flatnonzero(np.diff(scores) != 0)
    keep = np.concatenate([last, [scores.size - 1]])
    return scores[keep], tp[keep], fp[keep]


def roc_curve(cf: ClassificationFrame) -> CurveSeries:
    """ROC: true positive rate against false positive rate, ties grouped."""
    cf.require_both_classes()
    thresholds, tp, fp = _threshold_sweep(cf)
    xs = np.concatenate([[0.0], fp / cf.negatives])
    ys = np.concatenate([[0.0], tp / cf.positives])
    aux = {"threshold": (None, *thresholds.tolist())}
    return CurveSeries(kind="roc", label=cf.model_label, xs=xs, ys=ys, aux=aux)


def lift_chart(cf: ClassificationFrame) -> list[CurveSeries]:
    """LIFT chart plus the ideal and random reference curves."""
    cf.require_both_classes()
    thresholds, tp, fp = _threshold_sweep(cf)
    n, p = cf.n, cf.positives
    xs = np.concatenate([[0.0], (tp + fp) / n])
    ys = np.concatenate([[0.0], tp]).astype(float)
    model = CurveSeries(kind="lift", label=cf.model_label, xs=xs, ys=ys,
                        aux={"threshold": (None, *thresholds.tolist())})
    ideal = CurveSeries(kind="lift", label="ideal",
                        xs=np.asarray([0.0, p / n, 1.0]),
                        ys=np.asarray([0.0, p, p], dtype=float))
    random_ref = CurveSeries(kind="lift", label="random",
                             xs=np.asarray([0.0, 1.0]),
                             ys=np.asarray([0.0, p], dtype=float))
    return [model, ideal, random_ref]


def prc_curve(cf: ClassificationFrame) -> CurveSeries:
    """Precision against recall over descending thresholds."""
    cf.require_both_classes()
    thresholds, tp, fp = _threshold_sweep(cf)
    recall = tp / cf.positives
    precision = tp / (tp + fp)
    xs = np.concatenate([[0.0], recall])
    ys = np.concatenate([[precision[0]], precision])
    return CurveSeries(kind="prc", label=cf.model_label, xs=xs, ys=ys,
                       aux={"threshold": (None, *thresholds.tolist())})


def predicted_response(rf: ResidualFrame, smooth: bool = False,
                       span: float = 2.0 / 3.0) -> list[CurveSeries]:
    """Predicted values against the ordering axis (observed response by default).

    The point series carries the y = x diagonal reference in aux; with
    ``smooth`` a LOWESS series is appended.
    """
    perm = _order_permutation(rf)
    xs = rf.order_values[perm]
    ys = rf.y_hat[perm]
    series = [CurveSeries(kind="performance", label=rf.label, xs=xs, ys=ys,
                          aux={"part": ("points",) * rf.n,
                               "diagonal": tuple(xs.tolist()),
                               "index": tuple(int(i) for i in perm)})]
    if smooth:
        series.append(CurveSeries(kind="performance", label=rf.label, xs=xs,
                                  ys=lowess(xs, ys, span=span),
                                  aux=_part("smoother", rf.n)))
    return series

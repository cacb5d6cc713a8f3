"""Scalar diagnostics.

Ordering-sensitive scores (Durbin-Watson, runs, peak, ACF) operate on the
residuals sorted by the frame's order key; the sort happens here, so frames
can be passed in ingestion order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.stats import rankdata

from .curves import rroc_vertices, running_peak_flags
from .errors import DegenerateError, ValidationError
from .frame import (ClassificationFrame, ResidualFrame, ScoreResult,
                    sort_by_order)


def _ordered_residuals(rf: ResidualFrame) -> np.ndarray:
    return sort_by_order(rf).r


def score_mae(rf: ResidualFrame) -> ScoreResult:
    """Mean absolute error of the residuals."""
    return ScoreResult("mae", rf.label, float(np.mean(np.abs(rf.r))))


def score_mse(rf: ResidualFrame) -> ScoreResult:
    """Mean squared error of the residuals."""
    return ScoreResult("mse", rf.label, float(np.mean(rf.r ** 2)))


def score_rmse(rf: ResidualFrame) -> ScoreResult:
    """Root mean squared error of the residuals."""
    return ScoreResult("rmse", rf.label, float(np.sqrt(np.mean(rf.r ** 2))))


def score_dw(rf: ResidualFrame) -> ScoreResult:
    """Durbin-Watson statistic of the ordered residuals.

    Values near 2 indicate no lag-1 autocorrelation; small values positive
    correlation, large values negative correlation.
    """
    r = _ordered_residuals(rf)
    if r.size < 2:
        raise ValidationError("dw requires n >= 2")
    denom = float(r @ r)
    if denom == 0.0:
        raise DegenerateError("dw undefined: all residuals are zero")
    num = float(np.sum(np.diff(r) ** 2))
    return ScoreResult("dw", rf.label, num / denom)


@dataclass(frozen=True)
class RunsComponents:
    """Observed runs, their null mean and standard deviation, and the z value."""

    U: int
    U_bar: float
    s_U: float
    Z: float


def runs_components(signs: np.ndarray) -> RunsComponents:
    """Wald-Wolfowitz runs statistic for a +-1 sign sequence."""
    n1 = int(np.sum(signs > 0))
    n2 = int(np.sum(signs < 0))
    if n1 == 0 or n2 == 0:
        raise DegenerateError("runs undefined: residuals have a single sign")
    n = n1 + n2
    u = 1 + int(np.sum(signs[1:] != signs[:-1]))
    u_bar = 2.0 * n1 * n2 / n + 1.0
    var = 2.0 * n1 * n2 * (2.0 * n1 * n2 - n) / (n * n * (n - 1.0))
    s_u = math.sqrt(max(var, 0.0))
    if s_u == 0.0:
        raise DegenerateError("runs undefined: zero run-count variance")
    return RunsComponents(U=u, U_bar=u_bar, s_U=s_u, Z=(u - u_bar) / s_u)


def score_runs(rf: ResidualFrame) -> ScoreResult:
    """Sign-runs test statistic of the ordered residuals (zeros dropped)."""
    r = _ordered_residuals(rf)
    signs = np.sign(r[r != 0.0])
    if signs.size == 0:
        raise DegenerateError("runs undefined: all residuals are zero")
    comp = runs_components(signs)
    return ScoreResult("runs", rf.label, comp.Z,
                       components={"U": comp.U, "U_bar": comp.U_bar,
                                   "s_U": comp.s_U, "Z": comp.Z})


def score_peak(rf: ResidualFrame) -> ScoreResult:
    """Fraction of ordered observations whose |residual| is a running maximum."""
    r = _ordered_residuals(rf)
    flags = running_peak_flags(np.abs(r))
    return ScoreResult("peak", rf.label, float(np.sum(flags)) / r.size)


@dataclass(frozen=True)
class AcfSeries:
    """Sample autocorrelations by lag with a symmetric confidence half-width."""

    lags: np.ndarray
    gamma_hat: np.ndarray
    rho_hat: np.ndarray
    conf: float


def acf(rf: ResidualFrame, max_lag: int | None = None) -> AcfSeries:
    """Sample autocovariance/autocorrelation of the ordered residuals.

    Uses the 1/n divisor and the overall mean; lag 0 (always 1) is excluded
    from the output. Default max lag is ceil(10*log10(n)), capped at n - 1.
    """
    x = _ordered_residuals(rf)
    n = x.size
    if n < 3:
        raise ValidationError("acf requires n >= 3")
    if max_lag is None:
        max_lag = min(n - 1, int(math.ceil(10.0 * math.log10(n))))
    if not 1 <= max_lag <= n - 1:
        raise ValidationError(f"max_lag must be in [1, {n - 1}], got {max_lag}")
    centered = x - np.mean(x)
    gamma0 = float(centered @ centered) / n
    if gamma0 <= 0.0:
        raise DegenerateError("acf undefined: residuals have zero variance")
    lags = np.arange(1, max_lag + 1)
    gamma = np.asarray([float(centered[t:] @ centered[:-t]) / n for t in lags])
    return AcfSeries(lags=lags, gamma_hat=gamma, rho_hat=gamma / gamma0,
                     conf=1.96 / math.sqrt(n))


def score_rec(rf: ResidualFrame) -> ScoreResult:
    """Area over the REC curve, integrated exactly from the |r| step function.

    Analytically this equals the mean absolute error; the integral is kept
    so the identity stays testable.
    """
    abs_r = np.sort(np.abs(rf.r))
    eps = np.unique(abs_r)
    acc = np.searchsorted(abs_r, eps, side="right") / rf.n
    gaps = np.diff(eps)
    aoc = float(np.sum(gaps * (1.0 - acc[:-1]))) if gaps.size else 0.0
    if eps[0] > 0.0:
        aoc += float(eps[0])  # accuracy is zero below the smallest |r|
    return ScoreResult("rec", rf.label, aoc)


def score_rroc(rf: ResidualFrame) -> ScoreResult:
    """Area over the RROC curve by exact piecewise-linear integration."""
    if rf.n < 2:
        raise ValidationError("rroc requires n >= 2")
    _, over, under = rroc_vertices(rf.r)
    aoc = float(np.sum(np.diff(over) * -(under[:-1] + under[1:]) / 2.0))
    return ScoreResult("rroc", rf.label, aoc)


def score_auc(cf: ClassificationFrame) -> ScoreResult:
    """Area under the ROC curve, Mann-Whitney form with half credit for ties."""
    cf.require_both_classes()
    ranks = rankdata(cf.scores, method="average")
    rank_sum_pos = float(np.sum(ranks[cf.labels == 1]))
    p, n = cf.positives, cf.negatives
    auc = (rank_sum_pos - p * (p + 1) / 2.0) / (p * n)
    return ScoreResult("auc", cf.model_label, auc)


def score_auprc(cf: ClassificationFrame) -> ScoreResult:
    """Area under the precision-recall curve by step-wise integration."""
    cf.require_both_classes()
    order = np.argsort(-cf.scores, kind="stable")
    scores = cf.scores[order]
    labels = cf.labels[order]
    tp = np.cumsum(labels == 1)
    fp = np.cumsum(labels == 0)
    keep = np.concatenate([np.flatnonzero(np.diff(scores) != 0),
                           [scores.size - 1]])
    recall = tp[keep] / cf.positives
    precision = tp[keep] / (tp[keep] + fp[keep])
    steps = np.diff(np.concatenate([[0.0], recall]))
    return ScoreResult("auprc", cf.model_label, float(np.sum(steps * precision)))


def custom_score(name: str, fn: Callable, target) -> ScoreResult:
    """Wrap a user scoring function; lower values must mean a better model."""
    value = fn(target)
    try:
        value = float(value)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"custom score {name!r} did not return a number") from exc
    if not np.isfinite(value):
        raise ValidationError(f"custom score {name!r} returned a non-finite value")
    label = getattr(target, "label", getattr(target, "model_label", ""))
    return ScoreResult(name, label, value)
